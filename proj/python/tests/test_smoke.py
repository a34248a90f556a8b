import json

import pytest

import cctlab


def test_aloha_optimum_matches_closed_form():
    assert cctlab.aloha_cct(0.5, 0.5) == pytest.approx(8.0)
    trace = cctlab.simulate_aloha(0.5, 0.5, slots=200_000, seed=3)
    assert cctlab.channel_cycle_time(trace) == pytest.approx(8.0, rel=0.03)


def test_csma_simulation_near_analytic():
    params = cctlab.CsmaParams(pkt=30)
    analytic = cctlab.csma_cct(params)
    assert analytic["psi_slots"] == pytest.approx(135.0, abs=0.5)
    trace = cctlab.simulate_csma(params, cctlab.CsmaMode.RTSCTS, slots=500_000, seed=5)
    assert cctlab.channel_cycle_time(trace) == pytest.approx(analytic["psi_slots"], rel=0.05)


def test_trace_text_round_trip():
    text = "#users=A+B\n0,2,S,A\n2,4,S,B\n4,6,S,A\n6,8,S,B\n8,10,S,A\n"
    trace = cctlab.parse_trace(text)
    assert cctlab.refresh_moments(trace, "A") == [2, 6]
    assert cctlab.cycle_times(trace, "A") == [4]
    assert cctlab.parse_trace(trace.to_text()).to_text() == trace.to_text()


def test_summary_json_fields():
    trace = cctlab.simulate_tdma([3, 5], slots=80)
    doc = json.loads(cctlab.summary_json(trace))
    assert doc["psi_slots"] == 8
    assert doc["psi_undefined"] is False
    assert [u["user"] for u in doc["users"]] == ["U0", "U1"]


def test_errors_map_to_python_exceptions():
    with pytest.raises(cctlab.ValidationError):
        cctlab.CsmaParams(cw_min=0)
    with pytest.raises(cctlab.Error):
        cctlab.csma_cct(cctlab.CsmaParams(), p_ni0=1.0)
