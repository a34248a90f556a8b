#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cctlab/analytic.hpp"
#include "cctlab/core.hpp"
#include "cctlab/metrics.hpp"
#include "cctlab/report.hpp"
#include "cctlab/sim.hpp"
#include "cctlab/sweep.hpp"
#include "cctlab/trace_io.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

cct::RunSettings settings(std::uint64_t seed, cct::Tick horizon, cct::Tick warmup) {
  cct::RunSettings s;
  s.seed = seed;
  s.horizon = horizon;
  s.warmup = warmup;
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Channel cycle time of MAC protocols";
  m.attr("__version__") = "0.1.0";

  auto error = py::register_exception<cct::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<cct::ValidationError>(m, "ValidationError", error.ptr());
  py::register_exception<cct::DomainError>(m, "DomainError", error.ptr());
  py::register_exception<cct::NoRootError>(m, "NoRootError", error.ptr());

  py::enum_<cct::EventKind>(m, "EventKind")
      .value("SUCCESS", cct::EventKind::Success)
      .value("COLLISION", cct::EventKind::Collision)
      .value("IDLE", cct::EventKind::Idle);
  py::enum_<cct::CsmaMode>(m, "CsmaMode")
      .value("RTSCTS", cct::CsmaMode::RtsCts)
      .value("BASIC", cct::CsmaMode::Basic);

  py::class_<cct::ChannelEvent>(m, "ChannelEvent")
      .def_readonly("start", &cct::ChannelEvent::start)
      .def_readonly("end", &cct::ChannelEvent::end)
      .def_readonly("kind", &cct::ChannelEvent::kind)
      .def_readonly("users", &cct::ChannelEvent::users)
      .def("__repr__", [](const cct::ChannelEvent& e) {
        std::ostringstream s;
        s << "ChannelEvent(" << e.start << ", " << e.end << ", " << cct::to_code(e.kind) << ")";
        return s.str();
      });

  py::class_<cct::ChannelTrace>(m, "ChannelTrace")
      .def_property_readonly("users", &cct::ChannelTrace::users)
      .def_property_readonly("events", &cct::ChannelTrace::events)
      .def_property_readonly("horizon", &cct::ChannelTrace::horizon)
      .def("__len__", [](const cct::ChannelTrace& t) { return t.events().size(); })
      .def("to_text", [](const cct::ChannelTrace& t) { return cct::format_trace(t); });

  m.def("parse_trace", [](const std::string& text) { return cct::parse_trace(text).trace; });
  m.def("load_trace", [](const std::string& path) { return cct::load_trace(path).trace; });

  py::class_<cct::CsmaParams>(m, "CsmaParams")
      .def(py::init([](int cw_min, int beta, cct::Tick difs, cct::Tick pkt, cct::Tick ack,
                       cct::Tick rts, cct::Tick cts) {
             cct::CsmaParams p{cw_min, beta, difs, pkt, ack, rts, cts};
             p.validate();
             return p;
           }),
           "cw_min"_a = 32, "beta"_a = 5, "difs"_a = 4, "pkt"_a = 30, "ack"_a = 1, "rts"_a = 1,
           "cts"_a = 1)
      .def_readwrite("cw_min", &cct::CsmaParams::cw_min)
      .def_readwrite("beta", &cct::CsmaParams::beta)
      .def_readwrite("l_pkt", &cct::CsmaParams::l_pkt);

  m.def(
      "simulate_aloha",
      [](double pa, double pb, cct::Tick slots, std::uint64_t seed, cct::Tick slot, cct::Tick warmup) {
        return cct::simulate_aloha(settings(seed, slots, warmup), cct::AlohaParams{pa, pb, slot});
      },
      "pa"_a, "pb"_a, "slots"_a, "seed"_a = 1, "slot"_a = 1, "warmup"_a = cct::kDefaultWarmup);
  m.def(
      "simulate_csma",
      [](const cct::CsmaParams& params, cct::CsmaMode mode, cct::Tick slots, std::uint64_t seed,
         cct::Tick warmup) {
        return cct::simulate_csma(settings(seed, slots, warmup), params, mode).trace;
      },
      "params"_a, "mode"_a, "slots"_a, "seed"_a = 1, "warmup"_a = cct::kDefaultWarmup);
  m.def(
      "simulate_tdma",
      [](std::vector<cct::Tick> lengths, cct::Tick slots) {
        cct::RunSettings s = settings(1, slots, 0);
        s.users.clear();
        for (std::size_t i = 0; i < lengths.size(); ++i) s.users.push_back("U" + std::to_string(i));
        return cct::simulate_tdma(s, lengths);
      },
      "lengths"_a, "slots"_a);

  m.def("refresh_moments", &cct::refresh_moments, "trace"_a, "user"_a);
  m.def("cycle_times", &cct::cycle_times, "trace"_a, "user"_a);
  m.def("inter_transmissions", &cct::inter_transmissions, "trace"_a, "user"_a);
  m.def("throughput", &cct::throughput, "trace"_a);
  m.def(
      "channel_cycle_time",
      [](const cct::ChannelTrace& trace) -> std::optional<double> {
        return cct::channel_cycle_time(trace).psi;
      },
      "trace"_a, "Psi in slots, or None when some user has no cycle.");
  m.def(
      "summary_json",
      [](const cct::ChannelTrace& trace, bool details) {
        return cct::summary_to_json(cct::summarize(trace, details));
      },
      "trace"_a, "details"_a = false);

  m.def(
      "aloha_cct",
      [](double pa, double pb, cct::Tick slot) {
        return cct::aloha_cct(cct::AlohaParams{pa, pb, slot}).psi_slots;
      },
      "pa"_a, "pb"_a, "slot"_a = 1);
  m.def(
      "csma_cct",
      [](const cct::CsmaParams& params, cct::CsmaMode mode, double p_ni0, double e_ni) {
        const cct::AnalyticCct r = cct::csma_cct(params, mode, {p_ni0, e_ni});
        return py::dict("psi_slots"_a = r.psi_slots, "p_c"_a = r.components.p_c,
                        "mu"_a = r.components.mu, "part1"_a = r.components.part1_mean,
                        "part2"_a = r.components.part2_mean);
      },
      "params"_a, "mode"_a = cct::CsmaMode::RtsCts, "p_ni0"_a = 0.32, "e_ni"_a = 1.0);
  m.def(
      "solve_collision_probability",
      [](int cw_min, int beta) { return cct::solve_collision_probability(cw_min, beta).p_c; },
      "cw_min"_a, "beta"_a);
  m.def("expected_backoff_sum", &cct::expected_backoff_sum, "p_c"_a, "cw_min"_a, "beta"_a);
  m.def("rtscts_basic_inflection", &cct::rtscts_basic_inflection, "p_c"_a, "l_rcts"_a);
}
