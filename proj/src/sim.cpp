#include "cctlab/sim.hpp"

#include <algorithm>
#include <utility>

#include "cctlab/rng.hpp"

namespace cct {

namespace {

// Collects events after the warm-up cut and merges adjacent idle periods.
class TraceBuilder {
 public:
  explicit TraceBuilder(Tick warmup) : warmup_(warmup) {}

  void add(const ChannelEvent& e) {
    if (e.start < warmup_) return;
    if (e.kind == EventKind::Idle && !events_.empty()) {
      ChannelEvent& last = events_.back();
      if (last.kind == EventKind::Idle && last.end == e.start) {
        last.end = e.end;
        return;
      }
    }
    events_.push_back(e);
  }

  ChannelTrace finish(std::vector<std::string> users, Tick horizon) {
    return ChannelTrace(std::move(users), std::move(events_), horizon);
  }

 private:
  Tick warmup_;
  std::vector<ChannelEvent> events_;
};

bool is_timed(CsmaPhase phase) { return phase != CsmaPhase::Contention; }

}  // namespace

void RunSettings::validate() const {
  if (horizon < 1) throw ValidationError("horizon must be at least one slot");
  if (warmup < 0) throw ValidationError("warm-up must be non-negative");
  if (users.empty()) throw ValidationError("at least one user is required");
  if (users.size() > kMaxUsers) throw ValidationError("too many users");
  for (const auto& u : users) {
    if (!is_valid_user_label(u)) throw ValidationError("invalid user label '" + u + "'");
  }
}

ChannelTrace simulate_aloha(const RunSettings& settings, const AlohaParams& params) {
  params.validate();
  if (settings.users.size() != 2) {
    throw ValidationError("AlohaParams describe exactly two users");
  }
  const std::array<double, 2> probs{params.p_a, params.p_b};
  return simulate_aloha(settings, probs, params.slot);
}

ChannelTrace simulate_aloha(const RunSettings& settings, std::span<const double> probs, Tick slot) {
  settings.validate();
  if (probs.size() != settings.users.size()) {
    throw ValidationError("need one transmit probability per user");
  }
  for (double p : probs) AlohaParams{p, p, slot}.validate();

  std::vector<RandomStream> rng;
  rng.reserve(probs.size());
  for (std::size_t u = 0; u < probs.size(); ++u) rng.emplace_back(settings.seed, u);

  TraceBuilder out(settings.warmup);
  const Tick slots = settings.horizon / slot;
  for (Tick k = 0; k < slots; ++k) {
    UserMask senders = 0;
    for (std::size_t u = 0; u < probs.size(); ++u) {
      if (rng[u].bernoulli(probs[u])) senders |= UserMask{1} << u;
    }
    const Tick start = k * slot;
    const Tick end = start + slot;
    if (senders == 0) {
      out.add(ChannelEvent::idle(start, end));
    } else if ((senders & (senders - 1)) == 0) {
      out.add({start, end, EventKind::Success, senders});
    } else {
      out.add(ChannelEvent::collision(start, end, senders));
    }
  }
  return out.finish(settings.users, settings.horizon);
}

CsmaRun simulate_csma(const RunSettings& settings, const CsmaParams& params, CsmaMode mode,
                      bool record_audit) {
  settings.validate();
  params.validate();
  if (settings.users.size() != 2) {
    throw ValidationError("the CSMA/CA simulator models exactly two users");
  }

  std::array<RandomStream, 2> rng{RandomStream(settings.seed, 0), RandomStream(settings.seed, 1)};
  std::array<CsmaUserState, 2> user{};
  std::array<std::int64_t, 2> round_counter{};
  const auto redraw = [&](std::size_t u) {
    user[u].backoff_counter =
        rng[u].uniform_int(1, params.contention_window(user[u].backoff_stage));
    user[u].frozen = false;
  };

  const Tick horizon = settings.horizon;
  const Tick success_air = params.success_airtime(mode);
  const Tick collision_air = params.collision_airtime(mode);
  const Tick first_phase = mode == CsmaMode::RtsCts ? params.l_rcts() : params.l_tran();

  for (std::size_t u = 0; u < 2; ++u) {
    user[u].phase = CsmaPhase::Difs;
    user[u].phase_end = params.l_difs;
    redraw(u);
  }

  CsmaRun run;
  TraceBuilder out(settings.warmup);
  Tick t = 0;
  Tick idle_start = 0;
  bool colliding = false;

  // Ends the timed phase of user u at tick t.
  const auto advance = [&](std::size_t u) {
    CsmaUserState& s = user[u];
    switch (s.phase) {
      case CsmaPhase::Difs:
        s.phase = CsmaPhase::Contention;
        round_counter[u] = s.backoff_counter;
        return;
      case CsmaPhase::Rcts:
        if (!colliding) {
          s.phase = CsmaPhase::Tran;
          s.phase_end = t + params.l_tran();
          return;
        }
        break;
      case CsmaPhase::Tran:
      case CsmaPhase::Nav:
      case CsmaPhase::Contention:
        break;
    }
    if (s.phase == CsmaPhase::Rcts || s.phase == CsmaPhase::Tran) {
      if (colliding) {
        s.backoff_stage = std::min(s.backoff_stage + 1, params.beta);
      } else {
        s.backoff_stage = 0;
      }
      redraw(u);
    }
    s.phase = CsmaPhase::Difs;
    s.phase_end = t + params.l_difs;
  };

  while (t < horizon) {
    if (is_timed(user[0].phase) || is_timed(user[1].phase)) {
      Tick next = horizon + 1;
      for (const auto& s : user) {
        if (is_timed(s.phase)) next = std::min(next, s.phase_end);
      }
      t = next;
      if (t > horizon) break;
      for (std::size_t u = 0; u < 2; ++u) {
        if (is_timed(user[u].phase) && user[u].phase_end == t) advance(u);
      }
      continue;
    }

    // Both users contend in slot t.
    const bool zero_a = user[0].backoff_counter == 0;
    const bool zero_b = user[1].backoff_counter == 0;
    if (!zero_a && !zero_b) {
      --user[0].backoff_counter;
      --user[1].backoff_counter;
      ++t;
      continue;
    }
    const bool collision = zero_a && zero_b;
    const Tick airtime = collision ? collision_air : success_air;
    if (t + airtime > horizon) break;

    if (t > idle_start) out.add(ChannelEvent::idle(idle_start, t));
    if (record_audit) {
      ContentionRecord rec;
      rec.t = t;
      if (!collision) rec.winner = zero_a ? 0 : 1;
      rec.stage = {user[0].backoff_stage, user[1].backoff_stage};
      rec.counter = round_counter;
      run.audit.push_back(rec);
    }

    colliding = collision;
    if (collision) {
      for (auto& s : user) {
        s.phase = mode == CsmaMode::RtsCts ? CsmaPhase::Rcts : CsmaPhase::Tran;
        s.phase_end = t + collision_air;
      }
      out.add(ChannelEvent::collision(t, t + airtime, UserMask{0b11}));
    } else {
      const std::size_t w = zero_a ? 0 : 1;
      CsmaUserState& winner = user[w];
      CsmaUserState& loser = user[1 - w];
      winner.phase = mode == CsmaMode::RtsCts ? CsmaPhase::Rcts : CsmaPhase::Tran;
      winner.phase_end = t + first_phase;
      // The loser still counts down in slot t, then defers airtime - 1 slots.
      --loser.backoff_counter;
      loser.frozen = true;
      loser.phase = CsmaPhase::Nav;
      loser.phase_end = t + airtime;
      out.add(ChannelEvent::success(t, t + airtime, w));
    }
    idle_start = t + airtime;
  }

  // Nothing else fits before the horizon; the channel stays idle.
  if (horizon > idle_start) out.add(ChannelEvent::idle(idle_start, horizon));
  run.trace = out.finish(settings.users, horizon);
  return run;
}

ChannelTrace simulate_tdma(const RunSettings& settings, std::span<const Tick> packet_lengths) {
  settings.validate();
  if (packet_lengths.size() != settings.users.size()) {
    throw ValidationError("need one packet length per user");
  }
  for (Tick l : packet_lengths) {
    if (l < 1) throw ValidationError("packet lengths must be positive");
  }
  TraceBuilder out(settings.warmup);
  Tick t = 0;
  std::size_t u = 0;
  while (t + packet_lengths[u] <= settings.horizon) {
    out.add(ChannelEvent::success(t, t + packet_lengths[u], u));
    t += packet_lengths[u];
    u = (u + 1) % packet_lengths.size();
  }
  if (t < settings.horizon) out.add(ChannelEvent::idle(t, settings.horizon));
  return out.finish(settings.users, settings.horizon);
}

}  // namespace cct
