#pragma once

// Event-driven continuous simulation of unit-speed beads on a ring over one
// round. Independent of the closed-form engine in ring.hpp and used to check it.

#include "ringsync/ring.hpp"

#include <algorithm>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ringsync::oracle {

struct CollisionEvent {
  Rational time;
  Rational position;  // in [0, 1)
  std::pair<std::size_t, std::size_t> participants;
};

struct FirstContact {
  Rational time;
  Rational position;
  Rational path;  // distance travelled before the contact
};

struct Trace {
  std::vector<CollisionEvent> events;
  std::vector<Rational> final_positions;  // in [0, 1), same origin as RingConfig::positions()
  std::vector<Rational> displacement;     // signed, unwrapped (clockwise positive)
  std::vector<std::optional<FirstContact>> first_collision;
};

inline int velocity_of(Direction d) {
  switch (d) {
    case Direction::Right: return 1;
    case Direction::Left: return -1;
    case Direction::Idle: return 0;
  }
  return 0;
}

inline Trace simulate_continuous(const RingConfig& config, const RoundSpec& spec) {
  config.validate();
  const std::size_t n = config.size();
  check_spec(spec, n);

  std::vector<Rational> pos = config.positions();
  const std::vector<Rational> start = pos;
  std::vector<int> vel(n);
  for (std::size_t i = 0; i < n; ++i) vel[i] = velocity_of(spec.directions[i]);
  std::vector<Rational> travelled(n, Rational(0));

  Trace trace;
  trace.first_collision.resize(n);

  auto gap = [&](std::size_t i) -> Rational {
    return i + 1 < n ? pos[i + 1] - pos[i] : pos[0] + 1 - pos[n - 1];
  };

  Rational now = 0;
  const std::size_t max_batches = 4 * n * n + 16;
  for (std::size_t batch = 0;; ++batch) {
    if (batch > max_batches) throw std::logic_error("oracle: event bound exceeded");

    std::optional<Rational> dt;
    for (std::size_t i = 0; i < n; ++i) {
      const int closing = vel[i] - vel[(i + 1) % n];
      if (closing <= 0) continue;
      Rational t = gap(i) / closing;
      if (!dt || t < *dt) dt = t;
    }
    const Rational remaining = 1 - now;
    const Rational step = (dt && *dt <= remaining) ? *dt : remaining;
    for (std::size_t i = 0; i < n; ++i) {
      pos[i] += step * vel[i];
      travelled[i] += step * (vel[i] != 0 ? 1 : 0);
    }
    now += step;
    if (!dt || *dt > remaining) break;

    // Group agents sharing a point into clusters of consecutive agents.
    std::size_t anchor = 0;
    while (gap((anchor + n - 1) % n) == 0) anchor = (anchor + 1) % n;
    std::size_t i = 0;
    while (i < n) {
      std::vector<std::size_t> cluster{(anchor + i) % n};
      while (i + 1 < n && gap((anchor + i) % n) == 0) {
        ++i;
        cluster.push_back((anchor + i) % n);
      }
      ++i;
      if (cluster.size() < 2) continue;
      std::vector<int> v;
      for (auto a : cluster) v.push_back(vel[a]);
      if (std::is_sorted(v.begin(), v.end())) continue;  // touching but separating
      const Rational where = mod_one(pos[cluster.front()]);
      for (std::size_t k = 0; k + 1 < cluster.size(); ++k)
        trace.events.push_back({now, where, {cluster[k], cluster[k + 1]}});
      for (auto a : cluster)
        if (!trace.first_collision[a]) trace.first_collision[a] = FirstContact{now, where, travelled[a]};
      // Equal masses: outgoing velocities are the incoming ones sorted along the ring.
      std::sort(v.begin(), v.end());
      for (std::size_t k = 0; k < cluster.size(); ++k) vel[cluster[k]] = v[k];
    }
    if (now == 1) break;
  }

  trace.final_positions.resize(n);
  trace.displacement.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    trace.final_positions[i] = mod_one(pos[i]);
    trace.displacement[i] = pos[i] - start[i];
  }
  return trace;
}

inline std::optional<Rational> first_collision_from_trace(const Trace& trace, std::size_t agent) {
  if (agent >= trace.first_collision.size()) throw std::out_of_range("agent index");
  const auto& fc = trace.first_collision[agent];
  if (!fc) return std::nullopt;
  return fc->path;
}

// What each agent would observe, derived purely from the trace.
inline std::vector<RoundFeedback> feedback_from_trace(const RingConfig& config, const Trace& trace,
                                                      ModelKind model) {
  std::vector<RoundFeedback> out(config.size());
  for (std::size_t i = 0; i < config.size(); ++i) {
    Rational cw = mod_one(trace.displacement[i]);
    out[i].dist = config.chirality[i] > 0 ? cw : mod_one(1 - cw);
    if (model == ModelKind::Perceptive) out[i].coll = first_collision_from_trace(trace, i);
  }
  return out;
}

inline void dump(std::ostream& os, const Trace& trace) {
  for (const auto& e : trace.events)
    os << "t=" << to_string(e.time) << " pos=" << to_string(e.position) << " pair="
       << e.participants.first << "," << e.participants.second << "\n";
}

}  // namespace ringsync::oracle
