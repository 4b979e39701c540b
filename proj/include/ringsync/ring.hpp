#pragma once

#include "ringsync/rational.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ringsync {

enum class Direction { Left, Right, Idle };
enum class ModelKind { Basic, Lazy, Perceptive };
enum class RotationClass { Zero, ExactlyHalf, LessThanHalf, MoreThanHalf };

struct InvalidConfig : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A direction that the model does not allow (Idle outside the lazy model).
struct ModelViolation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

constexpr Direction opposite(Direction d) {
  switch (d) {
    case Direction::Left: return Direction::Right;
    case Direction::Right: return Direction::Left;
    case Direction::Idle: return Direction::Idle;
  }
  return Direction::Idle;
}

// Maps an agent's own direction onto the objective frame (+1: own right is clockwise).
constexpr Direction resolve(Direction own, int chirality) {
  return chirality >= 0 ? own : opposite(own);
}

inline std::string_view to_string(ModelKind m) {
  switch (m) {
    case ModelKind::Basic: return "basic";
    case ModelKind::Lazy: return "lazy";
    case ModelKind::Perceptive: return "perceptive";
  }
  return "?";
}

inline ModelKind parse_model(std::string_view s) {
  if (s == "basic") return ModelKind::Basic;
  if (s == "lazy") return ModelKind::Lazy;
  if (s == "perceptive") return ModelKind::Perceptive;
  throw std::invalid_argument("unknown model: " + std::string(s));
}

inline std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::Left: return "L";
    case Direction::Right: return "R";
    case Direction::Idle: return "I";
  }
  return "?";
}

inline std::string_view to_string(RotationClass c) {
  switch (c) {
    case RotationClass::Zero: return "zero";
    case RotationClass::ExactlyHalf: return "half";
    case RotationClass::LessThanHalf: return "less-than-half";
    case RotationClass::MoreThanHalf: return "more-than-half";
  }
  return "?";
}

// Ground truth of the world. Agents are listed in objective clockwise order;
// gaps[i] is the clockwise arc from agent i to agent i+1 (mod n).
struct RingConfig {
  std::vector<Rational> gaps;
  std::vector<int> ids;
  int cap_N = 0;
  std::vector<int> chirality;
  bool parity_known = true;

  std::size_t size() const { return gaps.size(); }

  void validate() const {
    const std::size_t n = gaps.size();
    if (n < 2) throw InvalidConfig("a ring needs at least two agents");
    if (ids.size() != n || chirality.size() != n)
      throw InvalidConfig("ids/chirality length differs from gap count");
    Rational total = 0;
    for (const auto& g : gaps) {
      if (g <= 0) throw InvalidConfig("gaps must be strictly positive (distinct positions)");
      total += g;
    }
    if (total != 1) throw InvalidConfig("gaps must sum to exactly 1, got " + to_string(total));
    std::set<int> seen;
    for (int id : ids) {
      if (id < 1 || id > cap_N) throw InvalidConfig("id out of [1, cap_N]: " + std::to_string(id));
      if (!seen.insert(id).second) throw InvalidConfig("duplicate id " + std::to_string(id));
    }
    for (int c : chirality)
      if (c != 1 && c != -1) throw InvalidConfig("chirality must be +1 or -1");
  }

  // Positions with agent 0 at the origin.
  std::vector<Rational> positions() const {
    std::vector<Rational> p(size());
    Rational acc = 0;
    for (std::size_t i = 0; i < size(); ++i) {
      p[i] = acc;
      acc += gaps[i];
    }
    return p;
  }

  // Clockwise arc covering `count` consecutive gaps starting at agent `from`.
  Rational arc(std::size_t from, std::size_t count) const {
    Rational total = 0;
    for (std::size_t k = 0; k < count; ++k) total += gaps[(from + k) % size()];
    return total;
  }
};

struct RoundSpec {
  std::vector<Direction> directions;  // objective, already chirality-resolved
  ModelKind model = ModelKind::Basic;
};

struct RoundFeedback {
  Rational dist;                // own-clockwise offset start -> end, in [0, 1)
  std::optional<Rational> coll; // path length to the first collision (perceptive only)

  bool operator==(const RoundFeedback&) const = default;
};

struct RoundResult {
  std::size_t rotation = 0;
  std::vector<Rational> final_positions;  // same origin as RingConfig::positions()
  std::vector<RoundFeedback> feedback;
  RingConfig next;                        // the world after the round, same agent order
};

inline void check_spec(const RoundSpec& spec, std::size_t n) {
  if (spec.directions.size() != n)
    throw std::invalid_argument("round spec has " + std::to_string(spec.directions.size()) +
                                " directions for " + std::to_string(n) + " agents");
  if (spec.model != ModelKind::Lazy)
    for (auto d : spec.directions)
      if (d == Direction::Idle)
        throw ModelViolation("idle is only allowed in the lazy model");
}

// (n_C - n_A) mod n; idle agents are counted in neither.
inline std::size_t rotation_index(const RoundSpec& spec, std::size_t n) {
  long long c = 0;
  for (auto d : spec.directions) {
    if (d == Direction::Right) ++c;
    else if (d == Direction::Left) --c;
  }
  const long long m = static_cast<long long>(n);
  return static_cast<std::size_t>(((c % m) + m) % m);
}

// Distance to the first collision of `agent`: the agent and its followers
// b_1..b_k move together, b_{k+1} moves against them, and the collision happens
// halfway along the arc from the agent to b_{k+1}.
inline std::optional<Rational> first_collision_distance(const RingConfig& config,
                                                        const RoundSpec& spec,
                                                        std::size_t agent) {
  if (spec.model != ModelKind::Perceptive)
    throw ModelViolation("collision distances are only observable in the perceptive model");
  const std::size_t n = config.size();
  check_spec(spec, n);
  const Direction d = spec.directions[agent];
  Rational travelled = 0;
  std::size_t cur = agent;
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t next;
    if (d == Direction::Right) {
      travelled += config.gaps[cur];
      next = (cur + 1) % n;
    } else {
      next = (cur + n - 1) % n;
      travelled += config.gaps[next];
    }
    if (spec.directions[next] != d) return travelled / 2;
    cur = next;
  }
  return std::nullopt;
}

inline RoundResult execute_round(const RingConfig& config, const RoundSpec& spec) {
  const std::size_t n = config.size();
  check_spec(spec, n);
  RoundResult out;
  out.rotation = rotation_index(spec, n);
  const std::size_t r = out.rotation;

  std::vector<Rational> prefix(n + 1);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + config.gaps[i];
  auto clockwise_arc = [&](std::size_t from, std::size_t count) -> Rational {
    if (from + count <= n) return prefix[from + count] - prefix[from];
    return (1 - prefix[from]) + prefix[from + count - n];
  };

  out.final_positions.resize(n);
  out.feedback.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.final_positions[i] = prefix[(i + r) % n];
    Rational arc = clockwise_arc(i, r);
    out.feedback[i].dist = config.chirality[i] > 0 ? arc : mod_one(1 - arc);
    if (spec.model == ModelKind::Perceptive)
      out.feedback[i].coll = first_collision_distance(config, spec, i);
  }

  out.next = config;
  for (std::size_t i = 0; i < n; ++i) out.next.gaps[i] = config.gaps[(i + r) % n];
  return out;
}

// Two rounds with identical directions: s = dist1 + dist2 covers 2r gaps.
inline RotationClass classify_rotation(const RoundFeedback& first, const RoundFeedback& second) {
  const Rational s = first.dist + second.dist;
  if (s == 0) return RotationClass::Zero;
  if (s == 1) return RotationClass::ExactlyHalf;
  return s < 1 ? RotationClass::LessThanHalf : RotationClass::MoreThanHalf;
}

inline bool is_nontrivial(RotationClass c) {
  return c == RotationClass::LessThanHalf || c == RotationClass::MoreThanHalf;
}

inline bool is_nontrivial_rotation(std::size_t r, std::size_t n) {
  return r != 0 && 2 * r != n;
}

// RI(B) = 2 |B ∩ A| mod n.
inline std::size_t set_rotation_index(std::span<const int> members, const RingConfig& config) {
  std::set<int> b(members.begin(), members.end());
  std::size_t hits = 0;
  for (int id : config.ids) hits += b.count(id);
  return (2 * hits) % config.size();
}

}  // namespace ringsync
