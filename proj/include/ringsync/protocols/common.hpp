#pragma once

#include "ringsync/runner.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ringsync::protocols {

// A schedule ran out without producing a nontrivial move.
struct Exhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// What an agent learned about its two neighbours, in its logical sense.
struct NeighborInfo {
  Rational left_gap;
  Rational right_gap;
  bool left_same = true;   // left neighbour shares the logical sense
  bool right_same = true;

  // The same knowledge after the agent reversed its own logical sense.
  NeighborInfo mirrored() const { return {right_gap, left_gap, right_same, left_same}; }
};

// A nontrivial move as seen by one agent: its direction (in its logical sense
// at the time of the move) and, when detected with a doubled round, the class.
struct MoveResult {
  Direction move = Direction::Right;
  std::optional<RotationClass> observed;
  std::size_t index = 0;  // position in the schedule that succeeded (0 = first probe)
  int level = -1;         // sparsification level of the selective protocol, -1 = probe
};

struct AgentOutcome {
  std::optional<bool> leader;
  std::optional<bool> flipped;      // logical sense reversed by direction agreement
  std::optional<bool> nonempty;     // emptiness test answer
  std::optional<MoveResult> move;
  std::optional<std::size_t> label; // 1 for the leader, then clockwise in the common sense
  std::optional<std::vector<Rational>> recovered_gaps;  // own sense, from the initial position
  std::optional<NeighborInfo> neighbors;
  std::map<int, std::vector<bool>> received;  // offset (negative = left) -> message
  std::size_t rounds = 0;
};

// Runs `d` twice and classifies the rotation from the two distances.
inline Task<RotationClass> doubled_round(AgentContext& ctx, Direction d) {
  RoundFeedback f1 = co_await ctx.round(d);
  RoundFeedback f2 = co_await ctx.round(d);
  co_return classify_rotation(f1, f2);
}

// Physically reverses every round since history index `from`, last first.
inline Task<void> undo_since(AgentContext& ctx, std::size_t from) {
  std::vector<Direction> own;
  for (std::size_t i = from; i < ctx.history().size(); ++i) own.push_back(ctx.history()[i].own);
  for (auto it = own.rbegin(); it != own.rend(); ++it) co_await ctx.round(ctx.logical_for_own(opposite(*it)));
}

// Logical gaps seen from the current position (gaps[k] between the agents k and
// k+1 places to the logical right), re-expressed from the agent's initial
// position in its own sense.
inline std::vector<Rational> to_initial_own_frame(const AgentContext& ctx, const std::vector<Rational>& logical) {
  const std::size_t n = logical.size();
  const Rational target = mod_one(-ctx.offset());
  std::size_t shift = n;
  Rational acc = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (acc == target) {
      shift = s;
      break;
    }
    acc += logical[s];
  }
  if (shift == n) throw std::logic_error("initial position is not an occupied point");
  std::vector<Rational> from_start(n);
  for (std::size_t k = 0; k < n; ++k) from_start[k] = logical[(shift + k) % n];
  if (!ctx.sense_flipped()) return from_start;
  std::vector<Rational> own(n);
  for (std::size_t k = 0; k < n; ++k) own[k] = from_start[n - 1 - k];
  return own;
}

}  // namespace ringsync::protocols
