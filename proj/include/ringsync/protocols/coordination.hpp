#pragma once

// Direction agreement, leader election, emptiness testing and nontrivial moves.

#include "ringsync/combinatorics.hpp"
#include "ringsync/protocols/common.hpp"

#include <algorithm>
#include <set>

namespace ringsync::protocols {

// Runs the move twice; agents that saw more than half a turn flip their sense.
// Returns true iff this agent flipped.
inline Task<bool> dir_agreement(AgentContext& ctx, Direction move) {
  const RotationClass c = co_await doubled_round(ctx, move);
  if (!is_nontrivial(c)) throw PreconditionFailed("direction agreement needs a nontrivial move");
  const bool flip = c == RotationClass::MoreThanHalf;
  if (flip) ctx.flip_sense();
  co_return flip;
}

// Fixes ID bits one by one inside a candidate set X with RI(X) != 0, keeping the
// half whose rotation index stays nonzero. Needs a common sense of direction.
inline Task<bool> leader_from_set(AgentContext& ctx, bool in_x) {
  for (int i = 0; i < ctx.width(); ++i) {
    const bool in_x0 = in_x && !ctx.id_bit(i);
    RoundFeedback f = co_await ctx.round(in_x0 ? Direction::Right : Direction::Left);
    if (f.dist != 0) in_x = in_x0;
    else in_x = in_x && !in_x0;
  }
  co_return in_x;
}

// `move` is in the agent's logical sense when called.
inline Task<AgentOutcome> leader_with_nmove(AgentContext& ctx, Direction move) {
  AgentOutcome out;
  const bool flipped = co_await dir_agreement(ctx, move);
  const Direction now = flipped ? opposite(move) : move;
  out.flipped = flipped;
  out.leader = co_await leader_from_set(ctx, now == Direction::Right);
  out.rounds = ctx.rounds();
  co_return out;
}

// Whether B ∩ A is nonempty; `member` says whether this agent's ID is in B.
// Needs a common sense of direction.
inline Task<bool> emptiness_test(AgentContext& ctx, bool member) {
  switch (ctx.model()) {
    case ModelKind::Lazy: {
      RoundFeedback f = co_await ctx.round(member ? Direction::Right : Direction::Idle);
      co_return f.dist != 0 || member;
    }
    case ModelKind::Perceptive: {
      RoundFeedback f = co_await ctx.round(member ? Direction::Right : Direction::Left);
      co_return f.dist != 0 || f.coll.has_value() || member;
    }
    case ModelKind::Basic: break;
  }
  RoundFeedback f = co_await ctx.round(member ? Direction::Right : Direction::Left);
  if (f.dist != 0) co_return true;
  if (ctx.n_is_odd() == true) co_return member;
  for (int i = 0; i < ctx.width(); ++i) {
    RoundFeedback g = co_await ctx.round(member && ctx.id_bit(i) ? Direction::Right : Direction::Left);
    if (g.dist != 0) co_return true;
  }
  co_return member;
}

inline Task<AgentOutcome> emptiness_program(AgentContext& ctx, std::set<int> B) {
  AgentOutcome out;
  out.nonempty = co_await emptiness_test(ctx, B.count(ctx.id()) > 0);
  out.rounds = ctx.rounds();
  co_return out;
}

// Binary search over ID bits preferring 0: elects the smallest ID.
inline Task<bool> leader_common(AgentContext& ctx) {
  bool in_x = true;
  for (int i = 0; i < ctx.width(); ++i) {
    const bool in_y = in_x && !ctx.id_bit(i);
    if (co_await emptiness_test(ctx, in_y)) in_x = in_y;
  }
  co_return in_x;
}

// Simulation-free reference for leader_common.
inline int leader_common_reference(const std::vector<int>& ids) {
  return *std::min_element(ids.begin(), ids.end());
}

// All-right, or all-right with the leader going left; rotation indexes differ by 2.
inline Task<MoveResult> nmove_from_leader(AgentContext& ctx, bool leader) {
  const RotationClass c = co_await doubled_round(ctx, Direction::Right);
  if (is_nontrivial(c)) co_return MoveResult{Direction::Right, c, 0};
  co_return MoveResult{leader ? Direction::Left : Direction::Right, std::nullopt, 1};
}

// Odd n only: all right, then split by successive ID bits until something moves.
inline Task<MoveResult> nmove_odd(AgentContext& ctx) {
  RoundFeedback f = co_await ctx.round(Direction::Right);
  if (f.dist != 0) co_return MoveResult{Direction::Right, std::nullopt, 0};
  for (int i = 0; i < ctx.width(); ++i) {
    const Direction d = ctx.id_bit(i) ? Direction::Left : Direction::Right;
    RoundFeedback g = co_await ctx.round(d);
    if (g.dist != 0) co_return MoveResult{d, std::nullopt, static_cast<std::size_t>(i + 1)};
  }
  throw PreconditionFailed("no bit separates the IDs: n must be odd with at least two agents");
}

// Members of schedule set i go right in attempt i; each attempt is a doubled round.
inline Task<MoveResult> nmove_family(AgentContext& ctx, const SubsetFamily& schedule) {
  for (std::size_t i = 0; i < schedule.sets.size(); ++i) {
    const Direction d = schedule.contains(i, ctx.id()) ? Direction::Right : Direction::Left;
    const RotationClass c = co_await doubled_round(ctx, d);
    if (is_nontrivial(c)) co_return MoveResult{d, c, i};
  }
  throw Exhausted("schedule ended without a nontrivial move");
}

// Default oblivious schedule when parity is unknown or n is even.
inline SubsetFamily default_schedule(int cap_N) {
  const std::size_t length = static_cast<std::size_t>(std::max(64, 8 * cap_N));
  return random_family(cap_N, length, 0.5, 0x5eed5eedULL);
}

// Coordination from scratch: a nontrivial move, then agreement and a leader.
inline Task<MoveResult> coordinate_move(AgentContext& ctx) {
  if (ctx.n_is_odd() == true) co_return co_await nmove_odd(ctx);
  co_return co_await nmove_family(ctx, default_schedule(ctx.cap_N()));
}

}  // namespace ringsync::protocols
