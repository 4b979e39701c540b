#pragma once

// Neighbour discovery and bit-level communication in the perceptive model.
// Every primitive here is position-restoring: each informative round is
// followed by its reversal.

#include "ringsync/protocols/common.hpp"

#include <utility>

namespace ringsync::protocols {

// Per ID bit: pattern A (bit 1 goes right) and pattern B = reversed A, run as
// A, B, B, A. The first and third rounds start from the original positions.
// Then all-right, all-left, all-left, all-right. 4 * width + 4 rounds.
inline Task<NeighborInfo> neighbor_discovery(AgentContext& ctx) {
  if (ctx.model() != ModelKind::Perceptive) throw PreconditionFailed("neighbour discovery needs the perceptive model");
  std::optional<Rational> min_right, min_left;
  auto note = [&](Direction d, const RoundFeedback& f) {
    if (!f.coll) return;
    auto& m = d == Direction::Right ? min_right : min_left;
    if (!m || *f.coll < *m) m = f.coll;
  };
  for (int i = 0; i < ctx.width(); ++i) {
    const Direction a = ctx.id_bit(i) ? Direction::Right : Direction::Left;
    const Direction b = opposite(a);
    note(a, co_await ctx.round(a));
    co_await ctx.round(b);
    note(b, co_await ctx.round(b));
    co_await ctx.round(a);
  }
  RoundFeedback all_right = co_await ctx.round(Direction::Right);
  note(Direction::Right, all_right);
  co_await ctx.round(Direction::Left);
  RoundFeedback all_left = co_await ctx.round(Direction::Left);
  note(Direction::Left, all_left);
  co_await ctx.round(Direction::Right);
  if (!min_right || !min_left) throw std::logic_error("a neighbour never approached head-on");

  NeighborInfo nb;
  nb.right_gap = 2 * *min_right;
  nb.left_gap = 2 * *min_left;
  // Head-on in a round where everybody goes its own right: opposite senses.
  nb.right_same = !(all_right.coll && *all_right.coll == *min_right);
  nb.left_same = !(all_left.coll && *all_left.coll == *min_left);
  co_return nb;
}

inline Task<AgentOutcome> neighbor_discovery_program(AgentContext& ctx) {
  AgentOutcome out;
  out.neighbors = co_await neighbor_discovery(ctx);
  out.rounds = ctx.rounds();
  co_return out;
}

struct NeighborBits {
  bool from_left = false;
  bool from_right = false;
};

// One bit to both neighbours in 4 rounds: bit-keyed direction, reversal,
// opposite direction, reversal. A neighbour's bit is read from the round in
// which this agent moved towards it: the round is clear (collision at the
// midpoint) iff the neighbour came the other way.
inline Task<NeighborBits> exchange_bit(AgentContext& ctx, const NeighborInfo& nb, bool bit) {
  const Direction d1 = bit ? Direction::Right : Direction::Left;
  const Direction d3 = opposite(d1);
  RoundFeedback f1 = co_await ctx.round(d1);
  co_await ctx.round(d3);
  RoundFeedback f3 = co_await ctx.round(d3);
  co_await ctx.round(d1);

  // Neighbour's own direction in round 1 or 3 when it sends v.
  auto sent = [](bool first_round, bool v) {
    const bool right = first_round ? v : !v;
    return right ? Direction::Right : Direction::Left;
  };
  auto decode = [&](bool first_round, const RoundFeedback& f, const Rational& gap, bool same, Direction toward_me) {
    const bool clear = f.coll && *f.coll * 2 == gap;
    for (bool v : {false, true}) {
      Direction seen = sent(first_round, v);
      if (!same) seen = opposite(seen);
      if ((seen == toward_me) == clear) return v;
    }
    return false;  // unreachable: the two candidates predict opposite outcomes
  };
  const bool right_in_first = d1 == Direction::Right;
  NeighborBits out;
  out.from_right = decode(right_in_first, right_in_first ? f1 : f3, nb.right_gap, nb.right_same, Direction::Left);
  out.from_left = decode(!right_in_first, right_in_first ? f3 : f1, nb.left_gap, nb.left_same, Direction::Right);
  co_return out;
}

// Separate streams per direction: two exchanges (8 rounds). `to_right` travels
// towards the logical right. Returns what arrives on the rightward stream from
// the left neighbour and on the leftward stream from the right neighbour.
inline Task<NeighborBits> channel_step(AgentContext& ctx, const NeighborInfo& nb, bool to_right, bool to_left) {
  NeighborBits a = co_await exchange_bit(ctx, nb, to_right);
  NeighborBits b = co_await exchange_bit(ctx, nb, to_left);
  NeighborBits out;
  out.from_left = nb.left_same ? a.from_left : b.from_left;
  out.from_right = nb.right_same ? b.from_right : a.from_right;
  co_return out;
}

using Message = std::vector<bool>;
using Received = std::map<int, Message>;  // offset: -t from t places left, +t from t places right

// Every agent sends its p-bit message to all agents within distance d:
// hop h forwards what arrived in hop h-1. 8 * p * d rounds.
inline Task<Received> disseminate(AgentContext& ctx, const NeighborInfo& nb, Message msg, int d) {
  Received got;
  Message rightward = msg, leftward = msg;
  const std::size_t p = msg.size();
  for (int h = 1; h <= d; ++h) {
    Message from_left(p), from_right(p);
    for (std::size_t b = 0; b < p; ++b) {
      NeighborBits r = co_await channel_step(ctx, nb, rightward[b], leftward[b]);
      from_left[b] = r.from_left;
      from_right[b] = r.from_right;
    }
    got[-h] = from_left;
    got[h] = from_right;
    rightward = from_left;
    leftward = from_right;
  }
  co_return got;
}

// Marked agents send p bits to distance d. Framing: a 1 marks the start, the p
// payload bits follow, idle streams carry 0. Unmarked agents relay the first
// message on each stream; marked agents never relay. 8 * (p + d) rounds.
inline Task<Received> disseminate_sparse(AgentContext& ctx, const NeighborInfo& nb, std::optional<Message> msg,
                                         std::size_t p, int d) {
  const std::size_t steps = p + static_cast<std::size_t>(d);
  Message out_r(steps + 1, false), out_l(steps + 1, false);
  if (msg) {
    if (msg->size() != p) throw std::invalid_argument("message length differs from p");
    out_r[0] = out_l[0] = true;
    for (std::size_t j = 0; j < p; ++j) out_r[j + 1] = out_l[j + 1] = (*msg)[j];
  }
  struct Incoming {
    std::optional<std::size_t> start;
    Message bits;
  } in_l, in_r;
  for (std::size_t s = 0; s < steps; ++s) {
    NeighborBits r = co_await channel_step(ctx, nb, out_r[s], out_l[s]);
    auto take = [&](Incoming& in, bool bit, Message& relay) {
      if (!in.start) {
        if (!bit) return;
        in.start = s;
        if (!msg && s + 1 < static_cast<std::size_t>(d)) relay[s + 1] = true;
        return;
      }
      if (in.bits.size() < p) {
        in.bits.push_back(bit);
        if (!msg && *in.start + 1 < static_cast<std::size_t>(d)) relay[s + 1] = bit;
      }
    };
    take(in_l, r.from_left, out_r);
    take(in_r, r.from_right, out_l);
  }
  Received got;
  if (in_l.start && in_l.bits.size() == p) got[-static_cast<int>(*in_l.start + 1)] = in_l.bits;
  if (in_r.start && in_r.bits.size() == p) got[static_cast<int>(*in_r.start + 1)] = in_r.bits;
  co_return got;
}

// One stream for both directions (4 rounds per step): each agent relays the
// first message it hears, on both sides, and keeps only that one. Suited to
// a single sender, or to receivers that need only the nearest sender.
struct FloodResult {
  int offset = 0;  // negative: the sender is to the left
  Message bits;
};

inline Task<std::optional<FloodResult>> disseminate_flood(AgentContext& ctx, const NeighborInfo& nb,
                                                          std::optional<Message> msg, std::size_t p, int d) {
  const std::size_t steps = p + static_cast<std::size_t>(d);
  Message out(steps + 1, false);
  if (msg) {
    if (msg->size() != p) throw std::invalid_argument("message length differs from p");
    out[0] = true;
    for (std::size_t j = 0; j < p; ++j) out[j + 1] = (*msg)[j];
  }
  std::optional<std::size_t> start;
  bool from_left = true;
  Message bits;
  for (std::size_t s = 0; s < steps; ++s) {
    NeighborBits r = co_await exchange_bit(ctx, nb, out[s]);
    if (msg) continue;
    if (!start) {
      if (r.from_left || r.from_right) {
        start = s;
        from_left = r.from_left;
        if (s + 1 < static_cast<std::size_t>(d)) out[s + 1] = true;
      }
      continue;
    }
    if (bits.size() < p) {
      const bool bit = from_left ? r.from_left : r.from_right;
      bits.push_back(bit);
      if (*start + 1 < static_cast<std::size_t>(d)) out[s + 1] = bit;
    }
  }
  if (!start || bits.size() != p) co_return std::nullopt;
  const int t = static_cast<int>(*start + 1);
  co_return FloodResult{from_left ? -t : t, bits};
}

inline Message to_bits(std::uint64_t value, int width) {
  Message m(static_cast<std::size_t>(width));
  for (int i = 0; i < width; ++i) m[static_cast<std::size_t>(i)] = (value >> (width - 1 - i)) & 1;
  return m;
}

inline std::uint64_t from_bits(const Message& m) {
  std::uint64_t v = 0;
  for (bool b : m) v = (v << 1) | (b ? 1 : 0);
  return v;
}

}  // namespace ringsync::protocols
