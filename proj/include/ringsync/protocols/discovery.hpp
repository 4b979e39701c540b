#pragma once

// Location discovery: the sweep protocol for the lazy model and odd n, and the
// perceptive pipeline (nontrivial move with local leaders, ring distances,
// convolution rounds).

#include "ringsync/protocols/communication.hpp"
#include "ringsync/protocols/coordination.hpp"

#include <functional>

namespace ringsync::protocols {

// ---------------------------------------------------------------------------
// Linear systems over gap sums

// sum of x[s] over `slots` equals `rhs`; slots are 0-based, mod n.
struct GapEquation {
  std::vector<std::size_t> slots;
  Rational rhs;
};

// Solves for n gaps with the implicit equation sum(x) = 1. Single-unknown
// equations are peeled first; anything left goes through exact elimination.
// Returns nullopt when the system does not determine every gap.
inline std::optional<std::vector<Rational>> solve_gaps(std::size_t n, std::vector<GapEquation> eqs) {
  GapEquation total;
  for (std::size_t s = 0; s < n; ++s) total.slots.push_back(s);
  total.rhs = 1;
  eqs.push_back(std::move(total));

  std::vector<std::optional<Rational>> x(n);
  std::vector<bool> used(eqs.size(), false);
  for (bool progress = true; progress;) {
    progress = false;
    for (std::size_t e = 0; e < eqs.size(); ++e) {
      if (used[e]) continue;
      std::optional<std::size_t> unknown;
      std::size_t count = 0;
      Rational rest = eqs[e].rhs;
      for (std::size_t s : eqs[e].slots) {
        if (x[s]) rest -= *x[s];
        else if (!unknown || *unknown != s) {
          unknown = s;
          ++count;
        }
      }
      if (count == 0) {
        used[e] = true;
        continue;
      }
      if (count == 1) {
        std::size_t mult = 0;
        for (std::size_t s : eqs[e].slots) mult += s == *unknown;
        x[*unknown] = rest / static_cast<long long>(mult);
        used[e] = true;
        progress = true;
      }
    }
  }

  std::vector<std::size_t> cols;
  std::vector<long long> col_of(n, -1);
  for (std::size_t s = 0; s < n; ++s)
    if (!x[s]) {
      col_of[s] = static_cast<long long>(cols.size());
      cols.push_back(s);
    }
  if (!cols.empty()) {
    const std::size_t u = cols.size();
    std::vector<std::vector<Rational>> rows;
    for (std::size_t e = 0; e < eqs.size(); ++e) {
      if (used[e]) continue;
      std::vector<Rational> row(u + 1);
      row[u] = eqs[e].rhs;
      for (std::size_t s : eqs[e].slots) {
        if (x[s]) row[u] -= *x[s];
        else row[static_cast<std::size_t>(col_of[s])] += 1;
      }
      rows.push_back(std::move(row));
    }
    std::size_t rank = 0;
    for (std::size_t c = 0; c < u && rank < rows.size(); ++c) {
      std::size_t piv = rank;
      while (piv < rows.size() && rows[piv][c] == 0) ++piv;
      if (piv == rows.size()) return std::nullopt;
      std::swap(rows[rank], rows[piv]);
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (r == rank || rows[r][c] == 0) continue;
        const Rational f = rows[r][c] / rows[rank][c];
        for (std::size_t k = c; k <= u; ++k) rows[r][k] -= f * rows[rank][k];
      }
      ++rank;
    }
    if (rank < u) return std::nullopt;
    for (std::size_t c = 0; c < u; ++c) x[cols[c]] = rows[c][u] / rows[c][c];
  }
  std::vector<Rational> out(n);
  for (std::size_t s = 0; s < n; ++s) out[s] = *x[s];
  return out;
}

// ---------------------------------------------------------------------------
// Sweep discovery (lazy model, or odd n)

// Leader and common sense from scratch.
inline Task<bool> coordinate(AgentContext& ctx) {
  MoveResult m = co_await coordinate_move(ctx);
  bool flipped;
  if (m.observed) {
    flipped = *m.observed == RotationClass::MoreThanHalf;
    if (flipped) ctx.flip_sense();
  } else {
    flipped = co_await dir_agreement(ctx, m.move);
  }
  const Direction now = flipped ? opposite(m.move) : m.move;
  co_return co_await leader_from_set(ctx, now == Direction::Right);
}

// Lazy: the leader walks right while the rest idle, so everybody steps one
// place per round. Otherwise (odd n) the leader goes right and the rest left,
// two places per round. Ends back at the starting point; returns the logical
// gaps from there.
inline Task<std::vector<Rational>> sweep_gaps(AgentContext& ctx, bool leader) {
  if (ctx.model() == ModelKind::Lazy) {
    std::vector<Rational> gaps;
    Rational total = 0;
    while (total != 1) {
      RoundFeedback f = co_await ctx.round(leader ? Direction::Right : Direction::Idle);
      gaps.push_back(f.dist);
      total += f.dist;
    }
    co_return gaps;
  }
  std::vector<Rational> y;  // y[t] = x[2t] + x[2t+1]
  Rational total = 0;
  while (total != 2) {
    RoundFeedback f = co_await ctx.round(leader ? Direction::Right : Direction::Left);
    y.push_back(f.dist);
    total += f.dist;
  }
  const std::size_t n = y.size();
  std::vector<Rational> pair(n);  // pair[s] = x[s] + x[s+1]
  for (std::size_t t = 0; t < n; ++t) pair[(2 * t) % n] = y[t];
  std::vector<Rational> x(n);
  Rational alt = 0;
  for (std::size_t s = 0; s < n; ++s) alt += s % 2 ? -pair[s] : pair[s];
  x[0] = alt / 2;
  for (std::size_t s = 0; s + 1 < n; ++s) x[s + 1] = pair[s] - x[s];
  co_return x;
}

inline void require_sweepable(const AgentContext& ctx) {
  if (ctx.model() == ModelKind::Lazy) return;
  if (ctx.n_is_odd() != true) {
    if (ctx.model() == ModelKind::Basic)
      throw PreconditionFailed("model impossibility: location discovery in the basic model needs odd n");
    throw PreconditionFailed("the sweep needs odd n outside the lazy model");
  }
}

inline Task<AgentOutcome> ld_simple(AgentContext& ctx) {
  require_sweepable(ctx);
  AgentOutcome out;
  out.leader = co_await coordinate(ctx);
  out.flipped = ctx.sense_flipped();
  std::vector<Rational> logical = co_await sweep_gaps(ctx, *out.leader);
  out.recovered_gaps = to_initial_own_frame(ctx, logical);
  out.rounds = ctx.rounds();
  co_return out;
}

// ---------------------------------------------------------------------------
// Nontrivial move with local leaders (perceptive)

// Sets tried at each level: everybody, the ID bit sets and their complements,
// then random sets of decreasing density.
inline SubsetFamily level_family(int cap_N, int level) {
  SubsetFamily f{cap_N, {}};
  std::vector<int> all(static_cast<std::size_t>(cap_N));
  for (int x = 1; x <= cap_N; ++x) all[static_cast<std::size_t>(x - 1)] = x;
  f.sets.push_back(std::move(all));
  for (auto& s : bitmask_family(cap_N).sets) f.sets.push_back(std::move(s));
  for (auto& s : layered_random_family(cap_N, 2 << level, 3, 0x5e1ec7ULL + static_cast<std::uint64_t>(level)).sets)
    f.sets.push_back(std::move(s));
  return f;
}

// Everybody goes right except candidates in the current set. Candidates start
// as local ID maxima among neighbours; at level k they compare IDs with the
// nearest candidates within distance 2^k. Every round restores positions
// except the successful doubled round. Levels below `first_level` only thin
// out the candidates.
inline Task<MoveResult> nmove_levels(AgentContext& ctx, const NeighborInfo& nb, int first_level = 0) {
  const int w = ctx.width();
  const std::uint64_t me = static_cast<std::uint64_t>(ctx.id() - 1);
  std::uint64_t left = 0, right = 0;
  for (int b = 0; b < w; ++b) {
    NeighborBits r = co_await exchange_bit(ctx, nb, ctx.id_bit(b));
    left = (left << 1) | r.from_left;
    right = (right << 1) | r.from_right;
  }
  bool candidate = me > left && me > right;
  for (int level = 0; (1LL << level) <= 2LL * ctx.cap_N(); ++level) {
    if (level > 0) {
      std::optional<Message> msg;
      if (candidate) msg = to_bits(me, w);
      Received got = co_await disseminate_sparse(ctx, nb, msg, static_cast<std::size_t>(w), 1 << level);
      if (candidate)
        for (auto& [offset, bits] : got)
          if (from_bits(bits) > me) candidate = false;
    }
    if (level < first_level) continue;
    const SubsetFamily family = level_family(ctx.cap_N(), level);
    for (std::size_t i = 0; i < family.size(); ++i) {
      const Direction d = candidate && family.contains(i, ctx.id()) ? Direction::Left : Direction::Right;
      const RotationClass c = co_await doubled_round(ctx, d);
      if (is_nontrivial(c)) co_return MoveResult{d, c, i, level};
    }
  }
  throw Exhausted("no level produced a nontrivial move");
}

inline Task<MoveResult> nmove_selective(AgentContext& ctx) {
  if (ctx.model() != ModelKind::Perceptive) throw PreconditionFailed("the selective protocol needs the perceptive model");
  const RotationClass c = co_await doubled_round(ctx, Direction::Right);
  if (is_nontrivial(c)) co_return MoveResult{Direction::Right, c, 0, -1};
  NeighborInfo nb = co_await neighbor_discovery(ctx);
  co_return co_await nmove_levels(ctx, nb);
}

inline Task<AgentOutcome> nmove_selective_program(AgentContext& ctx) {
  AgentOutcome out;
  out.move = co_await nmove_selective(ctx);
  out.rounds = ctx.rounds();
  co_return out;
}

// ---------------------------------------------------------------------------
// Ring distances (perceptive, common sense, leader known)

struct RingDistResult {
  std::size_t label = 0;  // 1 = leader
  std::size_t n = 0;
  std::size_t shift = 0;  // logical places every agent moved since the start
};

// Shift(l): a_1..a_l go right, everybody else left; Shift(-l) is the reverse.
// Iteration k = 2^i labels a_{k+jk} for j <= k: such an agent sees
// 2 * coll(Shift(k)) equal to the sum of its first j leftward steps under
// Shift(-k/2). Marked agents spread their label to distance k. The loop ends
// when a_n (the leader's left neighbour) knows its label, after which a_n
// announces n - 1 bit by bit.
inline Task<RingDistResult> ring_dist(AgentContext& ctx, const NeighborInfo& nb, bool leader) {
  std::optional<std::size_t> label;
  std::optional<std::size_t> from_end;  // 0 for a_n
  if (leader) label = 1;
  {
    std::optional<Message> msg;
    if (leader) msg = Message{};
    auto heard = co_await disseminate_flood(ctx, nb, msg, 0, 4);
    if (heard) {
      const std::size_t t = static_cast<std::size_t>(std::abs(heard->offset));
      if (heard->offset < 0) label = 1 + t;
      else from_end = t - 1;
    }
  }
  const bool last = from_end == 0;
  const auto in_block = [&](std::size_t l) { return label && *label <= l; };

  for (int i = 1;; ++i) {
    const std::size_t k = std::size_t{1} << i;
    if (k > 4 * static_cast<std::size_t>(ctx.cap_N())) throw std::logic_error("ring distances never completed");
    const Direction back = in_block(k / 2) ? Direction::Left : Direction::Right;  // Shift(-k/2)
    std::vector<Rational> y;
    for (std::size_t j = 0; j < k; ++j) y.push_back(mod_one(-(co_await ctx.round(back)).dist));
    for (std::size_t j = 0; j < k; ++j) co_await ctx.round(opposite(back));
    const Direction fwd = in_block(k) ? Direction::Right : Direction::Left;  // Shift(k)
    const std::optional<Rational> z = (co_await ctx.round(fwd)).coll;
    co_await ctx.round(opposite(fwd));

    std::optional<std::size_t> mark;
    if (!in_block(k) && z) {
      Rational acc = 0;
      for (std::size_t j = 1; j <= k && !mark; ++j) {
        acc += y[j - 1];
        if (acc == 2 * *z) mark = j;
      }
    }
    if (mark) label = k + *mark * k;
    std::optional<Message> msg;
    if (mark) msg = to_bits(*mark - 1, i);
    auto heard = co_await disseminate_flood(ctx, nb, msg, static_cast<std::size_t>(i), static_cast<int>(k));
    if (!label && heard) {
      const std::size_t from = k + (static_cast<std::size_t>(from_bits(heard->bits)) + 1) * k;
      const std::size_t t = static_cast<std::size_t>(std::abs(heard->offset));
      if (heard->offset < 0) label = from + t;
      else if (from > t) label = from - t;
    }

    // Completeness: rotation 2 iff a_n knows its label, else 0.
    const RoundFeedback check = co_await ctx.round(last && label ? Direction::Right : Direction::Left);
    if (check.dist != 0) break;
  }

  RingDistResult out;
  out.shift = 2;
  const int w = ctx.width();
  std::size_t n_minus_1 = 0;
  for (int b = 0; b < w; ++b) {
    const bool bit = last && (((*label - 1) >> (w - 1 - b)) & 1);
    const RoundFeedback f = co_await ctx.round(bit ? Direction::Right : Direction::Left);
    const bool seen = f.dist != 0;
    n_minus_1 = (n_minus_1 << 1) | (seen ? 1 : 0);
    if (seen) out.shift += 2;
  }
  out.n = n_minus_1 + 1;
  if (!label && from_end) label = out.n - *from_end;
  if (!label) throw std::logic_error("agent finished without a ring distance");
  out.label = *label;
  out.shift %= out.n;
  co_return out;
}

// ---------------------------------------------------------------------------
// Gap recovery for even n from labels (perceptive, common sense)

// Records what one round tells an agent about the gaps. Agent with label m
// (1-based) sits at slot (m - 1 + shift) mod n; x[s] is the gap from slot s to s+1.
inline void add_round_equations(std::vector<GapEquation>& eqs, std::size_t n, std::size_t shift, std::size_t label,
                                const std::function<Direction(std::size_t)>& dir, const RoundFeedback& f) {
  long long balance = 0;
  for (std::size_t m = 1; m <= n; ++m) balance += dir(m) == Direction::Right ? 1 : -1;
  const long long nn = static_cast<long long>(n);
  const std::size_t r = static_cast<std::size_t>(((balance % nn) + nn) % nn);
  const std::size_t slot = (label - 1 + shift) % n;
  if (r != 0) {
    GapEquation e{{}, f.dist};
    for (std::size_t t = 0; t < r; ++t) e.slots.push_back((slot + t) % n);
    eqs.push_back(std::move(e));
  }
  if (!f.coll) return;
  const Direction d = dir(label);
  GapEquation e{{}, 2 * *f.coll};
  std::size_t m = label, s = slot;
  for (std::size_t step = 1; step < n; ++step) {
    if (d == Direction::Right) {
      e.slots.push_back(s);
      m = m % n + 1;
      s = (s + 1) % n;
    } else {
      m = m == 1 ? n : m - 1;
      s = (s + n - 1) % n;
      e.slots.push_back(s);
    }
    if (dir(m) != d) {
      eqs.push_back(std::move(e));
      return;
    }
  }
}

// n/2 Convolution rounds (odd labels right, even left, a_{2j} right as the
// exception; rotation 2), then Pivot(n), Pivot(n-1), Pivot(n-2): the n/2
// agents up to a_j go right and the n/2 after it go left (rotation 0).
// Returns the logical gaps from the current position.
inline Task<std::vector<Rational>> distances(AgentContext& ctx, std::size_t label, std::size_t n, std::size_t shift) {
  if (n % 2 != 0 || n < 4) throw PreconditionFailed("convolution rounds need even n");
  std::vector<GapEquation> eqs;
  auto play = [&](std::function<Direction(std::size_t)> dir) -> Task<void> {
    const RoundFeedback f = co_await ctx.round(dir(label));
    add_round_equations(eqs, n, shift, label, dir, f);
  };
  const std::size_t half = n / 2;
  for (std::size_t i = 1; i <= half; ++i) {
    const std::size_t j = half - (i - 1);
    co_await play([j](std::size_t m) { return m % 2 == 1 || m == 2 * j ? Direction::Right : Direction::Left; });
    shift = (shift + 2) % n;
  }
  for (std::size_t p : {n, n - 1, n - 2}) {
    co_await play([p, n, half](std::size_t m) {
      const std::size_t after = (m + n - p - 1) % n;  // 0 for a_{p+1}
      return after < half ? Direction::Left : Direction::Right;
    });
  }
  auto x = solve_gaps(n, eqs);
  if (!x) throw std::logic_error("gap equations are underdetermined");
  const std::size_t slot = (label - 1 + shift) % n;
  std::vector<Rational> logical(n);
  for (std::size_t k = 0; k < n; ++k) logical[k] = (*x)[(slot + k) % n];
  co_return logical;
}

// ---------------------------------------------------------------------------
// Programs

// Labels with a leader and a sense fixed beforehand.
inline Task<AgentOutcome> ring_dist_program(AgentContext& ctx, bool leader) {
  AgentOutcome out;
  NeighborInfo nb = co_await neighbor_discovery(ctx);
  RingDistResult rd = co_await ring_dist(ctx, nb, leader);
  out.leader = leader;
  out.label = rd.label;
  out.rounds = ctx.rounds();
  co_return out;
}

// Full discovery in the perceptive model from scratch.
inline Task<AgentOutcome> ld_perceptive(AgentContext& ctx) {
  if (ctx.model() != ModelKind::Perceptive) throw PreconditionFailed("this pipeline needs the perceptive model");
  AgentOutcome out;
  const RoundFeedback f1 = co_await ctx.round(Direction::Right);
  const RoundFeedback f2 = co_await ctx.round(Direction::Right);
  const RotationClass probe = classify_rotation(f1, f2);
  bool leader = false;
  std::optional<NeighborInfo> nb;

  if (!f1.coll) {
    // Nobody collided: everybody already shares a sense.
    leader = co_await leader_common(ctx);
  } else if (is_nontrivial(probe)) {
    if (probe == RotationClass::MoreThanHalf) ctx.flip_sense();
    leader = co_await leader_from_set(ctx, !ctx.sense_flipped());
  } else {
    NeighborInfo seen = co_await neighbor_discovery(ctx);
    MoveResult m = co_await nmove_levels(ctx, seen);
    if (*m.observed == RotationClass::MoreThanHalf) ctx.flip_sense();
    co_await undo_since(ctx, ctx.rounds() - 2);
    if (ctx.sense_flipped()) seen = seen.mirrored();
    seen.left_same = seen.right_same = true;
    const Direction now = ctx.sense_flipped() ? opposite(m.move) : m.move;
    const std::size_t mark = ctx.rounds();
    leader = co_await leader_from_set(ctx, now == Direction::Right);
    co_await undo_since(ctx, mark);
    nb = seen;
  }
  out.leader = leader;
  out.flipped = ctx.sense_flipped();

  if (ctx.n_is_odd() == true) {
    out.recovered_gaps = to_initial_own_frame(ctx, co_await sweep_gaps(ctx, leader));
  } else {
    if (!nb) nb = co_await neighbor_discovery(ctx);
    RingDistResult rd = co_await ring_dist(ctx, *nb, leader);
    out.label = rd.label;
    out.recovered_gaps = to_initial_own_frame(ctx, co_await distances(ctx, rd.label, rd.n, rd.shift));
  }
  out.rounds = ctx.rounds();
  co_return out;
}

}  // namespace ringsync::protocols
