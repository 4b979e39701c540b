#include "ringsync/generate.hpp"
#include "ringsync/protocols/discovery.hpp"

#include <gtest/gtest.h>

using namespace ringsync;
using namespace ringsync::protocols;

namespace {

// Gaps in agent i's own sense, starting from its initial position.
std::vector<Rational> own_gaps(const RingConfig& c, std::size_t i) {
  const std::size_t n = c.size();
  std::vector<Rational> g(n);
  for (std::size_t k = 0; k < n; ++k) g[k] = c.chirality[i] > 0 ? c.gaps[(i + k) % n] : c.gaps[(i + 2 * n - k - 1) % n];
  return g;
}

void expect_recovered(const RingConfig& c, const RunResult<AgentOutcome>& res) {
  for (std::size_t i = 0; i < c.size(); ++i) {
    ASSERT_TRUE(res.outcomes[i].recovered_gaps.has_value()) << "agent " << i;
    EXPECT_EQ(*res.outcomes[i].recovered_gaps, own_gaps(c, i)) << "agent " << i;
  }
}

std::size_t leader_index(const RunResult<AgentOutcome>& res) {
  std::size_t count = 0, at = 0;
  for (std::size_t i = 0; i < res.outcomes.size(); ++i)
    if (res.outcomes[i].leader.value_or(false)) {
      ++count;
      at = i;
    }
  EXPECT_EQ(count, 1u);
  return at;
}

// Right ring distance + 1 from the leader in the common sense.
void expect_labels(const RingConfig& c, const RunResult<AgentOutcome>& res) {
  const std::size_t n = c.size();
  const std::size_t L = leader_index(res);
  const int sense = c.chirality[L] * (res.final_flipped[L] ? -1 : 1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t want = sense > 0 ? (i + n - L) % n + 1 : (L + n - i) % n + 1;
    ASSERT_TRUE(res.outcomes[i].label.has_value());
    EXPECT_EQ(*res.outcomes[i].label, want) << "agent " << i;
  }
}

RingConfig make(std::vector<Rational> gaps, std::vector<int> ids, std::vector<int> chir, int cap_N) {
  RingConfig c;
  c.gaps = std::move(gaps);
  c.ids = std::move(ids);
  c.chirality = std::move(chir);
  c.cap_N = cap_N;
  c.parity_known = true;
  c.validate();
  return c;
}

}  // namespace

TEST(SolveGaps, PeelsAndEliminates) {
  // x0+x1 = 1/2, x1+x2 = 1/2, x2 = 1/4 (plus the sum) on n = 4.
  std::vector<GapEquation> eqs{{{0, 1}, Rational(1, 2)}, {{1, 2}, Rational(1, 2)}, {{2}, Rational(1, 4)}};
  auto x = solve_gaps(4, eqs);
  ASSERT_TRUE(x);
  EXPECT_EQ(*x, (std::vector<Rational>{Rational(1, 4), Rational(1, 4), Rational(1, 4), Rational(1, 4)}));
  // Pair sums alone on an odd cycle need elimination.
  std::vector<GapEquation> odd{{{0, 1}, Rational(3, 10)}, {{1, 2}, Rational(1, 2)}};
  auto y = solve_gaps(3, odd);
  ASSERT_TRUE(y);
  EXPECT_EQ(*y, (std::vector<Rational>{Rational(1, 2), Rational(-1, 5), Rational(7, 10)}));
  EXPECT_FALSE(solve_gaps(4, {{{0, 1}, Rational(1, 2)}}));
}

TEST(LocationDiscoverySimple, LazyUniformFive) {
  auto c = make(std::vector<Rational>(5, Rational(1, 5)), {3, 9, 4, 12, 7}, {1, 1, 1, 1, 1}, 16);
  auto res = run_agents<AgentOutcome>(c, ModelKind::Lazy, ld_simple);
  expect_recovered(c, res);
  EXPECT_GE(res.rounds, 4u);
}

TEST(LocationDiscoverySimple, BasicOddFive) {
  auto c = make({Rational(1, 2), Rational(1, 8), Rational(1, 8), Rational(1, 8), Rational(1, 8)}, {1, 2, 3, 4, 5},
                {1, -1, 1, 1, -1}, 8);
  auto res = run_agents<AgentOutcome>(c, ModelKind::Basic, ld_simple);
  expect_recovered(c, res);
}

TEST(LocationDiscoverySimple, BasicEvenRejected) {
  gen::Rng rng(3);
  auto c = gen::random_config(6, 16, rng);
  try {
    run_agents<AgentOutcome>(c, ModelKind::Basic, ld_simple);
    FAIL() << "expected rejection";
  } catch (const PreconditionFailed& e) {
    EXPECT_NE(std::string(e.what()).find("model impossibility"), std::string::npos);
  }
}

TEST(LocationDiscoverySimple, RandomConfigs) {
  gen::Rng rng(77);
  for (ModelKind m : {ModelKind::Lazy, ModelKind::Basic, ModelKind::Perceptive})
    for (int trial = 0; trial < 12; ++trial) {
      std::size_t n = 5 + 2 * (rng() % 5);
      if (m == ModelKind::Lazy && trial % 2) ++n;
      auto c = gen::random_config(n, 4 * static_cast<int>(n), rng);
      auto res = run_agents<AgentOutcome>(c, m, ld_simple);
      expect_recovered(c, res);
      EXPECT_GE(res.rounds + 1, n);
    }
}

TEST(RingDist, LabelsWithPresetLeader) {
  gen::Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t n = 5 + rng() % 40;
    auto c = gen::random_config(n, 4 * static_cast<int>(n), rng);
    const int leader_id = c.ids[rng() % n];
    std::map<int, int> chir;
    for (std::size_t i = 0; i < n; ++i) chir[c.ids[i]] = c.chirality[i];
    auto res = run_agents<AgentOutcome>(c, ModelKind::Perceptive, [chir, leader_id](AgentContext& ctx) {
      if (chir.at(ctx.id()) < 0) ctx.flip_sense();
      return ring_dist_program(ctx, ctx.id() == leader_id);
    });
    expect_labels(c, res);
  }
}

TEST(RingDist, SixUniform) {
  auto c = make(std::vector<Rational>(6, Rational(1, 6)), {2, 5, 7, 1, 3, 8}, {1, 1, 1, 1, 1, 1}, 8);
  auto res = run_agents<AgentOutcome>(c, ModelKind::Perceptive,
                                      [](AgentContext& ctx) { return ring_dist_program(ctx, ctx.id() == 7); });
  expect_labels(c, res);
}

TEST(LocationDiscoveryPerceptive, RandomEven) {
  gen::Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t n = 6 + 2 * (rng() % 12);
    auto c = gen::random_config(n, 4 * static_cast<int>(n), rng);
    if (trial % 3 == 1) c.chirality = gen::half_split_chirality(n, rng);
    if (trial % 3 == 2) c.chirality.assign(n, trial % 2 ? 1 : -1);
    auto res = run_agents<AgentOutcome>(c, ModelKind::Perceptive, ld_perceptive);
    expect_recovered(c, res);
    expect_labels(c, res);
    EXPECT_GE(res.rounds, n / 2);
  }
}

TEST(LocationDiscoveryPerceptive, OddUsesSweep) {
  gen::Rng rng(12);
  for (int trial = 0; trial < 6; ++trial) {
    std::size_t n = 5 + 2 * (rng() % 5);
    auto c = gen::random_config(n, 4 * static_cast<int>(n), rng);
    auto res = run_agents<AgentOutcome>(c, ModelKind::Perceptive, ld_perceptive);
    expect_recovered(c, res);
  }
}

TEST(NMoveSelective, UniformChiralityNontrivial) {
  gen::Rng rng(19);
  for (std::size_t n : {8u, 16u, 32u})
    for (int trial = 0; trial < 8; ++trial) {
      auto c = gen::random_config(n, 4 * static_cast<int>(n), rng);
      c.chirality.assign(n, 1);
      auto res = run_agents<AgentOutcome>(c, ModelKind::Perceptive, nmove_selective_program);
      RoundSpec spec{{}, ModelKind::Perceptive};
      for (std::size_t i = 0; i < n; ++i) spec.directions.push_back(resolve(res.outcomes[i].move->move, c.chirality[i]));
      EXPECT_TRUE(is_nontrivial_rotation(rotation_index(spec, n), n));
      const double budget = 8 * std::sqrt(static_cast<double>(n)) * std::log2(4.0 * static_cast<double>(n));
      EXPECT_LE(static_cast<double>(res.rounds), budget) << "n=" << n << " level " << res.outcomes[0].move->level;
    }
}

TEST(NMoveSelective, MixedDetectedByProbe) {
  gen::Rng rng(20);
  auto c = gen::random_config(7, 28, rng);
  c.chirality = {1, 1, 1, 1, 1, 1, -1};
  auto res = run_agents<AgentOutcome>(c, ModelKind::Perceptive, nmove_selective_program);
  EXPECT_EQ(res.rounds, 2u);
  EXPECT_EQ(res.outcomes[0].move->level, -1);
}

namespace {
Task<AgentOutcome> from_level(AgentContext& ctx, int level) {
  AgentOutcome out;
  NeighborInfo nb = co_await neighbor_discovery(ctx);
  out.move = co_await nmove_levels(ctx, nb, level);
  co_return out;
}
}  // namespace

TEST(NMoveSelective, HigherLevelsThinCandidates) {
  gen::Rng rng(23);
  for (int level : {1, 2, 3})
    for (int trial = 0; trial < 5; ++trial) {
      const std::size_t n = 24;
      auto c = gen::random_config(n, 96, rng);
      c.chirality.assign(n, trial % 2 ? 1 : -1);
      auto res = run_agents<AgentOutcome>(c, ModelKind::Perceptive,
                                          [level](AgentContext& ctx) { return from_level(ctx, level); });
      RoundSpec spec{{}, ModelKind::Perceptive};
      std::size_t flipped = 0;
      for (std::size_t i = 0; i < n; ++i) {
        spec.directions.push_back(resolve(res.outcomes[i].move->move, c.chirality[i]));
        flipped += res.outcomes[i].move->move == Direction::Left;
      }
      EXPECT_EQ(res.outcomes[0].move->level, level);
      EXPECT_TRUE(is_nontrivial_rotation(rotation_index(spec, n), n));
      // Candidates at level k are pairwise more than 2^(k-1) apart.
      EXPECT_LE(flipped, n / ((std::size_t{1} << (level - 1)) + 1));
    }
}
