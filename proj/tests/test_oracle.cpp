#include "ringsync/generate.hpp"
#include "ringsync/oracle.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace ringsync;

namespace {

RingConfig make(std::vector<Rational> gaps) {
  RingConfig c;
  c.gaps = std::move(gaps);
  for (std::size_t i = 0; i < c.gaps.size(); ++i) c.ids.push_back(static_cast<int>(i + 1));
  c.cap_N = static_cast<int>(c.gaps.size());
  c.chirality.assign(c.gaps.size(), 1);
  return c;
}

RoundSpec spec_of(std::string_view dirs, ModelKind m) {
  RoundSpec s{{}, m};
  for (char ch : dirs)
    s.directions.push_back(ch == 'R' ? Direction::Right : ch == 'L' ? Direction::Left : Direction::Idle);
  return s;
}

}  // namespace

TEST(Oracle, TwoAgentsHeadOn) {
  auto c = make({make_rational(1, 2), make_rational(1, 2)});
  auto tr = oracle::simulate_continuous(c, spec_of("RL", ModelKind::Perceptive));
  // Swap at t = 1/4 on one arc, swap back at t = 3/4 on the other.
  ASSERT_EQ(tr.events.size(), 2u);
  EXPECT_EQ(tr.events[0].time, make_rational(1, 4));
  EXPECT_EQ(tr.events[0].position, make_rational(1, 4));
  EXPECT_EQ(tr.events[1].time, make_rational(3, 4));
  EXPECT_EQ(tr.events[1].position, make_rational(3, 4));
  EXPECT_EQ(tr.final_positions, c.positions());
  EXPECT_EQ(*oracle::first_collision_from_trace(tr, 0), make_rational(1, 4));
}

TEST(Oracle, AllClockwiseNoEvents) {
  auto c = make(gen::uniform_gaps(6));
  auto tr = oracle::simulate_continuous(c, spec_of("RRRRRR", ModelKind::Basic));
  EXPECT_TRUE(tr.events.empty());
  EXPECT_EQ(tr.final_positions, c.positions());
  for (auto& d : tr.displacement) EXPECT_EQ(d, 1);
  EXPECT_FALSE(oracle::first_collision_from_trace(tr, 3).has_value());
}

TEST(Oracle, ShiftByOnePlace) {
  auto c = make(gen::uniform_gaps(5));
  auto tr = oracle::simulate_continuous(c, spec_of("RRRLL", ModelKind::Basic));
  auto p = c.positions();
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(tr.final_positions[i], p[(i + 1) % 5]);
}

TEST(Oracle, LazyMoverStopsAtIdle) {
  auto c = make(gen::uniform_gaps(4));
  auto tr = oracle::simulate_continuous(c, spec_of("RIII", ModelKind::Lazy));
  auto p = c.positions();
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(tr.final_positions[i], p[(i + 1) % 4]);
  EXPECT_EQ(tr.events.size(), 3u);  // the last mover reaches the vacated origin at t = 1
}

TEST(Oracle, DumpFormat) {
  auto c = make({make_rational(1, 2), make_rational(1, 2)});
  auto tr = oracle::simulate_continuous(c, spec_of("RL", ModelKind::Basic));
  std::ostringstream os;
  oracle::dump(os, tr);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "t=1/4 pos=1/4 pair=0,1");
}

TEST(Oracle, RejectsInvalidConfig) {
  auto c = make({make_rational(1, 2), make_rational(1, 4)});
  EXPECT_THROW(oracle::simulate_continuous(c, spec_of("RL", ModelKind::Basic)), InvalidConfig);
}

// Chase chains: the collision sum includes the gap from the agent itself.
TEST(Oracle, ChaseChainMatchesProofIndexing) {
  gen::Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 4 + rng() % 6;
    std::size_t k = 1 + rng() % (n - 2);  // followers moving the same way
    auto c = make(gen::random_gaps(n, 20, rng));
    std::string d(n, 'L');
    for (std::size_t i = 0; i <= k; ++i) d[i] = 'R';
    auto s = spec_of(d, ModelKind::Perceptive);
    auto tr = oracle::simulate_continuous(c, s);
    EXPECT_EQ(*oracle::first_collision_from_trace(tr, 0), c.arc(0, k + 1) / 2);
    EXPECT_EQ(*first_collision_distance(c, s, 0), c.arc(0, k + 1) / 2);
  }
}

TEST(Oracle, MatchesClosedFormEngine) {
  gen::Rng rng(3);
  for (auto model : {ModelKind::Basic, ModelKind::Lazy, ModelKind::Perceptive})
    for (int trial = 0; trial < 300; ++trial) {
      std::size_t n = 2 + rng() % 11;
      auto c = gen::random_config(n, static_cast<int>(2 * n), rng);
      auto s = gen::random_spec(n, model, rng);
      auto res = execute_round(c, s);
      auto tr = oracle::simulate_continuous(c, s);
      ASSERT_EQ(tr.final_positions, res.final_positions);
      ASSERT_EQ(oracle::feedback_from_trace(c, tr, model), res.feedback);
    }
}

TEST(Oracle, ConservationProperties) {
  gen::Rng rng(5);
  for (auto model : {ModelKind::Basic, ModelKind::Lazy}) {
    for (int trial = 0; trial < 200; ++trial) {
      std::size_t n = 2 + rng() % 9;
      auto c = gen::random_config(n, static_cast<int>(2 * n), rng);
      auto s = gen::random_spec(n, model, rng);
      auto tr = oracle::simulate_continuous(c, s);
      Rational total = 0;
      for (auto& d : tr.displacement) total += d;
      long long nc = 0, na = 0;
      for (auto d : s.directions) nc += d == Direction::Right, na += d == Direction::Left;
      EXPECT_EQ(total, Rational(nc - na));
      for (std::size_t i = 1; i < tr.events.size(); ++i) EXPECT_LE(tr.events[i - 1].time, tr.events[i].time);
      for (std::size_t i = 0; i < tr.events.size(); ++i)
        for (std::size_t j = i + 1; j < tr.events.size() && tr.events[j].time == tr.events[i].time; ++j)
          EXPECT_NE(tr.events[i].participants, tr.events[j].participants);
      for (auto& e : tr.events) {
        auto [a, b] = e.participants;
        EXPECT_EQ(b, (a + 1) % n);
      }
    }
  }
}
