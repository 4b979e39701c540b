#pragma once

// Seeded generators for rings and rounds.

#include "ringsync/ring.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace ringsync::gen {

using Rng = std::mt19937_64;

inline std::vector<Rational> uniform_gaps(std::size_t n) {
  return std::vector<Rational>(n, make_rational(1, static_cast<long long>(n)));
}

// Positive integer weights in [1, max_weight], normalized to sum 1.
inline std::vector<Rational> random_gaps(std::size_t n, long long max_weight, Rng& rng) {
  if (max_weight < 1) throw std::invalid_argument("max_weight must be positive");
  std::uniform_int_distribution<long long> pick(1, max_weight);
  std::vector<long long> w(n);
  long long total = 0;
  for (auto& x : w) total += (x = pick(rng));
  std::vector<Rational> gaps(n);
  for (std::size_t i = 0; i < n; ++i) gaps[i] = make_rational(w[i], total);
  return gaps;
}

// n distinct IDs from [1, cap_N] in random ring order.
inline std::vector<int> random_ids(std::size_t n, int cap_N, Rng& rng) {
  if (static_cast<long long>(n) > cap_N) throw std::invalid_argument("n exceeds cap_N");
  std::vector<int> all(static_cast<std::size_t>(cap_N));
  std::iota(all.begin(), all.end(), 1);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(n);
  return all;
}

inline std::vector<int> random_chirality(std::size_t n, Rng& rng) {
  std::vector<int> c(n);
  for (auto& x : c) x = (rng() & 1) ? 1 : -1;
  return c;
}

// Exactly floor(n/2) agents flipped, at random places.
inline std::vector<int> half_split_chirality(std::size_t n, Rng& rng) {
  std::vector<int> c(n, 1);
  std::fill(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(n / 2), -1);
  std::shuffle(c.begin(), c.end(), rng);
  return c;
}

inline RingConfig random_config(std::size_t n, int cap_N, Rng& rng, long long max_weight = 16) {
  RingConfig c;
  c.gaps = random_gaps(n, max_weight, rng);
  c.ids = random_ids(n, cap_N, rng);
  c.cap_N = cap_N;
  c.chirality = random_chirality(n, rng);
  return c;
}

inline RoundSpec random_spec(std::size_t n, ModelKind model, Rng& rng) {
  RoundSpec s{{}, model};
  const unsigned kinds = model == ModelKind::Lazy ? 3 : 2;
  for (std::size_t i = 0; i < n; ++i) {
    unsigned k = static_cast<unsigned>(rng() % kinds);
    s.directions.push_back(k == 0 ? Direction::Right : k == 1 ? Direction::Left : Direction::Idle);
  }
  return s;
}

}  // namespace ringsync::gen
