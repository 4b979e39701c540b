#pragma once

// Distinguishers and selective families over [N], with exhaustive verifiers.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ringsync {

struct SubsetFamily {
  int universe_N = 0;
  std::vector<std::vector<int>> sets;  // each sorted, elements in [1, N]

  bool contains(std::size_t i, int x) const { return std::binary_search(sets[i].begin(), sets[i].end(), x); }
  std::size_t size() const { return sets.size(); }

  void validate() const {
    for (const auto& s : sets) {
      if (!std::is_sorted(s.begin(), s.end()) || std::adjacent_find(s.begin(), s.end()) != s.end())
        throw std::invalid_argument("family sets must be sorted without repeats");
      for (int x : s)
        if (x < 1 || x > universe_N) throw std::invalid_argument("family element out of [1, N]");
    }
  }

  SubsetFamily prefix(std::size_t k) const {
    if (k > sets.size()) throw std::invalid_argument("prefix longer than the family");
    return {universe_N, std::vector<std::vector<int>>(sets.begin(), sets.begin() + static_cast<std::ptrdiff_t>(k))};
  }

  bool operator==(const SubsetFamily&) const = default;
};

struct VerificationReport {
  bool verdict = true;
  std::optional<std::pair<std::vector<int>, std::vector<int>>> witness;
  std::uint64_t pairs_checked = 0;
  std::optional<int> failing_n;  // strong distinguishers only
};

namespace comb_detail {

using Mask = std::uint64_t;

inline Mask to_mask(const std::vector<int>& s) {
  Mask m = 0;
  for (int x : s) m |= Mask{1} << (x - 1);
  return m;
}

inline std::vector<int> from_mask(Mask m) {
  std::vector<int> out;
  for (int x = 1; m; ++x, m >>= 1)
    if (m & 1) out.push_back(x);
  return out;
}

// All n-subsets of [N] as masks, in lexicographic order of their sorted elements.
inline std::vector<Mask> combinations(int N, int n) {
  std::vector<Mask> out;
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  if (n > N) return out;
  for (;;) {
    Mask m = 0;
    for (int i : idx) m |= Mask{1} << i;
    out.push_back(m);
    int i = n - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == N - n + i) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < n; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Lexicographic comparison of the sorted element lists of two masks.
inline bool lex_less(Mask a, Mask b) {
  while (a && b) {
    int x = std::countr_zero(a), y = std::countr_zero(b);
    if (x != y) return x < y;
    a &= a - 1;
    b &= b - 1;
  }
  return !a && b;
}

constexpr double kMaxSubsets = 4e7;

}  // namespace comb_detail

// Number of unordered pairs of disjoint n-subsets of [N].
inline double disjoint_pair_count(int N, int n) {
  return comb_detail::binomial(N, n) * comb_detail::binomial(N - n, n) / 2;
}

// Exhaustive: every unordered pair of disjoint n-subsets must be separated by
// the intersection sizes with some set. Subsets are grouped by their vector of
// intersection sizes, so only same-signature pairs are inspected one by one.
inline VerificationReport is_distinguisher(const SubsetFamily& family, int n) {
  using namespace comb_detail;
  const int N = family.universe_N;
  if (n < 1 || 2 * n > N) throw std::invalid_argument("need 1 <= n <= N/2 for disjoint pairs to exist");
  if (N > 64) throw std::invalid_argument("exhaustive verification supports N <= 64");
  if (binomial(N, n) > kMaxSubsets)
    throw std::length_error("exhaustive verification beyond desk scale: C(" + std::to_string(N) + "," +
                            std::to_string(n) + ") subsets");
  family.validate();
  std::vector<Mask> sets;
  for (const auto& s : family.sets) sets.push_back(to_mask(s));

  const auto subsets = combinations(N, n);
  std::unordered_map<std::string, std::vector<Mask>> groups;
  std::string sig(sets.size(), '\0');
  for (Mask x : subsets) {
    for (std::size_t i = 0; i < sets.size(); ++i) sig[i] = static_cast<char>(std::popcount(x & sets[i]));
    groups[sig].push_back(x);
  }

  VerificationReport rep;
  rep.pairs_checked = static_cast<std::uint64_t>(disjoint_pair_count(N, n));
  std::optional<std::pair<Mask, Mask>> best;
  for (const auto& [key, members] : groups)
    for (std::size_t i = 0; i < members.size(); ++i)
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        Mask a = members[i], b = members[j];
        if (a & b) continue;
        if (lex_less(b, a)) std::swap(a, b);
        if (!best || lex_less(a, best->first) || (a == best->first && lex_less(b, best->second))) best = {a, b};
      }
  if (best) {
    rep.verdict = false;
    rep.witness = std::make_pair(from_mask(best->first), from_mask(best->second));
  }
  return rep;
}

// The prefix of length budget(N, n) must be an (N, n)-distinguisher for every n <= N/2.
inline VerificationReport is_strong_distinguisher(const SubsetFamily& family,
                                                  const std::function<std::size_t(int, int)>& budget) {
  VerificationReport total;
  for (int n = 1; 2 * n <= family.universe_N; ++n) {
    const std::size_t len = budget(family.universe_N, n);
    if (len > family.size()) throw std::invalid_argument("budget exceeds family length at n = " + std::to_string(n));
    VerificationReport r = is_distinguisher(family.prefix(len), n);
    total.pairs_checked += r.pairs_checked;
    if (!r.verdict) {
      r.pairs_checked = total.pairs_checked;
      r.failing_n = n;
      return r;
    }
  }
  return total;
}

inline SubsetFamily random_family(int N, std::size_t length, double density, std::uint64_t seed) {
  if (!(density > 0 && density < 1)) throw std::invalid_argument("density must lie in (0, 1)");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(density);
  SubsetFamily f{N, {}};
  for (std::size_t i = 0; i < length; ++i) {
    std::vector<int> s;
    for (int x = 1; x <= N; ++x)
      if (coin(rng)) s.push_back(x);
    f.sets.push_back(std::move(s));
  }
  return f;
}

// Smallest k admitting an (N, n)-distinguisher of k sets. Search space: the
// empty set and [N] never separate anything; S and its complement separate the
// same pairs, so sets avoid N; relabelling elements makes the first set a prefix
// {1..m} with m <= N/2; the remaining sets form a strictly increasing sequence.
inline int min_distinguisher_size(int N, int n) {
  using namespace comb_detail;
  if (N > 8) throw std::invalid_argument("min_distinguisher_size is exhaustive; N <= 8 only");
  if (n < 1 || 2 * n > N) throw std::invalid_argument("need 1 <= n <= N/2");

  // Pairs to separate, and which pairs each candidate set separates.
  std::vector<std::pair<Mask, Mask>> pairs;
  const auto subsets = combinations(N, n);
  for (std::size_t i = 0; i < subsets.size(); ++i)
    for (std::size_t j = i + 1; j < subsets.size(); ++j)
      if (!(subsets[i] & subsets[j])) pairs.emplace_back(subsets[i], subsets[j]);
  const std::size_t words = (pairs.size() + 63) / 64;
  using Cover = std::vector<std::uint64_t>;
  const Mask limit = Mask{1} << (N - 1);
  std::vector<Cover> covers(limit, Cover(words, 0));
  for (Mask s = 1; s < limit; ++s)
    for (std::size_t p = 0; p < pairs.size(); ++p)
      if (std::popcount(pairs[p].first & s) != std::popcount(pairs[p].second & s))
        covers[s][p / 64] |= std::uint64_t{1} << (p % 64);
  Cover full(words, ~std::uint64_t{0});
  if (pairs.size() % 64) full.back() = (std::uint64_t{1} << (pairs.size() % 64)) - 1;

  std::function<bool(int, Mask, const Cover&)> extend = [&](int left, Mask from, const Cover& have) -> bool {
    if (have == full) return true;
    if (left == 0) return false;
    Cover next(words);
    for (Mask s = from; s < limit; ++s) {
      for (std::size_t w = 0; w < words; ++w) next[w] = have[w] | covers[s][w];
      if (extend(left - 1, s + 1, next)) return true;
    }
    return false;
  };
  for (int k = 1;; ++k)
    for (int m = 1; 2 * m <= N; ++m) {
      const Mask first = (Mask{1} << m) - 1;
      if (extend(k - 1, 1, covers[first])) return k;
    }
}

// Every nonempty Z with |Z| <= n must meet some set in exactly one element.
inline VerificationReport is_selective(const SubsetFamily& family, int n) {
  using namespace comb_detail;
  const int N = family.universe_N;
  if (n < 1 || n > N) throw std::invalid_argument("need 1 <= n <= N");
  if (N > 64) throw std::invalid_argument("exhaustive verification supports N <= 64");
  double total = 0;
  for (int j = 1; j <= n; ++j) total += binomial(N, j);
  if (total > 1e9) throw std::length_error("selectivity check beyond desk scale");
  family.validate();

  const std::size_t words = (family.size() + 63) / 64 + 1;
  using Bits = std::vector<std::uint64_t>;
  std::vector<Bits> column(static_cast<std::size_t>(N) + 1, Bits(words, 0));
  for (std::size_t i = 0; i < family.size(); ++i)
    for (int x : family.sets[i]) column[static_cast<std::size_t>(x)][i / 64] |= std::uint64_t{1} << (i % 64);

  VerificationReport rep;
  std::vector<Bits> ones(static_cast<std::size_t>(n) + 1, Bits(words, 0));
  std::vector<Bits> many(static_cast<std::size_t>(n) + 1, Bits(words, 0));
  std::vector<int> chosen;
  std::function<bool(int, int)> dfs = [&](int depth, int from) -> bool {
    for (int x = from; x <= N; ++x) {
      const Bits& col = column[static_cast<std::size_t>(x)];
      const Bits& o = ones[static_cast<std::size_t>(depth)];
      const Bits& m = many[static_cast<std::size_t>(depth)];
      Bits& o2 = ones[static_cast<std::size_t>(depth) + 1];
      Bits& m2 = many[static_cast<std::size_t>(depth) + 1];
      bool any = false;
      for (std::size_t w = 0; w < words; ++w) {
        m2[w] = m[w] | (o[w] & col[w]);
        o2[w] = (o[w] & ~col[w]) | (col[w] & ~o[w] & ~m[w]);
        any |= o2[w] != 0;
      }
      ++rep.pairs_checked;
      chosen.push_back(x);
      if (!any) {
        rep.verdict = false;
        rep.witness = std::make_pair(chosen, std::vector<int>{});
        return false;
      }
      if (depth + 1 < n && !dfs(depth + 1, x + 1)) return false;
      chosen.pop_back();
    }
    return true;
  };
  dfs(0, 1);
  return rep;
}

// Sets {x : bit t of x-1 is 1} and their complements, t over ceil(log2 N) bits.
inline SubsetFamily bitmask_family(int N) {
  int w = 0;
  while ((1LL << w) < N) ++w;
  SubsetFamily f{N, {}};
  if (w == 0) f.sets.push_back({1});
  for (int t = 0; t < w; ++t) {
    std::vector<int> on, off;
    for (int x = 1; x <= N; ++x) (((x - 1) >> t) & 1 ? on : off).push_back(x);
    f.sets.push_back(on);
    f.sets.push_back(off);
  }
  return f;
}

// Random sets at densities 2^-t, t = 0..ceil(log2 n), `per_level` sets each,
// interleaved across densities.
inline SubsetFamily layered_random_family(int N, int n, std::size_t per_level, std::uint64_t seed) {
  int levels = 0;
  while ((1 << levels) < n) ++levels;
  std::mt19937_64 rng(seed);
  SubsetFamily f{N, {}};
  for (std::size_t r = 0; r < per_level; ++r)
    for (int t = 0; t <= levels; ++t) {
      std::bernoulli_distribution coin(1.0 / static_cast<double>(1 << t));
      std::vector<int> s;
      for (int x = 1; x <= N; ++x)
        if (coin(rng)) s.push_back(x);
      f.sets.push_back(std::move(s));
    }
  return f;
}

struct SelectiveBuildError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Randomized (N, n)-selective family, re-drawn until the exhaustive check passes.
// A set Z of size k is isolated by a level-t draw (density 2^-t, 2^(t-1) < k <= 2^t)
// with probability at least 0.3, so per-level draws are sized by a union bound
// over all Z; every few failed attempts the family grows by half.
inline SubsetFamily build_selective(int N, int n, std::uint64_t seed, int max_attempts = 32) {
  if (n < 1 || n > N) throw std::invalid_argument("need 1 <= n <= N");
  if (n == 1) return bitmask_family(N);
  double sets = 0;
  for (int k = 1; k <= n; ++k) sets += comb_detail::binomial(N, k);
  double per_level = std::ceil((std::log(sets) + 3) / -std::log(0.7));
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    if (attempt > 0 && attempt % 4 == 0) per_level = std::ceil(per_level * 1.5);
    SubsetFamily f = layered_random_family(N, n, static_cast<std::size_t>(per_level),
                                           seed + static_cast<std::uint64_t>(attempt) * 0x9e3779b97f4a7c15ULL);
    if (is_selective(f, n).verdict) return f;
  }
  throw SelectiveBuildError("no selective family found after " + std::to_string(max_attempts) + " seeds");
}

// Oblivious schedule: direction of an agent depends on its ID and the round only.
using ObliviousSchedule = std::function<bool(int id, std::size_t round)>;  // true = right

struct Extraction {
  SubsetFamily family;
  VerificationReport report;  // (N, n/2)-distinguisher check of the family
};

inline Extraction extract_distinguisher(const ObliviousSchedule& goes_right, int N, int n, std::size_t rounds) {
  if (n % 2 != 0) throw std::invalid_argument("weak nontrivial move reduction needs even n");
  Extraction e{{N, {}}, {}};
  for (std::size_t r = 0; r < rounds; ++r) {
    std::vector<int> s;
    for (int x = 1; x <= N; ++x)
      if (goes_right(x, r)) s.push_back(x);
    e.family.sets.push_back(std::move(s));
  }
  e.report = is_distinguisher(e.family, n / 2);
  return e;
}

// Whether intersection sizes of some set differ by a nonzero amount modulo m,
// for every disjoint pair of h-subsets (m = h gives the weak-move condition).
inline VerificationReport is_distinguisher_mod(const SubsetFamily& family, int h, int m) {
  using namespace comb_detail;
  const int N = family.universe_N;
  if (binomial(N, h) > 2e5) throw std::length_error("beyond desk scale");
  std::vector<Mask> sets;
  for (const auto& s : family.sets) sets.push_back(to_mask(s));
  const auto subsets = combinations(N, h);
  VerificationReport rep;
  for (std::size_t i = 0; i < subsets.size(); ++i)
    for (std::size_t j = i + 1; j < subsets.size(); ++j) {
      if (subsets[i] & subsets[j]) continue;
      ++rep.pairs_checked;
      bool sep = false;
      for (Mask s : sets) {
        int d = std::popcount(subsets[i] & s) - std::popcount(subsets[j] & s);
        if (((d % m) + m) % m != 0) {
          sep = true;
          break;
        }
      }
      if (!sep) {
        rep.verdict = false;
        rep.witness = std::make_pair(from_mask(subsets[i]), from_mask(subsets[j]));
        return rep;
      }
    }
  return rep;
}

// Family file: "N=<int>", one comma-separated set per line, "-" for the empty
// set, a blank line at the end.
inline void write_family(std::ostream& os, const SubsetFamily& f) {
  os << "N=" << f.universe_N << "\n";
  for (const auto& s : f.sets) {
    if (s.empty()) os << "-";
    for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
    os << "\n";
  }
  os << "\n";
}

inline SubsetFamily read_family(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("N=", 0) != 0) throw std::invalid_argument("family file must start with N=<int>");
  SubsetFamily f;
  f.universe_N = std::stoi(line.substr(2));
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) break;
    std::vector<int> s;
    if (line != "-") {
      std::stringstream ss(line);
      std::string tok;
      while (std::getline(ss, tok, ',')) s.push_back(std::stoi(tok));
    }
    std::sort(s.begin(), s.end());
    f.sets.push_back(std::move(s));
  }
  f.validate();
  return f;
}

}  // namespace ringsync
