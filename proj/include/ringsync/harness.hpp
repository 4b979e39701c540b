#pragma once

// Scenarios, ground-truth validation, sweeps and the oracle cross-check.

#include "ringsync/generate.hpp"
#include "ringsync/oracle.hpp"
#include "ringsync/protocols/discovery.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ostream>
#include <sstream>
#include <thread>
#include <variant>

namespace ringsync::harness {

using json = nlohmann::json;

inline const std::vector<std::string>& protocol_names() {
  static const std::vector<std::string> names{
      "dir-agreement", "leader-nmove",       "leader-common", "emptiness", "nmove-odd",     "nmove-family",
      "nmove-selective", "neighbor-discovery", "ring-dist",   "ld-simple", "ld-perceptive"};
  return names;
}

struct Scenario {
  ModelKind model = ModelKind::Perceptive;
  std::size_t n = 6;
  int cap_N = 24;
  std::variant<std::string, std::vector<int>> ids = std::string("random");
  std::variant<std::string, std::vector<int>> chirality = std::string("random");
  std::variant<std::string, std::vector<Rational>> gaps = std::string("random-rational(16)");
  std::string protocol = "ld-perceptive";
  std::uint64_t seed = 1;
  std::size_t max_rounds = 0;  // 0: runner default
  bool parity_known = true;
  std::vector<int> set;  // B for the emptiness protocol
};

struct RunRecord {
  std::string protocol;
  ModelKind model = ModelKind::Perceptive;
  std::size_t n = 0;
  int cap_N = 0;
  std::uint64_t seed = 0;
  std::size_t rounds = 0;
  bool success = false;
  std::string detail;
  double wall_ms = 0;
};

// ---------------------------------------------------------------------------
// JSON

inline void to_json(json& j, const Scenario& s) {
  j = json{{"model", std::string(to_string(s.model))},
           {"n", s.n},
           {"cap_N", s.cap_N},
           {"protocol", s.protocol},
           {"seed", s.seed},
           {"max_rounds", s.max_rounds},
           {"parity_known", s.parity_known}};
  std::visit([&](const auto& v) { j["ids"] = v; }, s.ids);
  std::visit([&](const auto& v) { j["chirality"] = v; }, s.chirality);
  if (auto* g = std::get_if<std::string>(&s.gaps)) j["gaps"] = *g;
  else {
    json arr = json::array();
    for (const auto& x : std::get<std::vector<Rational>>(s.gaps)) arr.push_back(to_string(x));
    j["gaps"] = arr;
  }
  if (!s.set.empty()) j["set"] = s.set;
}

inline void from_json(const json& j, Scenario& s) {
  s = Scenario{};
  if (j.contains("model")) s.model = parse_model(j.at("model").get<std::string>());
  if (j.contains("n")) s.n = j.at("n").get<std::size_t>();
  if (j.contains("cap_N")) s.cap_N = j.at("cap_N").get<int>();
  if (j.contains("protocol")) s.protocol = j.at("protocol").get<std::string>();
  if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("max_rounds")) s.max_rounds = j.at("max_rounds").get<std::size_t>();
  if (j.contains("parity_known")) s.parity_known = j.at("parity_known").get<bool>();
  if (j.contains("set")) s.set = j.at("set").get<std::vector<int>>();
  if (j.contains("ids")) {
    if (j["ids"].is_string()) s.ids = j["ids"].get<std::string>();
    else s.ids = j["ids"].get<std::vector<int>>();
  }
  if (j.contains("chirality")) {
    if (j["chirality"].is_string()) s.chirality = j["chirality"].get<std::string>();
    else s.chirality = j["chirality"].get<std::vector<int>>();
  }
  if (j.contains("gaps")) {
    if (j["gaps"].is_string()) s.gaps = j["gaps"].get<std::string>();
    else {
      std::vector<Rational> g;
      for (const auto& x : j["gaps"]) g.push_back(x.is_string() ? parse_rational(x.get<std::string>())
                                                                : Rational(x.get<long long>()));
      s.gaps = g;
    }
  }
}

inline std::optional<std::uint64_t> seed_override() {
  const char* v = std::getenv("RINGSYNC_SEED");
  if (!v || !*v) return std::nullopt;
  return std::stoull(v);
}

// ---------------------------------------------------------------------------
// Materialization

// Parses "random-rational(D)": weights in [1, D], normalized.
inline std::optional<long long> random_rational_bound(const std::string& spec) {
  const std::string head = "random-rational(";
  if (spec.rfind(head, 0) != 0 || spec.back() != ')') return std::nullopt;
  return std::stoll(spec.substr(head.size(), spec.size() - head.size() - 1));
}

inline RingConfig materialize(const Scenario& s) {
  if (s.n < 2) throw InvalidConfig("a ring needs at least two agents");
  gen::Rng rng(s.seed);
  RingConfig c;
  c.cap_N = s.cap_N;
  c.parity_known = s.parity_known;

  if (auto* g = std::get_if<std::vector<Rational>>(&s.gaps)) c.gaps = *g;
  else {
    const std::string& kind = std::get<std::string>(s.gaps);
    if (kind == "uniform") c.gaps = gen::uniform_gaps(s.n);
    else if (auto d = random_rational_bound(kind)) c.gaps = gen::random_gaps(s.n, *d, rng);
    else throw InvalidConfig("unknown gap generator: " + kind);
  }

  if (auto* ids = std::get_if<std::vector<int>>(&s.ids)) c.ids = *ids;
  else if (std::get<std::string>(s.ids) == "random") c.ids = gen::random_ids(s.n, s.cap_N, rng);
  else throw InvalidConfig("unknown id generator: " + std::get<std::string>(s.ids));

  if (auto* ch = std::get_if<std::vector<int>>(&s.chirality)) c.chirality = *ch;
  else {
    const std::string& kind = std::get<std::string>(s.chirality);
    if (kind == "uniform") c.chirality.assign(s.n, 1);
    else if (kind == "random") c.chirality = gen::random_chirality(s.n, rng);
    else if (kind == "half-split") c.chirality = gen::half_split_chirality(s.n, rng);
    else throw InvalidConfig("unknown chirality generator: " + kind);
  }
  if (c.size() != s.n) throw InvalidConfig("explicit gaps do not match n");
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Ground truth

// Gaps in agent i's own sense from its initial position.
inline std::vector<Rational> own_gaps(const RingConfig& c, std::size_t i) {
  const std::size_t n = c.size();
  std::vector<Rational> g(n);
  for (std::size_t k = 0; k < n; ++k) g[k] = c.chirality[i] > 0 ? c.gaps[(i + k) % n] : c.gaps[(i + 2 * n - k - 1) % n];
  return g;
}

inline std::size_t own_neighbor(const RingConfig& c, std::size_t i, int steps) {
  const long long n = static_cast<long long>(c.size());
  const long long j = static_cast<long long>(i) + steps * c.chirality[i];
  return static_cast<std::size_t>(((j % n) + n) % n);
}

inline std::optional<std::string> check_neighbors(const RingConfig& c, std::size_t i, const protocols::NeighborInfo& nb) {
  const std::size_t n = c.size();
  const Rational right = c.chirality[i] > 0 ? c.gaps[i] : c.gaps[(i + n - 1) % n];
  const Rational left = c.chirality[i] > 0 ? c.gaps[(i + n - 1) % n] : c.gaps[i];
  const bool rs = c.chirality[own_neighbor(c, i, 1)] == c.chirality[i];
  const bool ls = c.chirality[own_neighbor(c, i, -1)] == c.chirality[i];
  if (nb.right_gap != right || nb.left_gap != left || nb.right_same != rs || nb.left_same != ls)
    return "agent " + std::to_string(c.ids[i]) + " misjudged its neighbours";
  return std::nullopt;
}

// Objective sense (+1 clockwise) of each agent's logical right at the end.
inline std::vector<int> final_sense(const RingConfig& c, const std::vector<bool>& flipped) {
  std::vector<int> s(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) s[i] = c.chirality[i] * (flipped[i] ? -1 : 1);
  return s;
}

inline std::optional<std::string> check_agreement(const RingConfig& c, const std::vector<bool>& flipped) {
  auto s = final_sense(c, flipped);
  for (int v : s)
    if (v != s[0]) return std::string("senses of direction disagree");
  return std::nullopt;
}

inline std::variant<std::size_t, std::string> unique_leader(const std::vector<protocols::AgentOutcome>& out) {
  std::size_t count = 0, at = 0;
  for (std::size_t i = 0; i < out.size(); ++i)
    if (out[i].leader.value_or(false)) {
      ++count;
      at = i;
    }
  if (count != 1) return std::to_string(count) + " leaders";
  return at;
}

inline std::optional<std::string> check_labels(const RingConfig& c, const std::vector<protocols::AgentOutcome>& out,
                                               const std::vector<bool>& flipped) {
  auto l = unique_leader(out);
  if (auto* e = std::get_if<std::string>(&l)) return *e;
  const std::size_t L = std::get<std::size_t>(l), n = c.size();
  const int sense = final_sense(c, flipped)[L];
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t want = sense > 0 ? (i + n - L) % n + 1 : (L + n - i) % n + 1;
    if (out[i].label != want)
      return "agent " + std::to_string(c.ids[i]) + " label " +
             (out[i].label ? std::to_string(*out[i].label) : std::string("missing")) + " expected " +
             std::to_string(want);
  }
  return std::nullopt;
}

inline std::optional<std::string> check_gaps(const RingConfig& c, const std::vector<protocols::AgentOutcome>& out) {
  for (std::size_t i = 0; i < c.size(); ++i)
    if (!out[i].recovered_gaps || *out[i].recovered_gaps != own_gaps(c, i))
      return "agent " + std::to_string(c.ids[i]) + " recovered wrong gaps";
  return std::nullopt;
}

inline std::optional<std::string> check_move(const RingConfig& c, const std::vector<protocols::AgentOutcome>& out,
                                             bool weak_ok = false) {
  RoundSpec spec{{}, ModelKind::Basic};
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!out[i].move) return std::string("agent without a move");
    spec.directions.push_back(resolve(out[i].move->move, c.chirality[i]));
  }
  const std::size_t r = rotation_index(spec, c.size());
  if (r == 0 || (!weak_ok && 2 * r == c.size())) return "returned move has rotation index " + std::to_string(r);
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Protocol execution

namespace detail {

using protocols::AgentOutcome;

// Inputs some protocols presume, computed from the ground truth.
struct Presets {
  std::map<int, Direction> move;  // a nontrivial move in each agent's own sense
  std::map<int, bool> flip;       // flips that give everybody the clockwise sense
  int leader = 0;                 // smallest ID
};

inline Presets presets(const RingConfig& c, std::uint64_t seed) {
  Presets p;
  const std::size_t n = c.size();
  gen::Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  for (int attempt = 0; attempt < 10000 && p.move.empty(); ++attempt) {
    RoundSpec spec{{}, ModelKind::Basic};
    for (std::size_t i = 0; i < n; ++i) spec.directions.push_back(rng() & 1 ? Direction::Right : Direction::Left);
    if (!is_nontrivial_rotation(rotation_index(spec, n), n)) continue;
    for (std::size_t i = 0; i < n; ++i) p.move[c.ids[i]] = resolve(spec.directions[i], c.chirality[i]);
  }
  for (std::size_t i = 0; i < n; ++i) p.flip[c.ids[i]] = c.chirality[i] < 0;
  p.leader = *std::min_element(c.ids.begin(), c.ids.end());
  return p;
}

inline Task<AgentOutcome> agreement(AgentContext& ctx, Direction move) {
  AgentOutcome out;
  out.flipped = co_await protocols::dir_agreement(ctx, move);
  out.rounds = ctx.rounds();
  co_return out;
}

inline Task<AgentOutcome> leader_common(AgentContext& ctx, bool flip) {
  if (flip) ctx.flip_sense();
  AgentOutcome out;
  out.leader = co_await protocols::leader_common(ctx);
  out.rounds = ctx.rounds();
  co_return out;
}

inline Task<AgentOutcome> emptiness(AgentContext& ctx, bool flip, std::set<int> B) {
  if (flip) ctx.flip_sense();
  co_return co_await protocols::emptiness_program(ctx, std::move(B));
}

inline Task<AgentOutcome> with_move(AgentContext& ctx, std::function<Task<protocols::MoveResult>(AgentContext&)> f) {
  AgentOutcome out;
  out.move = co_await f(ctx);
  out.rounds = ctx.rounds();
  co_return out;
}

inline Task<AgentOutcome> ring_dist(AgentContext& ctx, bool flip, bool leader) {
  if (flip) ctx.flip_sense();
  co_return co_await protocols::ring_dist_program(ctx, leader);
}

}  // namespace detail

inline RunRecord run_on(const Scenario& s, const RingConfig& c) {
  using protocols::AgentOutcome;
  using Program = std::function<Task<AgentOutcome>(AgentContext&)>;
  RunRecord rec{s.protocol, s.model, s.n, s.cap_N, s.seed, 0, false, "", 0};
  const auto start = std::chrono::steady_clock::now();
  auto finish = [&](std::optional<std::string> failure, std::string ok_detail = "") {
    rec.success = !failure;
    rec.detail = failure ? *failure : ok_detail;
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return rec;
  };
  try {
    check_paper_size(c);
    const detail::Presets pre = detail::presets(c, s.seed);
    auto run = [&](Program p) {
      auto r = run_agents<AgentOutcome>(c, s.model, std::move(p), s.max_rounds);
      rec.rounds = r.rounds;
      return r;
    };
    const std::string& name = s.protocol;
    if (name == "dir-agreement") {
      auto r = run([&](AgentContext& ctx) { return detail::agreement(ctx, pre.move.at(ctx.id())); });
      return finish(check_agreement(c, r.final_flipped));
    }
    if (name == "leader-nmove") {
      auto r = run([&](AgentContext& ctx) { return protocols::leader_with_nmove(ctx, pre.move.at(ctx.id())); });
      auto l = unique_leader(r.outcomes);
      if (auto* e = std::get_if<std::string>(&l)) return finish(*e);
      return finish(check_agreement(c, r.final_flipped), "leader=" + std::to_string(c.ids[std::get<std::size_t>(l)]));
    }
    if (name == "leader-common") {
      auto r = run([&](AgentContext& ctx) { return detail::leader_common(ctx, pre.flip.at(ctx.id())); });
      auto l = unique_leader(r.outcomes);
      if (auto* e = std::get_if<std::string>(&l)) return finish(*e);
      const int got = c.ids[std::get<std::size_t>(l)];
      if (got != protocols::leader_common_reference(c.ids)) return finish("leader " + std::to_string(got) + " is not the smallest id");
      return finish(std::nullopt, "leader=" + std::to_string(got));
    }
    if (name == "emptiness") {
      std::set<int> B(s.set.begin(), s.set.end());
      auto r = run([&](AgentContext& ctx) { return detail::emptiness(ctx, pre.flip.at(ctx.id()), B); });
      bool truth = false;
      for (int id : c.ids) truth |= B.count(id) > 0;
      for (std::size_t i = 0; i < c.size(); ++i)
        if (r.outcomes[i].nonempty != truth) return finish("agent " + std::to_string(c.ids[i]) + " answered wrongly");
      return finish(std::nullopt, truth ? "nonempty" : "empty");
    }
    if (name == "nmove-odd") {
      if (c.size() % 2 == 0) return finish("nmove-odd needs odd n");
      auto r = run([](AgentContext& ctx) { return detail::with_move(ctx, protocols::nmove_odd); });
      return finish(check_move(c, r.outcomes, true));
    }
    if (name == "nmove-family") {
      const SubsetFamily f = random_family(c.cap_N, static_cast<std::size_t>(std::max(64, 8 * c.cap_N)), 0.5, s.seed);
      auto r = run([&f](AgentContext& ctx) {
        return detail::with_move(ctx, [&f](AgentContext& x) { return protocols::nmove_family(x, f); });
      });
      return finish(check_move(c, r.outcomes), "index=" + std::to_string(r.outcomes[0].move->index));
    }
    if (name == "nmove-selective") {
      auto r = run(protocols::nmove_selective_program);
      return finish(check_move(c, r.outcomes), "level=" + std::to_string(r.outcomes[0].move->level));
    }
    if (name == "neighbor-discovery") {
      auto r = run(protocols::neighbor_discovery_program);
      for (std::size_t i = 0; i < c.size(); ++i)
        if (auto e = check_neighbors(c, i, *r.outcomes[i].neighbors)) return finish(e);
      return finish(std::nullopt);
    }
    if (name == "ring-dist") {
      auto r = run([&](AgentContext& ctx) {
        return detail::ring_dist(ctx, pre.flip.at(ctx.id()), ctx.id() == pre.leader);
      });
      return finish(check_labels(c, r.outcomes, r.final_flipped));
    }
    if (name == "ld-simple") {
      if (s.model == ModelKind::Basic && c.size() % 2 == 0)
        return finish("model impossibility: location discovery in the basic model needs odd n");
      auto r = run(protocols::ld_simple);
      return finish(check_gaps(c, r.outcomes));
    }
    if (name == "ld-perceptive") {
      auto r = run(protocols::ld_perceptive);
      if (auto e = check_gaps(c, r.outcomes)) return finish(e);
      if (c.size() % 2 == 0) return finish(check_labels(c, r.outcomes, r.final_flipped));
      return finish(std::nullopt);
    }
    return finish("unknown protocol: " + name);
  } catch (const std::exception& e) {
    return finish(std::string(e.what()));
  }
}

inline RunRecord run_scenario(const Scenario& s) {
  RingConfig c;
  try {
    c = materialize(s);
  } catch (const std::exception& e) {
    return RunRecord{s.protocol, s.model, s.n, s.cap_N, s.seed, 0, false, std::string("invalid scenario: ") + e.what(), 0};
  }
  return run_on(s, c);
}

// ---------------------------------------------------------------------------
// Sweeps

// Grid: {"protocols": [...], "models": [...], "n": [..] | {"from","to","step"},
// "cap_N": int | "4n", "seeds": [..] | {"base", "count"}, plus optional
// "ids", "chirality", "gaps", "max_rounds", "set" applied to every cell.
inline std::vector<Scenario> expand_grid(const json& g) {
  auto list_or_range = [](const json& v) {
    std::vector<std::uint64_t> out;
    if (v.is_array()) {
      for (const auto& x : v) out.push_back(x.get<std::uint64_t>());
    } else if (v.is_object() && v.contains("count")) {
      const std::uint64_t base = v.value("base", std::uint64_t{1});
      for (std::uint64_t k = 0; k < v.at("count").get<std::uint64_t>(); ++k) out.push_back(base + k);
    } else if (v.is_object()) {
      const std::uint64_t step = v.value("step", std::uint64_t{1});
      for (std::uint64_t x = v.at("from").get<std::uint64_t>(); x <= v.at("to").get<std::uint64_t>(); x += step)
        out.push_back(x);
    } else {
      out.push_back(v.get<std::uint64_t>());
    }
    return out;
  };
  std::vector<std::string> protos = g.at("protocols").get<std::vector<std::string>>();
  std::vector<std::string> models = g.value("models", std::vector<std::string>{"perceptive"});
  std::vector<std::uint64_t> ns = list_or_range(g.at("n"));
  std::vector<std::uint64_t> seeds = g.contains("seeds") ? list_or_range(g.at("seeds")) : std::vector<std::uint64_t>{1};
  if (auto o = seed_override())
    for (std::size_t k = 0; k < seeds.size(); ++k) seeds[k] = *o + k;

  json common = json::object();
  for (const char* key : {"ids", "chirality", "gaps", "max_rounds", "set", "parity_known"})
    if (g.contains(key)) common[key] = g[key];

  std::vector<Scenario> cells;
  for (const auto& p : protos)
    for (const auto& m : models)
      for (std::uint64_t n : ns)
        for (std::uint64_t seed : seeds) {
          json j = common;
          j["protocol"] = p;
          j["model"] = m;
          j["n"] = n;
          j["seed"] = seed;
          if (!g.contains("cap_N") || (g["cap_N"].is_string() && g["cap_N"] == "4n")) j["cap_N"] = 4 * n;
          else j["cap_N"] = g["cap_N"];
          cells.push_back(j.get<Scenario>());
        }
  return cells;
}

// Runs cells on `threads` workers; results keep the cell order.
inline std::vector<RunRecord> sweep(const std::vector<Scenario>& cells, unsigned threads = 0) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<RunRecord> out(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next++) < cells.size();) out[k] = run_scenario(cells[k]);
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return out;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

inline void write_csv(std::ostream& os, const std::vector<RunRecord>& rows) {
  os << "protocol,model,n,cap_N,seed,rounds,success,detail\n";
  for (const auto& r : rows)
    os << r.protocol << ',' << to_string(r.model) << ',' << r.n << ',' << r.cap_N << ',' << r.seed << ',' << r.rounds
       << ',' << (r.success ? "true" : "false") << ',' << csv_field(r.detail) << '\n';
}

inline json record_json(const RunRecord& r) {
  return json{{"protocol", r.protocol}, {"model", std::string(to_string(r.model))},
              {"n", r.n},               {"cap_N", r.cap_N},
              {"seed", r.seed},         {"rounds", r.rounds},
              {"success", r.success},   {"detail", r.detail},
              {"wall_ms", r.wall_ms}};
}

// ---------------------------------------------------------------------------
// Oracle cross-check

struct OracleReport {
  std::size_t cases = 0;
  std::size_t mismatches = 0;
  std::optional<json> first_mismatch;  // the offending config and round
};

inline json config_json(const RingConfig& c, const RoundSpec& spec) {
  json gaps = json::array(), dirs = json::array();
  for (const auto& g : c.gaps) gaps.push_back(to_string(g));
  for (auto d : spec.directions) dirs.push_back(std::string(to_string(d)));
  return json{{"gaps", gaps}, {"ids", c.ids}, {"chirality", c.chirality}, {"cap_N", c.cap_N},
              {"model", std::string(to_string(spec.model))}, {"directions", dirs}};
}

// `count` random (config, round) pairs per model with 2 <= n <= n_max.
inline OracleReport verify_oracle(std::size_t count, std::size_t n_max, std::uint64_t seed) {
  if (n_max < 2 || n_max > 32) throw std::invalid_argument("n_max must be in [2, 32]");
  OracleReport rep;
  gen::Rng rng(seed);
  for (ModelKind m : {ModelKind::Basic, ModelKind::Lazy, ModelKind::Perceptive})
    for (std::size_t k = 0; k < count; ++k) {
      const std::size_t n = 2 + rng() % (n_max - 1);
      RingConfig c = gen::random_config(n, static_cast<int>(4 * n), rng);
      RoundSpec spec = gen::random_spec(n, m, rng);
      RoundResult fast = execute_round(c, spec);
      oracle::Trace tr = oracle::simulate_continuous(c, spec);
      auto fb = oracle::feedback_from_trace(c, tr, m);
      ++rep.cases;
      if (fast.final_positions != tr.final_positions || fast.feedback != fb) {
        ++rep.mismatches;
        if (!rep.first_mismatch) rep.first_mismatch = config_json(c, spec);
      }
    }
  return rep;
}

}  // namespace ringsync::harness
