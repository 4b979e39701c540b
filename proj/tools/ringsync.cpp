// Command-line front end: scenario runs, sweeps, the oracle cross-check and
// subset-family utilities. Exit code 0 iff every validation passed.

#include "ringsync/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace ringsync;
using harness::json;

namespace {

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return json::parse(in);
}

std::string set_text(const std::vector<int>& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "}";
}

void print_report(const VerificationReport& r) {
  std::cout << (r.verdict ? "yes" : "no") << " pairs_checked=" << r.pairs_checked;
  if (r.failing_n) std::cout << " failing_n=" << *r.failing_n;
  if (r.witness) std::cout << " witness=" << set_text(r.witness->first) << "," << set_text(r.witness->second);
  std::cout << "\n";
}

int cmd_run(const std::string& path) {
  json doc = read_json(path);
  std::vector<json> items = doc.is_array() ? doc.get<std::vector<json>>() : std::vector<json>{doc};
  bool ok = true;
  for (auto& item : items) {
    auto s = item.get<harness::Scenario>();
    if (auto o = harness::seed_override()) s.seed = *o;
    harness::RunRecord r = harness::run_scenario(s);
    std::cout << harness::record_json(r).dump() << "\n";
    ok &= r.success;
  }
  return ok ? 0 : 1;
}

int cmd_sweep(const std::string& grid_path, const std::string& out_path, unsigned threads) {
  auto cells = harness::expand_grid(read_json(grid_path));
  auto rows = harness::sweep(cells, threads);
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  harness::write_csv(out, rows);
  std::size_t failed = 0;
  for (const auto& r : rows) failed += !r.success;
  std::cout << rows.size() << " cells, " << failed << " failed -> " << out_path << "\n";
  return failed == 0 ? 0 : 1;
}

int cmd_verify_oracle(std::size_t count, std::size_t n_max, std::uint64_t seed) {
  harness::OracleReport r = harness::verify_oracle(count, n_max, seed);
  std::cout << "cases=" << r.cases << " mismatches=" << r.mismatches << "\n";
  if (r.first_mismatch) std::cout << "first mismatch: " << r.first_mismatch->dump() << "\n";
  return r.mismatches == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synchronous bouncing agents on a ring"};
  app.require_subcommand(1);

  std::string scenario_path;
  auto* run = app.add_subcommand("run", "Run a scenario file (one object or an array) and validate it");
  run->add_option("scenario", scenario_path)->required()->check(CLI::ExistingFile);

  std::string grid_path, out_path;
  unsigned threads = 0;
  auto* sw = app.add_subcommand("sweep", "Run a grid of scenarios and write CSV");
  sw->add_option("grid", grid_path)->required()->check(CLI::ExistingFile);
  sw->add_option("--out", out_path)->required();
  sw->add_option("--threads", threads, "0 = hardware concurrency");

  std::size_t count = 1000, n_max = 12;
  std::uint64_t seed = 1;
  auto* vo = app.add_subcommand("verify-oracle", "Compare the closed-form round with the event-driven oracle");
  vo->add_option("--count", count, "cases per model");
  vo->add_option("--n-max", n_max);
  vo->add_option("--seed", seed);

  auto* fam = app.add_subcommand("family", "Subset-family utilities");
  fam->require_subcommand(1);
  std::string family_path;
  int n = 1, N = 8;
  bool selective = false;
  auto* check = fam->add_subcommand("check", "Verify a family file as an (N,n)-distinguisher or selective family");
  check->add_option("file", family_path)->required()->check(CLI::ExistingFile);
  check->add_option("--n", n)->required();
  check->add_flag("--selective", selective);

  auto* search = fam->add_subcommand("search", "Minimum distinguisher size by exhaustive search (N <= 8)");
  search->add_option("--N", N)->required();
  search->add_option("--n", n)->required();

  std::string kind = "random";
  std::size_t length = 0;
  double density = 0.5;
  std::string family_out;
  auto* build = fam->add_subcommand("build", "Build a random distinguisher candidate or a verified selective family");
  build->add_option("--kind", kind)->check(CLI::IsMember({"random", "selective"}));
  build->add_option("--N", N)->required();
  build->add_option("--n", n)->required();
  build->add_option("--length", length, "random kind; 0 = 3 n log2(N/n) / max(1, log2 n)");
  build->add_option("--density", density);
  build->add_option("--seed", seed);
  build->add_option("--out", family_out, "default: stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(scenario_path);
    if (*sw) return cmd_sweep(grid_path, out_path, threads);
    if (*vo) return cmd_verify_oracle(count, n_max, seed);
    if (*check) {
      std::ifstream in(family_path);
      SubsetFamily f = read_family(in);
      VerificationReport r = selective ? is_selective(f, n) : is_distinguisher(f, n);
      print_report(r);
      return r.verdict ? 0 : 1;
    }
    if (*search) {
      std::cout << "min_distinguisher_size(" << N << "," << n << ")=" << min_distinguisher_size(N, n) << "\n";
      return 0;
    }
    if (*build) {
      SubsetFamily f;
      if (kind == "selective") {
        f = build_selective(N, n, seed);
      } else {
        if (length == 0) {
          const double lg = std::log2(static_cast<double>(n));
          length = static_cast<std::size_t>(std::ceil(3.0 * n * std::log2(static_cast<double>(N) / n) / std::max(1.0, lg)));
        }
        f = random_family(N, length, density, seed);
      }
      if (family_out.empty()) write_family(std::cout, f);
      else {
        std::ofstream out(family_out);
        write_family(out, f);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
