// Acceptance harness: one PASS/FAIL line per criterion with the measured
// values. Exit status is nonzero when any criterion fails.
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "isw/bench.hpp"
#include "isw/distance.hpp"
#include "isw/inference.hpp"
#include "isw/parallel.hpp"
#include "support.hpp"

using namespace isw;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

EmbedParams interval_params() {
  EmbedParams p;
  p.num_slices = 3;
  p.dprime = 10;
  p.weight = SpectralWeight::heat(1.0);
  return p;
}

Outcome size_calibration() {
  ScenarioConfig cfg;
  cfg.n1 = 60;
  cfg.n2 = 40;
  PowerOptions po;
  po.replicates = 400;
  po.seed = kSeed;
  const double size = run_size_calibration(cfg, interval_params(), po);
  return {size >= 0.025 && size <= 0.08, fmt("interval hmp size = %.4f (band [0.025, 0.08])", size)};
}

Outcome interval_power() {
  ScenarioConfig cfg;
  cfg.n1 = 60;
  cfg.n2 = 40;
  PowerOptions po;
  po.replicates = 400;
  po.seed = kSeed;
  const auto c = run_power(cfg, {2.0, 3.0}, interval_params(), po);
  const double p2 = c.rows[0].power, p3 = c.rows[1].power;
  return {p2 >= 0.80 && p3 >= 0.95,
          fmt("power(delta=2) = %.4f [%.3f, %.3f] (need >= 0.80), power(delta=3) = %.4f [%.3f, %.3f] (need >= 0.95)", p2,
              c.rows[0].lo, c.rows[0].hi, p3, c.rows[1].lo, c.rows[1].hi)};
}

Outcome circle_power() {
  ScenarioConfig cfg;
  cfg.scenario = Scenario::circle;
  PowerOptions po;
  po.replicates = 400;
  po.seed = kSeed;
  const auto c = run_power(cfg, {0.0, 15.0 * testing::kPi / 180.0}, default_embed_params(cfg.scenario), po);
  const double size = c.rows[0].power, pw = c.rows[1].power;
  return {size >= 0.025 && size <= 0.08 && pw - size >= 0.3,
          fmt("size = %.4f (band [0.025, 0.08]), power(15 deg) = %.4f, gain = %.4f (need >= 0.3)", size, pw, pw - size)};
}

std::vector<std::pair<std::string, DomainSpec>> metric_domains(isw::Rng& rng) {
  return {{"interval", DomainSpec::interval(1.0)},
          {"circle", DomainSpec::circle(2 * testing::kPi)},
          {"graph10", testing::random_connected_graph(rng, 10, 8)}};
}

SpectralBasis metric_basis(const DomainSpec& d) { return build_basis(d, d.is_graph() ? d.node_count() - 1 : 10); }

Outcome metric_suite() {
  isw::Rng rng(kSeed);
  const auto w = SpectralWeight::heat(1.0);
  std::size_t sym = 0, tri = 0, checks = 0;
  for (const auto& [name, d] : metric_domains(rng)) {
    const auto basis = metric_basis(d);
    for (int t = 0; t < 200; ++t) {
      const auto a = testing::random_histogram(d, rng, 1 + rng.below(6));
      const auto b = testing::random_histogram(d, rng, 1 + rng.below(6));
      const auto c = testing::random_histogram(d, rng, 1 + rng.below(6));
      const auto dist = [&](const Histogram& x, const Histogram& y) { return isw2(x, y, basis, w, ExactSlices{}).value; };
      const double ab = dist(a, b), ba = dist(b, a), bc = dist(b, c), ac = dist(a, c);
      sym += std::abs(ab - ba) > 1e-12;
      tri += ac > ab + bc + 1e-10;
      tri += ab > ac + bc + 1e-10;
      tri += bc > ab + ac + 1e-10;
      ++checks;
    }
  }
  return {sym == 0 && tri == 0,
          fmt("%zu triples: %zu symmetry violations, %zu triangle violations", checks, sym, tri)};
}

Outcome domination() {
  isw::Rng rng(kSeed + 1);
  const auto w = SpectralWeight::heat(1.0);
  std::size_t bad = 0, pairs = 0;
  double worst = -1e300;
  for (const auto& [name, d] : metric_domains(rng)) {
    const auto basis = metric_basis(d);
    for (int t = 0; t < 200; ++t) {
      const auto a = testing::random_histogram(d, rng, 1 + rng.below(6));
      const auto b = testing::random_histogram(d, rng, 1 + rng.below(6));
      const double gap = spectral_mmd(a, b, basis, w) - isw2(a, b, basis, w, ExactSlices{}).value;
      worst = std::max(worst, gap);
      bad += gap > 1e-12;
      ++pairs;
    }
  }
  return {bad == 0, fmt("%zu pairs: %zu violations, max(mmd - isw2) = %.3e", pairs, bad, worst)};
}

Outcome dirac_identity() {
  isw::Rng rng(kSeed + 2);
  const auto w = SpectralWeight::heat(1.0);
  double worst = 0.0;
  std::size_t pairs = 0;
  for (std::size_t n : {5u, 10u, 20u}) {
    const auto g = testing::random_connected_graph(rng, n, n);
    const auto basis = build_graph_basis(g, n - 1);
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) {
        const Point px{static_cast<double>(x)}, py{static_cast<double>(y)};
        const double lhs = isw2(testing::dirac(g, px), testing::dirac(g, py), basis, w, ExactSlices{}).value;
        worst = std::max(worst, std::abs(lhs - spectral_distance(basis, w, px, py)));
        ++pairs;
      }
    }
  }
  return {worst <= 1e-12, fmt("%zu node pairs on n = 5, 10, 20: max |isw2 - spectral distance| = %.3e", pairs, worst)};
}

Outcome t_hat_forms() {
  isw::Rng rng(kSeed + 3);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n1 = 2 + rng.below(30), n2 = 2 + rng.below(30), dim = 1 + rng.below(60);
    const auto x = testing::random_matrix(rng, n1, dim, rng.normal(0.0, 3.0));
    const auto y = testing::random_matrix(rng, n2, dim, rng.normal(0.0, 3.0));
    const double a = t_hat(x, y), b = t_hat_inner_product(x, y);
    worst = std::max(worst, std::abs(a - b) / std::max(std::abs(a), 1e-300));
  }
  return {worst <= 1e-10, fmt("100 group pairs: max relative error = %.3e", worst)};
}

Outcome w2_oracle() {
  isw::Rng rng(kSeed + 4);
  double worst_grid = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto a = testing::random_line(rng, 1 + rng.below(8));
    const auto b = testing::random_line(rng, 1 + rng.below(8));
    worst_grid = std::max(worst_grid, std::abs(w2_line_exact(a, b) - testing::oracle_w2_grid(a, b, 1000000)));
  }
  const auto w = SpectralWeight::heat(1.0);
  double worst_rel = 0.0;
  std::size_t pairs = 0;
  for (const auto& [name, d] : metric_domains(rng)) {
    const auto basis = metric_basis(d);
    for (int t = 0; t < 50; ++t) {
      const auto a = testing::random_histogram(d, rng, 2 + rng.below(20));
      const auto b = testing::random_histogram(d, rng, 2 + rng.below(20));
      const double exact = isw2(a, b, basis, w, ExactSlices{}).value;
      const double approx = isw2(a, b, basis, w, EmbeddingMode{256}).value;
      if (exact > 0.0) worst_rel = std::max(worst_rel, std::abs(approx - exact) / exact);
      ++pairs;
    }
  }
  return {worst_grid <= 1e-4 && worst_rel <= 0.02,
          fmt("max |exact - grid(1e6)| = %.3e over 100 line pairs (need <= 1e-4); max relative error of D'=256 "
              "embedding vs exact = %.4f over %zu pairs (need <= 0.02)",
              worst_grid, worst_rel, pairs)};
}

Outcome hmp_size() {
  const std::size_t draws = 100000, dim = 100;
  const double rho = 0.5;
  std::vector<double> hp(draws);
  parallel_for(draws, [&](std::size_t r) {
    isw::Rng rng(derive_seed(kSeed + 5, {r}));
    const double common = rng.normal();
    std::vector<double> p(dim);
    for (auto& v : p) {
      const double z = std::sqrt(rho) * common + std::sqrt(1.0 - rho) * rng.normal();
      v = std::erfc(std::abs(z) / std::sqrt(2.0));  // two-sided
    }
    hp[r] = hmp_combine(p);
  });
  double at05 = 0, at01 = 0;
  for (double v : hp) {
    at05 += v <= 0.05;
    at01 += v <= 0.01;
  }
  at05 /= draws;
  at01 /= draws;
  return {at05 <= 0.06 && at01 <= 0.013,
          fmt("P(p <= 0.05) = %.4f (need <= 0.06), P(p <= 0.01) = %.4f (need <= 0.013)", at05, at01)};
}

Outcome bootstrap_uniformity() {
  const std::size_t runs = 500;
  std::vector<double> p(runs);
  for (std::size_t r = 0; r < runs; ++r) {
    isw::Rng rng(derive_seed(kSeed + 6, {r}));
    const auto x = testing::random_matrix(rng, 20, 5);
    const auto y = testing::random_matrix(rng, 15, 5);
    p[r] = bootstrap_test(x, y, 199, derive_seed(kSeed + 7, {r})).p_value;
  }
  const double ks = testing::ks_uniform(p);
  return {ks <= 0.08, fmt("500 null runs at B = 199: KS statistic = %.4f (need <= 0.08)", ks)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / ("isw_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto run = [&](const std::string& tag, int threads) {
    const std::string cli = std::string("'") + ISW_CLI_PATH + "' --threads " + std::to_string(threads) + " ";
    const std::string cmd = "cd '" + dir.string() + "' && " + cli + "simulate --scenario circle --delta 0.1 --seed 7 -o h" +
                            tag + ".csv 2>/dev/null && " + cli + "basis --scenario circle -o b" + tag +
                            ".json 2>/dev/null && " + cli + "embed --basis b" + tag + ".json -i h" + tag +
                            ".csv --dprime 20 -o e" + tag + ".csv 2>/dev/null && " + cli + "test -e e" + tag +
                            ".csv -g h" + tag + ".csv.groups.csv --method boot --B 199 --seed 3 > t" + tag +
                            ".json 2>/dev/null && " + cli + "test -e e" + tag + ".csv -g h" + tag +
                            ".csv.groups.csv > u" + tag + ".json 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) && WEXITSTATUS(status) == 0;
  };
  bool ok = run("a", 8) && run("b", 8) && run("c", 1);
  std::size_t differing = 0, compared = 0;
  if (ok) {
    for (const char* stem : {"h%s.csv", "h%s.csv.groups.csv", "e%s.csv", "e%s.csv.json", "t%s.json", "u%s.json"}) {
      const auto a = slurp(dir / fmt(stem, "a")), b = slurp(dir / fmt(stem, "b")), c = slurp(dir / fmt(stem, "c"));
      differing += (a != b) + (a != c);
      compared += 2;
      ok = ok && !a.empty();
    }
  }
  fs::remove_all(dir);
  return {ok && differing == 0, fmt("pipeline ran: %s; %zu of %zu file comparisons differ (runs: 8 threads twice, "
                                    "1 thread once)",
                                    ok ? "yes" : "no", differing, compared)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 size calibration (interval, delta = 0)", size_calibration},
      {"2 interval power at delta = 2 and 3", interval_power},
      {"3 circle size and power at 15 degrees", circle_power},
      {"4 metric properties", metric_suite},
      {"5 MMD domination", domination},
      {"6 Dirac ground-distance identity", dirac_identity},
      {"7 T-hat distance vs inner-product form", t_hat_forms},
      {"8 1-D W2 oracle and embedding convergence", w2_oracle},
      {"9 HMP size under equicorrelation", hmp_size},
      {"10 bootstrap null uniformity", bootstrap_uniformity},
      {"11 pipeline determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
