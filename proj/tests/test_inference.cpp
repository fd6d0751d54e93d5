#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "doctest.h"
#include "isw/bench.hpp"
#include "isw/error.hpp"
#include "isw/inference.hpp"
#include "isw/parallel.hpp"
#include "isw/synthgen.hpp"
#include "support.hpp"

using namespace isw;

namespace {

RowMatrix rows_of(std::initializer_list<std::vector<double>> rs) {
  const std::size_t cols = rs.begin()->size();
  std::vector<double> data;
  for (const auto& r : rs) data.insert(data.end(), r.begin(), r.end());
  return RowMatrix(rs.size(), cols, std::move(data));
}

}  // namespace

TEST_CASE("t_hat examples") {
  const std::vector<double> v{1.5, -2.0, 0.25};
  CHECK(t_hat(rows_of({v, v}), rows_of({v, v})) == 0.0);
  const std::vector<double> a{0.0, 1.0, 2.0}, b{3.0, -1.0, 2.0};
  CHECK(t_hat(rows_of({a, a}), rows_of({b, b})) == doctest::Approx(13.0).epsilon(1e-15));
  CHECK_THROWS_AS(t_hat(rows_of({a}), rows_of({b, b})), InvalidArgument);
}

TEST_CASE("t_hat distance form, inner-product form and the double-sum oracle agree") {
  isw::Rng rng(12);
  for (int r = 0; r < 100; ++r) {
    const auto x = testing::random_matrix(rng, 5, 3);
    const auto y = testing::random_matrix(rng, 4, 3, 0.5);
    const double oracle = testing::oracle_t_hat(x, y);
    const double scale = std::max(1.0, std::abs(oracle));
    CHECK(std::abs(t_hat(x, y) - oracle) <= 1e-10 * scale);
    CHECK(std::abs(t_hat_inner_product(x, y) - oracle) <= 1e-10 * scale);
  }
}

TEST_CASE("t_hat symmetry, permutation and translation invariance") {
  isw::Rng rng(13);
  const auto x = testing::random_matrix(rng, 7, 4);
  const auto y = testing::random_matrix(rng, 6, 4);
  CHECK(t_hat(x, y) == doctest::Approx(t_hat(y, x)).epsilon(1e-13));
  RowMatrix xp(7, 4);
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t k = 0; k < 4; ++k) xp(i, k) = x(6 - i, k);
  CHECK(t_hat(xp, y) == doctest::Approx(t_hat(x, y)).epsilon(1e-13));
  RowMatrix xs = x, ys = y;
  const double shift[] = {3.0, -1.0, 0.5, 10.0};
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t k = 0; k < 4; ++k) xs(i, k) += shift[k];
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t k = 0; k < 4; ++k) ys(i, k) += shift[k];
  CHECK(std::abs(t_hat(xs, ys) - t_hat(x, y)) <= 1e-11);
}

TEST_CASE("t_hat is unbiased under an exchangeable null") {
  isw::Rng rng(14);
  const int runs = 2000;
  std::vector<double> t(runs);
  for (int r = 0; r < runs; ++r) t[r] = t_hat(testing::random_matrix(rng, 8, 3), testing::random_matrix(rng, 6, 3));
  const double mean = std::accumulate(t.begin(), t.end(), 0.0) / runs;
  double var = 0.0;
  for (double v : t) var += (v - mean) * (v - mean);
  const double se = std::sqrt(var / (runs - 1) / runs);
  CHECK(std::abs(mean) <= 3.0 * se);
}

TEST_CASE("bootstrap examples") {
  isw::Rng rng(15);
  const auto x = testing::random_matrix(rng, 10, 3);
  const auto same = bootstrap_test(x, x, 199, 1);
  // Identical groups: the cross term keeps the i == j zeros, so T-hat < 0.
  CHECK(same.statistic == doctest::Approx(testing::oracle_t_hat(x, x)).epsilon(1e-12));
  CHECK(same.statistic < 0.0);
  CHECK(same.p_value >= 0.2);

  const std::vector<double> a{1.0, 2.0};
  const auto degenerate = bootstrap_test(rows_of({a, a}), rows_of({a, a}), 9, 3);
  CHECK(degenerate.p_value == 1.0);

  const auto far1 = testing::random_matrix(rng, 30, 3, 0.0);
  const auto far2 = testing::random_matrix(rng, 30, 3, 5.0);
  const auto sep = bootstrap_test(far1, far2, 999, 42);
  CHECK(sep.p_value == doctest::Approx(1.0 / 1000.0).epsilon(1e-15));
  CHECK(sep.replicates == 999);
  CHECK(sep.seed == 42);
}

TEST_CASE("bootstrap p-value floor and thread independence") {
  isw::Rng rng(16);
  const auto x = testing::random_matrix(rng, 12, 5);
  const auto y = testing::random_matrix(rng, 9, 5, 0.3);
  set_thread_count(1);
  const auto one = bootstrap_test(x, y, 301, 7);
  set_thread_count(8);
  const auto eight = bootstrap_test(x, y, 301, 7);
  set_thread_count(0);
  CHECK(one.p_value == eight.p_value);
  CHECK(one.statistic == eight.statistic);
  CHECK(one.p_value >= 1.0 / 302.0);
  CHECK(one.p_value <= 1.0);
}

TEST_CASE("Welch test examples") {
  const std::vector<double> x{1, 2, 3, 4, 5}, y{3, 4, 5, 6, 7};
  const auto w = welch_t_test(x, y);
  CHECK(w.t == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(w.df == doctest::Approx(8.0).epsilon(1e-14));
  CHECK(std::abs(w.p_value - testing::oracle_t_two_sided(w.t, w.df)) <= 1e-8);
  CHECK(w.p_value == doctest::Approx(0.08051623795726257).epsilon(1e-12));  // scipy ttest_ind(equal_var=False)
  CHECK(welch_t_pvalue(y, x) == welch_t_pvalue(x, y));
  CHECK(welch_t_pvalue(x, x) == 1.0);

  const std::vector<double> u{0.3, 1.9, 2.2, 4.0}, v{1.0, 5.5, 2.5, 7.5, 3.3, 2.1};
  const auto uv = welch_t_test(u, v);
  CHECK(std::abs(uv.p_value - testing::oracle_t_two_sided(uv.t, uv.df)) <= 1e-8);
  CHECK(uv.p_value == doctest::Approx(0.24773771339414657).epsilon(1e-11));
}

TEST_CASE("Welch degenerate sentinels") {
  const std::vector<double> a{2, 2, 2}, b{2, 2}, c{3, 3, 3};
  const auto eq = welch_t_test(a, b);
  CHECK(eq.degenerate);
  CHECK(eq.p_value == 1.0);
  const auto ne = welch_t_test(a, c);
  CHECK(ne.degenerate);
  CHECK(ne.p_value == std::numeric_limits<double>::denorm_min());
  CHECK(ne.p_value > 0.0);
  // Rounding-level spread counts as constant when a tolerance is given.
  const std::vector<double> noisy{1.0, 1.0 + 2e-16, 1.0 - 1e-16}, flat{1.0, 1.0};
  CHECK(welch_t_test(noisy, flat, 1e-12).p_value == 1.0);
  CHECK_THROWS_AS(welch_t_test(std::vector<double>{1.0}, flat), InvalidArgument);
}

TEST_CASE("harmonic mean tail against frozen reference values") {
  // scipy.stats.levy_stable(alpha=1, beta=1, S0) with loc = log D + 0.874367040387922, scale = pi/2.
  CHECK(harmonic_mean_tail(20.0, 1) == doctest::Approx(0.057836019902288).epsilon(1e-9));
  CHECK(harmonic_mean_tail(30.0, 100) == doctest::Approx(0.044650251501059).epsilon(1e-9));
  CHECK(harmonic_mean_tail(8.0, 100) == doctest::Approx(0.337879515652719).epsilon(1e-9));
}

TEST_CASE("hmp_combine properties") {
  const std::vector<double> eq(7, 0.2);
  const auto h = harmonic_mean_pvalue(eq);
  CHECK(h.raw == doctest::Approx(0.2).epsilon(1e-15));
  for (double p : {0.01, 0.005, 0.001, 1e-4}) {
    const std::vector<double> one{p};
    CHECK(std::abs(hmp_combine(one) - p) <= 1e-3);
  }
  isw::Rng rng(18);
  std::vector<double> p(50);
  for (auto& v : p) v = rng.uniform_open();
  const double base = hmp_combine(p);
  auto q = p;
  std::reverse(q.begin(), q.end());
  CHECK(hmp_combine(q) == base);
  for (std::size_t k = 0; k < p.size(); k += 7) {
    auto lower = p;
    lower[k] *= 0.5;
    CHECK(hmp_combine(lower) <= base);
  }
  const double c = hmp_combine(std::vector<double>(30, 1.0));
  CHECK(c > 0.0);
  CHECK(c <= 1.0);
  CHECK_THROWS_AS(hmp_combine(std::vector<double>{0.5, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(hmp_combine(std::vector<double>{1.5}), InvalidArgument);
  CHECK_THROWS_AS(hmp_combine(std::vector<double>{}), InvalidArgument);
  CHECK(hmp_combine(std::vector<double>{1e-320, 0.5}) > 0.0);
}

TEST_CASE("hmp_test on identical groups and constant coordinates") {
  isw::Rng rng(19);
  const auto x = testing::random_matrix(rng, 9, 6);
  RowMatrix xp(9, 6);
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t k = 0; k < 6; ++k) xp(i, k) = x(8 - i, k);
  const auto same = hmp_test(x, xp);
  for (double p : same.per_coordinate) CHECK(p == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(same.p_value >= 0.5);

  auto xc = testing::random_matrix(rng, 10, 4), yc = testing::random_matrix(rng, 8, 4);
  for (std::size_t i = 0; i < 10; ++i) xc(i, 2) = 0.75;
  for (std::size_t i = 0; i < 8; ++i) yc(i, 2) = 0.75;
  const auto rep = hmp_test(xc, yc);
  CHECK(rep.per_coordinate[2] == 1.0);
  CHECK(rep.degenerate_coordinates == 1);
  RowMatrix xd(10, 3), yd(8, 3);
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t k = 0; k < 3; ++k) xd(i, k) = (k == 2) ? 0.0 : xc(i, k);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t k = 0; k < 3; ++k) yd(i, k) = (k == 2) ? 0.0 : yc(i, k);
  const auto without = hmp_test(xd, yd);
  CHECK(std::isfinite(rep.p_value));
  CHECK(rep.p_value > 0.0);
  CHECK(without.per_coordinate[0] == rep.per_coordinate[0]);
}

TEST_CASE("hmp_test on one interval dataset at delta = 2") {
  ScenarioConfig cfg;
  cfg.scenario = Scenario::interval;
  cfg.delta = 2.0;
  cfg.seed = 1;
  const auto ds = generate_dataset(cfg);
  const auto basis = build_analytic_basis(scenario_domain(cfg), 3);
  const auto w = SpectralWeight::heat(1.0);
  const auto e1 = embed_all(ds.group1, basis, w, 10);
  const auto e2 = embed_all(ds.group2, basis, w, 10);
  const auto rep = hmp_test(make_group(e1), make_group(e2));
  MESSAGE("interval delta=2 single-run hmp p = " << rep.p_value);
  CHECK(rep.p_value < 0.05);
}

TEST_CASE("Benjamini-Hochberg") {
  const std::vector<double> p{0.01, 0.04, 0.03, 0.8};
  CHECK(bh_adjust(p, 0.1) == std::vector<std::size_t>{0, 1, 2});
  CHECK(bh_adjust(std::vector<double>(5, 1.0), 0.1).empty());
  CHECK(bh_adjust(std::vector<double>{0.05}, 0.1) == std::vector<std::size_t>{0});
  isw::Rng rng(20);
  std::vector<double> r(40);
  for (auto& v : r) v = std::pow(rng.uniform_open(), 3.0);
  std::size_t prev = 0;
  for (double q = 0.01; q < 0.99; q += 0.02) {
    const auto rej = bh_adjust(r, q);
    CHECK(rej.size() >= prev);
    prev = rej.size();
  }
  CHECK_THROWS_AS(bh_adjust(p, 0.0), InvalidArgument);
  CHECK_THROWS_AS(bh_adjust(p, 1.0), InvalidArgument);
}

TEST_CASE("make_group rejects mixed metadata") {
  const auto b1 = build_analytic_basis(DomainSpec::interval(1.0), 2);
  const auto b2 = build_analytic_basis(DomainSpec::interval(1.0), 3);
  const auto h = Histogram(DomainSpec::interval(1.0), {{0.5, 0}}, {1.0});
  std::vector<Embedding> es{embed(h, b1, SpectralWeight::heat(1), 4), embed(h, b2, SpectralWeight::heat(1), 4)};
  CHECK_THROWS(make_group(es));
}
