#include "isw/inference.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "isw/error.hpp"
#include "isw/parallel.hpp"
#include "isw/rng.hpp"
#include "isw/simd/kernels.hpp"

namespace isw {
namespace {

using std::numbers::pi;

// 1 - Euler-Mascheroni + log(pi/2): S0 location offset of the limit law.
constexpr double kHmpLocation = 0.874367040387922;

void check_groups(const RowMatrix& x, const RowMatrix& y) {
  if (x.rows() < 2 || y.rows() < 2) {
    throw InvalidArgument("two-sample tests need at least two rows per group (got " +
                          std::to_string(x.rows()) + " and " + std::to_string(y.rows()) + ")");
  }
  if (x.cols() != y.cols()) throw InvalidArgument("groups have different embedding dimensions");
  if (x.cols() == 0) throw InvalidArgument("groups have zero-dimensional embeddings");
}

void check_meta(const SampleGroup& g1, const SampleGroup& g2) {
  if (!(g1.meta == g2.meta)) {
    throw BasisMismatch("groups were embedded with different bases or embedding parameters");
  }
}

double within_sum(const RowMatrix& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = i + 1; j < x.rows(); ++j) s += simd::squared_distance(x.row(i), x.row(j));
  }
  return 2.0 * s;  // ordered pairs i != j
}

struct Moments {
  std::vector<double> sum;
  double sq = 0.0;
};

// Assembles T-hat from row sums and summed squared norms.
double t_from_moments(const Moments& x, std::size_t n1, const Moments& y, std::size_t n2) {
  const double a = static_cast<double>(n1);
  const double b = static_cast<double>(n2);
  const double xx = simd::dot(x.sum, x.sum) - x.sq;
  const double yy = simd::dot(y.sum, y.sum) - y.sq;
  const double xy = simd::dot(x.sum, y.sum);
  return xx / (a * (a - 1.0)) + yy / (b * (b - 1.0)) - 2.0 * xy / (a * b);
}

Moments moments(const RowMatrix& x) {
  Moments m;
  m.sum.assign(x.cols(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    simd::accumulate(m.sum, x.row(i));
    m.sq += simd::dot(x.row(i), x.row(i));
  }
  return m;
}

struct SummaryStats {
  double mean = 0.0;
  double var = 0.0;
};

// Sums over sorted values so the result ignores input order bit-for-bit.
// Samples spanning at most `tie` are constant: zero variance, mean = smallest value.
SummaryStats summarize(std::span<const double> v, double tie) {
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  if (s.back() - s.front() <= tie) return {s.front(), 0.0};
  const double n = static_cast<double>(s.size());
  double sum = 0.0;
  for (double x : s) sum += x;
  const double mean = sum / n;
  double ss = 0.0;
  for (double x : s) ss += (x - mean) * (x - mean);
  return {mean, ss / (n - 1.0)};
}

// log V(theta) at theta = pi/2 - u for the alpha = 1, beta = 1 stable law.
double log_v(double u) {
  const double s = std::sin(u);
  return std::log(2.0 / pi) + std::log((pi - u) / s) + (pi - u) * std::cos(u) / s;
}

// P(Z > x) for Z ~ S(1, 1, 0) (Nolan's integral representation, with the
// substitution u = pi/2 - theta so the steep end sits near u = 0).
double stable_beta1_upper_tail(double x) {
  const double shift = -pi * x / 2.0;
  auto integrand = [shift](double u) {
    const double lg = shift + log_v(u);
    if (lg > 700.0) return 1.0;
    return -std::expm1(-std::exp(lg));
  };

  // g(u) = exp(shift + log V(u)) decreases in u. Solve log g(u) = level by
  // bisection on log u; returns 0 if log g stays above level on (0, pi).
  auto solve = [shift](double level) {
    if (shift + log_v(pi * (1.0 - 1e-15)) >= level) return pi;
    double lo = std::log(1e-300);
    double hi = std::log(pi);
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (shift + log_v(std::exp(mid)) > level) lo = mid; else hi = mid;
    }
    return std::exp(lo);
  };
  // Below u_sat the integrand equals 1 to double precision (exp(-40) < 1e-17).
  const double u_sat = solve(std::log(40.0));
  if (u_sat >= pi) return 1.0;
  const double ustar = solve(0.0);

  std::vector<double> cuts{u_sat};
  for (double f : {0.25, 0.5, 1.0}) {
    if (ustar * f > u_sat && ustar * f < pi) cuts.push_back(ustar * f);
  }
  for (double c = 2.0 * ustar; c < pi; c *= 2.0) cuts.push_back(c);
  cuts.push_back(pi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  double total = u_sat;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double err = 0.0;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        integrand, cuts[i], cuts[i + 1], 10, 1e-10, &err);
  }
  return total / pi;
}

}  // namespace

SampleGroup make_group(std::span<const Embedding> es, std::vector<std::string> ids) {
  if (es.empty()) throw InvalidArgument("cannot build a sample group from no embeddings");
  if (!ids.empty() && ids.size() != es.size()) {
    throw InvalidArgument("sample group id count does not match embedding count");
  }
  const EmbeddingMeta& meta = es.front().meta;
  const std::size_t d = es.front().values.size();
  RowMatrix m(es.size(), d);
  for (std::size_t i = 0; i < es.size(); ++i) {
    if (!(es[i].meta == meta) || es[i].values.size() != d) {
      throw BasisMismatch("embeddings in a group must share basis and embedding parameters");
    }
    std::copy(es[i].values.begin(), es[i].values.end(), m.row(i).begin());
  }
  if (ids.empty()) {
    for (std::size_t i = 0; i < es.size(); ++i) ids.push_back(std::to_string(i));
  }
  return {std::move(m), std::move(ids), meta};
}

std::string to_string(TestMethod m) { return m == TestMethod::boot ? "boot" : "hmp"; }

TestMethod test_method_from_string(const std::string& s) {
  if (s == "boot") return TestMethod::boot;
  if (s == "hmp") return TestMethod::hmp;
  throw InvalidArgument("unknown test method '" + s + "' (expected boot or hmp)");
}

double t_hat(const RowMatrix& x, const RowMatrix& y) {
  check_groups(x, y);
  const double n1 = static_cast<double>(x.rows());
  const double n2 = static_cast<double>(y.rows());
  double cross = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < y.rows(); ++j) cross += simd::squared_distance(x.row(i), y.row(j));
  }
  return cross / (n1 * n2) - within_sum(x) / (2.0 * n1 * (n1 - 1.0)) -
         within_sum(y) / (2.0 * n2 * (n2 - 1.0));
}

double t_hat(const SampleGroup& g1, const SampleGroup& g2) {
  check_meta(g1, g2);
  return t_hat(g1.rows, g2.rows);
}

double t_hat_inner_product(const RowMatrix& x, const RowMatrix& y) {
  check_groups(x, y);
  return t_from_moments(moments(x), x.rows(), moments(y), y.rows());
}

TestReport bootstrap_test(const RowMatrix& x, const RowMatrix& y, std::size_t replicates,
                          std::uint64_t seed) {
  check_groups(x, y);
  if (replicates < 1) throw InvalidArgument("bootstrap needs at least one replicate");
  const std::size_t n1 = x.rows();
  const std::size_t n2 = y.rows();
  const std::size_t d = x.cols();

  // Pooled sample with both groups shifted to (Xbar + Ybar) / 2.
  const Moments mx = moments(x);
  const Moments my = moments(y);
  std::vector<double> shift_x(d);
  std::vector<double> shift_y(d);
  for (std::size_t k = 0; k < d; ++k) {
    const double xbar = mx.sum[k] / static_cast<double>(n1);
    const double ybar = my.sum[k] / static_cast<double>(n2);
    const double mid = (xbar + ybar) / 2.0;
    shift_x[k] = mid - xbar;
    shift_y[k] = mid - ybar;
  }
  RowMatrix pooled(n1 + n2, d);
  std::vector<double> sq(n1 + n2);
  for (std::size_t i = 0; i < n1 + n2; ++i) {
    auto dst = pooled.row(i);
    const auto src = i < n1 ? x.row(i) : y.row(i - n1);
    const auto& shift = i < n1 ? shift_x : shift_y;
    for (std::size_t k = 0; k < d; ++k) dst[k] = src[k] + shift[k];
    sq[i] = simd::dot(dst, dst);
  }

  const double observed = t_from_moments(mx, n1, my, n2);
  std::vector<double> null_stats(replicates);
  parallel_for(replicates, [&](std::size_t b) {
    Rng rng(derive_seed(seed, {b}));
    auto draw = [&](std::size_t count) {
      Moments m;
      m.sum.assign(d, 0.0);
      for (std::size_t i = 0; i < count; ++i) {
        const auto r = static_cast<std::size_t>(rng.below(n1 + n2));
        simd::accumulate(m.sum, pooled.row(r));
        m.sq += sq[r];
      }
      return m;
    };
    const Moments bx = draw(n1);
    const Moments by = draw(n2);
    null_stats[b] = t_from_moments(bx, n1, by, n2);
  });

  const auto exceed = static_cast<std::size_t>(
      std::count_if(null_stats.begin(), null_stats.end(), [&](double t) { return t >= observed; }));

  TestReport r;
  r.method = TestMethod::boot;
  r.statistic = observed;
  r.p_value = static_cast<double>(exceed + 1) / static_cast<double>(replicates + 1);
  r.replicates = replicates;
  r.seed = seed;
  r.n1 = n1;
  r.n2 = n2;
  r.dimension = d;
  return r;
}

TestReport bootstrap_test(const SampleGroup& g1, const SampleGroup& g2, std::size_t replicates,
                          std::uint64_t seed) {
  check_meta(g1, g2);
  return bootstrap_test(g1.rows, g2.rows, replicates, seed);
}

WelchResult welch_t_test(std::span<const double> x, std::span<const double> y, double tie_tolerance) {
  if (x.size() < 2 || y.size() < 2) throw InvalidArgument("Welch test needs two values per sample");
  if (!(tie_tolerance >= 0.0)) throw InvalidArgument("tie tolerance must be >= 0");
  const SummaryStats sx = summarize(x, tie_tolerance);
  const SummaryStats sy = summarize(y, tie_tolerance);
  const double n1 = static_cast<double>(x.size());
  const double n2 = static_cast<double>(y.size());
  const double v1 = sx.var / n1;
  const double v2 = sy.var / n2;
  const double se2 = v1 + v2;

  WelchResult r;
  if (!(se2 > 0.0)) {
    const bool same = std::abs(sx.mean - sy.mean) <= tie_tolerance;
    r.degenerate = true;
    r.p_value = same ? 1.0 : std::numeric_limits<double>::denorm_min();
    r.t = same ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), sx.mean - sy.mean);
    return r;
  }
  r.t = (sx.mean - sy.mean) / std::sqrt(se2);
  r.df = se2 * se2 / (v1 * v1 / (n1 - 1.0) + v2 * v2 / (n2 - 1.0));
  // Two-sided tail of Student t: I_{df / (df + t^2)}(df / 2, 1 / 2).
  const double z = r.df / (r.df + r.t * r.t);
  double p = z >= 1.0 ? 1.0 : boost::math::ibeta(r.df / 2.0, 0.5, z);
  r.p_value = std::clamp(p, std::numeric_limits<double>::denorm_min(), 1.0);
  return r;
}

double welch_t_pvalue(std::span<const double> x, std::span<const double> y, double tie_tolerance) {
  return welch_t_test(x, y, tie_tolerance).p_value;
}

double harmonic_mean_tail(double y, std::size_t count) {
  if (count < 1) throw InvalidArgument("harmonic mean tail needs D >= 1");
  if (std::isinf(y)) return 0.0;
  const double x = (y - std::log(static_cast<double>(count)) - kHmpLocation) / (pi / 2.0);
  return std::clamp(stable_beta1_upper_tail(x), 0.0, 1.0);
}

HarmonicMeanP harmonic_mean_pvalue(std::span<const double> p) {
  if (p.empty()) throw InvalidArgument("harmonic mean p-value needs at least one p-value");
  double inv_sum = 0.0;
  for (double v : p) {
    if (!(v > 0.0 && v <= 1.0)) throw InvalidArgument("p-values must lie in (0, 1]");
    inv_sum += 1.0 / std::max(v, kMinPValue);
  }
  HarmonicMeanP r;
  const double d = static_cast<double>(p.size());
  r.raw = d / inv_sum;
  const double tail = harmonic_mean_tail(inv_sum / d, p.size());
  r.p_value = std::clamp(tail, std::numeric_limits<double>::min(), 1.0);
  return r;
}

double hmp_combine(std::span<const double> p) { return harmonic_mean_pvalue(p).p_value; }

TestReport hmp_test(const RowMatrix& x, const RowMatrix& y, std::size_t block_size) {
  check_groups(x, y);
  if (block_size == 0 || x.cols() % block_size != 0) {
    throw InvalidArgument("block size must divide the embedding dimension");
  }
  const std::size_t d = x.cols();
  TestReport r;
  r.method = TestMethod::hmp;
  r.n1 = x.rows();
  r.n2 = y.rows();
  r.dimension = d;
  r.per_coordinate.resize(d);
  std::vector<double> tie(d / block_size, 0.0);
  for (const RowMatrix* m : {&x, &y}) {
    for (std::size_t i = 0; i < m->rows(); ++i) {
      for (std::size_t k = 0; k < d; ++k) {
        tie[k / block_size] = std::max(tie[k / block_size], std::abs((*m)(i, k)));
      }
    }
  }
  for (double& t : tie) t *= kHmpTieTolerance;
  std::vector<char> degenerate(d, 0);
  parallel_for(d, [&](std::size_t k) {
    std::vector<double> cx(x.rows());
    std::vector<double> cy(y.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) cx[i] = x(i, k);
    for (std::size_t i = 0; i < y.rows(); ++i) cy[i] = y(i, k);
    const WelchResult w = welch_t_test(cx, cy, tie[k / block_size]);
    r.per_coordinate[k] = w.p_value;
    degenerate[k] = w.degenerate;
  });
  r.degenerate_coordinates = static_cast<std::size_t>(std::count(degenerate.begin(), degenerate.end(), 1));
  const HarmonicMeanP h = harmonic_mean_pvalue(r.per_coordinate);
  r.statistic = h.raw;
  r.p_value = h.p_value;
  return r;
}

TestReport hmp_test(const SampleGroup& g1, const SampleGroup& g2) {
  check_meta(g1, g2);
  return hmp_test(g1.rows, g2.rows, g1.meta.dprime > 0 ? g1.meta.dprime : 1);
}

std::vector<std::size_t> bh_adjust(std::span<const double> p, double q) {
  if (!(q > 0.0 && q < 1.0)) throw InvalidArgument("FDR level q must lie in (0, 1)");
  for (double v : p) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("p-values must lie in [0, 1]");
  }
  const std::size_t m = p.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });

  std::size_t k = 0;  // number of rejections
  for (std::size_t r = m; r >= 1; --r) {
    if (p[order[r - 1]] <= static_cast<double>(r) * q / static_cast<double>(m)) {
      k = r;
      break;
    }
  }
  std::vector<std::size_t> rejected;
  if (k == 0) return rejected;
  const double cutoff = p[order[k - 1]];
  for (std::size_t i = 0; i < m; ++i) {
    if (p[i] <= cutoff) rejected.push_back(i);
  }
  return rejected;
}

}  // namespace isw
