#pragma once
// Test helpers: random inputs and reference implementations that share no
// code with the library.
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <utility>
#include <vector>

#include "isw/histogram.hpp"
#include "isw/matrix.hpp"
#include "isw/rng.hpp"
#include "isw/spectral.hpp"

namespace testing {

inline constexpr double kPi = 3.14159265358979323846;

inline std::vector<double> random_weights(isw::Rng& rng, std::size_t n) {
  std::vector<double> w(n);
  for (auto& v : w) v = 0.05 + rng.uniform();
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& v : w) v /= s;
  return w;
}

inline isw::Histogram random_histogram(const isw::DomainSpec& d, isw::Rng& rng, std::size_t atoms) {
  std::vector<isw::Point> pts(atoms);
  for (auto& p : pts) {
    if (d.is_graph()) {
      p.c1 = static_cast<double>(rng.below(d.node_count()));
    } else {
      p.c1 = rng.uniform() * d.length1();
      if (d.dimension() == 2) p.c2 = rng.uniform() * d.length2();
    }
  }
  return isw::Histogram(d, std::move(pts), random_weights(rng, atoms));
}

inline isw::Histogram dirac(const isw::DomainSpec& d, isw::Point p) {
  return isw::Histogram(d, {p}, {1.0});
}

// Random spanning tree plus extra random edges; weights in [0.5, 1.5).
inline isw::DomainSpec random_connected_graph(isw::Rng& rng, std::size_t n, std::size_t extra) {
  std::vector<isw::Edge> edges;
  for (std::size_t v = 1; v < n; ++v) edges.push_back({rng.below(v), v, 0.5 + rng.uniform()});
  for (std::size_t k = 0; k < extra; ++k) {
    const std::size_t a = rng.below(n);
    const std::size_t b = rng.below(n);
    if (a != b) edges.push_back({a, b, 0.5 + rng.uniform()});
  }
  return isw::DomainSpec::graph(n, std::move(edges));
}

inline isw::LineHistogram random_line(isw::Rng& rng, std::size_t atoms, double lo = -2.0, double hi = 2.0) {
  isw::LineHistogram lh;
  for (std::size_t a = 0; a < atoms; ++a) lh.positions.push_back(rng.uniform(lo, hi));
  lh.weights = random_weights(rng, atoms);
  return lh;
}

// F^{-1}(s) = min{x_(a) : cumulative weight through x_(a) > s}, by brute force.
inline double oracle_quantile(const isw::LineHistogram& lh, double s) {
  std::vector<std::pair<double, double>> atoms;
  for (std::size_t a = 0; a < lh.positions.size(); ++a) atoms.emplace_back(lh.positions[a], lh.weights[a]);
  std::sort(atoms.begin(), atoms.end());
  double cum = 0.0;
  for (const auto& [x, w] : atoms) {
    cum += w;
    if (cum > s) return x;
  }
  return atoms.back().first;
}

// Midpoint Riemann sum of (F_a^{-1} - F_b^{-1})^2 on an n-point grid, using
// a monotone sweep over the sorted atoms.
inline double oracle_w2_grid(const isw::LineHistogram& a, const isw::LineHistogram& b, std::size_t n) {
  auto sorted = [](const isw::LineHistogram& h) {
    std::vector<std::pair<double, double>> v;
    for (std::size_t i = 0; i < h.positions.size(); ++i) v.emplace_back(h.positions[i], h.weights[i]);
    std::sort(v.begin(), v.end());
    return v;
  };
  const auto sa = sorted(a);
  const auto sb = sorted(b);
  std::size_t ia = 0, ib = 0;
  double ca = sa[0].second, cb = sb[0].second;
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double s = (static_cast<double>(k) + 0.5) / static_cast<double>(n);
    while (ca <= s && ia + 1 < sa.size()) ca += sa[++ia].second;
    while (cb <= s && ib + 1 < sb.size()) cb += sb[++ib].second;
    const double d = sa[ia].first - sb[ib].first;
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(n));
}

// Adaptive Simpson quadrature.
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol, int depth = 50) {
  std::function<double(double, double, double, double, double, double, double, int)> rec =
      [&](double lo, double hi, double flo, double fmid, double fhi, double whole, double eps, int d) {
        const double mid = 0.5 * (lo + hi);
        const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
        const double flm = f(lm), frm = f(rm);
        const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
        const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
        if (d <= 0 || std::abs(left + right - whole) <= 15.0 * eps) {
          return left + right + (left + right - whole) / 15.0;
        }
        return rec(lo, mid, flo, flm, fmid, left, eps / 2.0, d - 1) +
               rec(mid, hi, fmid, frm, fhi, right, eps / 2.0, d - 1);
      };
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return rec(a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, depth);
}

// Two-sided Student-t tail P(|T| >= |t|) by integrating the density over [0, |t|].
inline double oracle_t_two_sided(double t, double df) {
  const double logc = std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0) - 0.5 * std::log(df * kPi);
  auto density = [&](double x) { return std::exp(logc - (df + 1.0) / 2.0 * std::log1p(x * x / df)); };
  const double central = simpson(density, 0.0, std::abs(t), 1e-15);
  return 1.0 - 2.0 * central;
}

// Direct double-sum form of the unbiased statistic.
inline double oracle_t_hat(const isw::RowMatrix& x, const isw::RowMatrix& y) {
  auto d2 = [](std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return s;
  };
  const double n1 = static_cast<double>(x.rows()), n2 = static_cast<double>(y.rows());
  double cross = 0.0, wx = 0.0, wy = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < y.rows(); ++j) cross += d2(x.row(i), y.row(j));
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.rows(); ++j)
      if (i != j) wx += d2(x.row(i), x.row(j));
  for (std::size_t i = 0; i < y.rows(); ++i)
    for (std::size_t j = 0; j < y.rows(); ++j)
      if (i != j) wy += d2(y.row(i), y.row(j));
  return cross / (n1 * n2) - wx / (2.0 * n1 * (n1 - 1.0)) - wy / (2.0 * n2 * (n2 - 1.0));
}

inline isw::RowMatrix random_matrix(isw::Rng& rng, std::size_t rows, std::size_t cols, double mean = 0.0) {
  isw::RowMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = rng.normal(mean, 1.0);
  return m;
}

// One-sample KS statistic against Uniform(0, 1).
inline double ks_uniform(std::vector<double> p) {
  std::sort(p.begin(), p.end());
  const double n = static_cast<double>(p.size());
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - p[i], p[i] - static_cast<double>(i) / n});
  }
  return d;
}

// Two-sample KS statistic and its asymptotic p-value (Kolmogorov series).
inline std::pair<double, double> ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  const double ne = static_cast<double>(a.size()) * b.size() / (a.size() + b.size());
  const double lam = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) p += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lam * lam);
  return {d, std::clamp(p, 0.0, 1.0)};
}

}  // namespace testing
