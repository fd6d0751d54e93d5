#include "isw/distance.hpp"

#include <algorithm>
#include <cmath>

#include "isw/error.hpp"
#include "isw/parallel.hpp"
#include "isw/simd/kernels.hpp"

namespace isw {
namespace {

void check_same_domain(const Histogram& a, const Histogram& b, const SpectralBasis& basis) {
  const auto fp = basis.domain().fingerprint();
  if (a.domain_fingerprint() != fp || b.domain_fingerprint() != fp) {
    throw BasisMismatch("histograms and basis are defined on different domains");
  }
}

double weighted_mean(const LineHistogram& lh) {
  double m = 0.0;
  for (std::size_t i = 0; i < lh.positions.size(); ++i) m += lh.weights[i] * lh.positions[i];
  return m;
}

}  // namespace

double w2_squared_line_exact(const LineHistogram& a, const LineHistogram& b) {
  const QuantileFunction qa(a);
  const QuantileFunction qb(b);
  const auto xa = qa.sorted_positions();
  const auto ca = qa.cumulative();
  const auto xb = qb.sorted_positions();
  const auto cb = qb.cumulative();

  // On (prev, next) both quantile functions are constant: F_a^{-1} = xa[i]
  // while ca[i-1] <= s < ca[i] (strict > rule), likewise for b.
  double sum = 0.0;
  double prev = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  const std::size_t na = xa.size();
  const std::size_t nb = xb.size();
  while (prev < 1.0) {
    const double ea = i + 1 < na ? ca[i] : 1.0;
    const double eb = j + 1 < nb ? cb[j] : 1.0;
    const double next = std::min(std::min(ea, eb), 1.0);
    if (next > prev) {
      const double d = xa[i] - xb[j];
      sum += (next - prev) * d * d;
      prev = next;
    }
    const bool last_a = i + 1 >= na;
    const bool last_b = j + 1 >= nb;
    if (last_a && last_b) break;
    if (!last_a && ea <= next) ++i;
    if (!last_b && eb <= next) ++j;
  }
  return sum;
}

double w2_line_exact(const LineHistogram& a, const LineHistogram& b) {
  return std::sqrt(w2_squared_line_exact(a, b));
}

DistanceReport isw2(const Histogram& a, const Histogram& b, const SpectralBasis& basis,
                    const SpectralWeight& w, const DistanceMode& mode) {
  check_same_domain(a, b, basis);
  if (basis.size() < 1) throw InvalidArgument("isw2 needs a basis with L >= 1");
  DistanceReport r;
  r.mode = mode;
  if (const auto* em = std::get_if<EmbeddingMode>(&mode)) {
    const Embedding ea = embed(a, basis, w, em->dprime);
    const Embedding eb = embed(b, basis, w, em->dprime);
    r.value = std::sqrt(simd::squared_distance(ea.values, eb.values));
    return r;
  }
  double total = 0.0;
  r.per_slice.reserve(basis.size());
  for (std::size_t ell = 1; ell <= basis.size(); ++ell) {
    const double lam = basis.eigenvalue(ell);
    const double alpha = w(lam);
    const double w2sq = w2_squared_line_exact(pushforward(a, basis, ell), pushforward(b, basis, ell));
    r.per_slice.push_back({ell, lam, alpha, w2sq});
    total += alpha * w2sq;
  }
  r.value = std::sqrt(total);
  return r;
}

double spectral_distance(const SpectralBasis& basis, const SpectralWeight& w, const Point& x,
                         const Point& y) {
  double total = 0.0;
  for (std::size_t ell = 1; ell <= basis.size(); ++ell) {
    const double d = basis.eval(ell, x) - basis.eval(ell, y);
    total += w(basis.eigenvalue(ell)) * d * d;
  }
  return std::sqrt(total);
}

double spectral_mmd(const Histogram& a, const Histogram& b, const SpectralBasis& basis,
                    const SpectralWeight& w) {
  check_same_domain(a, b, basis);
  double total = 0.0;
  for (std::size_t ell = 1; ell <= basis.size(); ++ell) {
    const double d = weighted_mean(pushforward(a, basis, ell)) - weighted_mean(pushforward(b, basis, ell));
    total += w(basis.eigenvalue(ell)) * d * d;
  }
  return std::sqrt(total);
}

std::vector<double> distance_matrix(std::span<const Histogram> hs, const SpectralBasis& basis,
                                    const SpectralWeight& w, const DistanceMode& mode) {
  const std::size_t n = hs.size();
  std::vector<double> d(n * n, 0.0);
  if (const auto* em = std::get_if<EmbeddingMode>(&mode)) {
    const auto es = embed_all(hs, basis, w, em->dprime);
    parallel_for(n, [&](std::size_t i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        d[i * n + j] = std::sqrt(simd::squared_distance(es[i].values, es[j].values));
      }
    });
  } else {
    parallel_for(n, [&](std::size_t i) {
      for (std::size_t j = i + 1; j < n; ++j) d[i * n + j] = isw2(hs[i], hs[j], basis, w, mode).value;
    });
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) d[j * n + i] = d[i * n + j];
  }
  return d;
}

}  // namespace isw
