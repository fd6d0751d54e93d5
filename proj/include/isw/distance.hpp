#pragma once

// Exact 1-D W2, intrinsic sliced W2 (exact per slice or via the embedding),
// the spectral point distance and the spectral-kernel MMD.

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "isw/histogram.hpp"
#include "isw/spectral.hpp"

namespace isw {

// W2 between two line histograms from the piecewise-constant quantile
// functions: merge both cumulative-weight breakpoint sets and integrate
// (F_a^{-1} - F_b^{-1})^2 exactly over the resulting partition of [0, 1].
double w2_line_exact(const LineHistogram& a, const LineHistogram& b);
double w2_squared_line_exact(const LineHistogram& a, const LineHistogram& b);

struct ExactSlices {};
struct EmbeddingMode {
  std::size_t dprime = 0;
};
using DistanceMode = std::variant<ExactSlices, EmbeddingMode>;

struct SliceTerm {
  std::size_t ell = 0;
  double eigenvalue = 0.0;
  double alpha = 0.0;
  double w2_squared = 0.0;
};

struct DistanceReport {
  double value = 0.0;
  DistanceMode mode;
  std::vector<SliceTerm> per_slice;  // filled for ExactSlices only
};

DistanceReport isw2(const Histogram& a, const Histogram& b, const SpectralBasis& basis,
                    const SpectralWeight& w, const DistanceMode& mode);

// sqrt(sum_ell alpha_ell (phi_ell(x) - phi_ell(y))^2).
double spectral_distance(const SpectralBasis& basis, const SpectralWeight& w, const Point& x,
                         const Point& y);

// sqrt(sum_ell alpha_ell (E_a[phi_ell] - E_b[phi_ell])^2).
double spectral_mmd(const Histogram& a, const Histogram& b, const SpectralBasis& basis,
                    const SpectralWeight& w);

// Symmetric matrix of pairwise ISW2 values (row-major, n x n, zero diagonal).
std::vector<double> distance_matrix(std::span<const Histogram> hs, const SpectralBasis& basis,
                                    const SpectralWeight& w, const DistanceMode& mode);

}  // namespace isw
