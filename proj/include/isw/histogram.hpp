#pragma once

// Histograms on a domain, their eigenfunction pushforwards, quantile
// functions, and the finite-dimensional quantile embedding.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "isw/spectral.hpp"

namespace isw {

// mu = sum_a w_a delta_{x_a} on a fixed domain.
class Histogram {
 public:
  // Weights must be >= 0 and sum to 1 within 1e-6; they are renormalized to
  // sum to 1 exactly (up to rounding). Throws InvalidArgument otherwise.
  Histogram(const DomainSpec& domain, std::vector<Point> support, std::vector<double> weights);

  // Accepts any nonnegative weights with a positive total (e.g. counts).
  static Histogram from_counts(const DomainSpec& domain, std::vector<Point> support,
                               std::vector<double> counts);

  std::span<const Point> support() const noexcept { return support_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return support_.size(); }
  std::uint64_t domain_fingerprint() const noexcept { return domain_fp_; }

 private:
  Histogram() = default;

  std::vector<Point> support_;
  std::vector<double> weights_;
  std::uint64_t domain_fp_ = 0;
};

// Histogram on the real line. Positions need not be sorted or distinct.
struct LineHistogram {
  std::vector<double> positions;
  std::vector<double> weights;
};

// phi_ell # mu. Positions are phi_ell(x_a) in input order; weights copied.
LineHistogram pushforward(const Histogram& h, const SpectralBasis& basis, std::size_t ell);

// Atoms sorted by position with cumulative weights; evaluates the quantile
// function F^{-1}(s) = min{ x_(a) : sum_{b<=a} w_(b) > s }.
class QuantileFunction {
 public:
  explicit QuantileFunction(const LineHistogram& lh);

  // s in [0, 1). Throws InvalidArgument otherwise.
  double operator()(double s) const;

  std::span<const double> sorted_positions() const noexcept { return positions_; }
  std::span<const double> cumulative() const noexcept { return cumulative_; }

 private:
  std::vector<double> positions_;
  std::vector<double> cumulative_;
};

double quantile(const LineHistogram& lh, double s);

// Knots s_k = k / (dprime + 1), k = 1..dprime.
std::vector<double> embedding_knots(std::size_t dprime);

// (1/sqrt(D')) [F^{-1}(s_1), ..., F^{-1}(s_D')].
std::vector<double> embed_line(const LineHistogram& lh, std::size_t dprime);

struct EmbeddingMeta {
  std::size_t num_slices = 0;  // L
  std::size_t dprime = 0;      // D'
  std::string weight;          // SpectralWeight::name()
  std::uint64_t basis_fingerprint = 0;

  std::size_t dimension() const noexcept { return num_slices * dprime; }
  friend bool operator==(const EmbeddingMeta&, const EmbeddingMeta&) = default;
};

// eta_D(mu): L contiguous blocks of D' entries; block ell is
// sqrt(alpha(lambda_ell)) * embed_line(phi_ell # mu, D').
struct Embedding {
  std::vector<double> values;
  EmbeddingMeta meta;
};

Embedding embed(const Histogram& h, const SpectralBasis& basis, const SpectralWeight& w,
                std::size_t dprime);

// Embeds a collection in parallel; output order follows input order.
std::vector<Embedding> embed_all(std::span<const Histogram> hs, const SpectralBasis& basis,
                                 const SpectralWeight& w, std::size_t dprime);

// Hex rendering used in sidecars and basis files.
std::string fingerprint_hex(std::uint64_t fp);
std::uint64_t fingerprint_from_hex(const std::string& hex);

}  // namespace isw
