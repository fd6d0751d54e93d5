#pragma once

// Two-sample tests on embedded histogram collections: the unbiased T-hat
// statistic with a centered bootstrap null, Welch t-tests per coordinate
// combined by the harmonic mean p-value, and Benjamini-Hochberg FDR control.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "isw/histogram.hpp"
#include "isw/matrix.hpp"

namespace isw {

// One group of embedded histograms, one row per histogram.
struct SampleGroup {
  RowMatrix rows;
  std::vector<std::string> ids;
  EmbeddingMeta meta;

  std::size_t size() const noexcept { return rows.rows(); }
  std::size_t dimension() const noexcept { return rows.cols(); }
};

// Packs embeddings (which must share metadata) into a group.
SampleGroup make_group(std::span<const Embedding> es, std::vector<std::string> ids = {});

enum class TestMethod { boot, hmp };

std::string to_string(TestMethod m);
TestMethod test_method_from_string(const std::string& s);

struct TestReport {
  TestMethod method = TestMethod::hmp;
  double statistic = 0.0;  // T-hat (boot) or raw harmonic mean (hmp)
  double p_value = 1.0;
  std::vector<double> per_coordinate;  // hmp only
  std::size_t replicates = 0;          // boot only
  std::uint64_t seed = 0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::size_t dimension = 0;
  // Coordinates where both groups were constant (p set by the sentinel rule).
  std::size_t degenerate_coordinates = 0;
};

// sum_ij |X_i - Y_j|^2 / (N1 N2) - sum_{i != j} |X_i - X_j|^2 / (2 N1 (N1 - 1))
//   - sum_{i != j} |Y_i - Y_j|^2 / (2 N2 (N2 - 1)).
// Both groups need at least two rows and equal dimension.
double t_hat(const SampleGroup& g1, const SampleGroup& g2);
double t_hat(const RowMatrix& x, const RowMatrix& y);

// Same statistic through inner products: the squared norms cancel, leaving
// (|Sx|^2 - Qx) / (N1 (N1 - 1)) + (|Sy|^2 - Qy) / (N2 (N2 - 1)) - 2 <Sx, Sy> / (N1 N2)
// with S the row sums and Q the summed squared row norms. O((N1 + N2) D).
double t_hat_inner_product(const RowMatrix& x, const RowMatrix& y);

inline constexpr std::size_t kDefaultBootstrapReplicates = 1000;

// Centered bootstrap: both samples are shifted to the pooled midpoint
// (Xbar + Ybar) / 2, N1 and N2 rows are redrawn with replacement from the
// union, and p = (#{b : T_b >= T} + 1) / (B + 1). Replicate b draws from its
// own stream derive_seed(seed, {b}), so p does not depend on thread count.
TestReport bootstrap_test(const SampleGroup& g1, const SampleGroup& g2, std::size_t replicates,
                          std::uint64_t seed);
TestReport bootstrap_test(const RowMatrix& x, const RowMatrix& y, std::size_t replicates,
                          std::uint64_t seed);

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p_value = 1.0;
  bool degenerate = false;  // both samples constant
};

// Two-sided Welch t-test. A sample whose values span at most `tie_tolerance`
// is treated as constant. When both samples are constant the result is
// p = 1 for means within the tolerance and p = denorm_min otherwise (flagged
// degenerate).
WelchResult welch_t_test(std::span<const double> x, std::span<const double> y,
                         double tie_tolerance = 0.0);
double welch_t_pvalue(std::span<const double> x, std::span<const double> y,
                      double tie_tolerance = 0.0);
// hmp_test ties a coordinate whose spread is below this fraction of the
// largest absolute entry in its block (rounding noise in coordinates that are
// constant in exact arithmetic).
inline constexpr double kHmpTieTolerance = 1e-10;

// Upper tail P(Y >= y) of the stable(alpha=1, beta=1) law with scale pi/2 and
// (S0) location log(D) + 0.874367..., the limit of (1/D) sum 1/p_k for D
// independent uniform p-values.
double harmonic_mean_tail(double y, std::size_t count);

struct HarmonicMeanP {
  double raw = 1.0;      // D / sum(1 / p_k)
  double p_value = 1.0;  // tail probability of 1 / raw, clamped to (0, 1]
};

inline constexpr double kMinPValue = 1e-300;

// Harmonic mean p-value with the asymptotically exact correction. Inputs must
// lie in (0, 1]; they are clamped below at 1e-300.
HarmonicMeanP harmonic_mean_pvalue(std::span<const double> p);
double hmp_combine(std::span<const double> p);

// Welch test per embedding coordinate combined by hmp_combine.
TestReport hmp_test(const SampleGroup& g1, const SampleGroup& g2);
// Blocks are runs of `block_size` consecutive coordinates (D' for an
// embedding; the group overload uses its metadata).
TestReport hmp_test(const RowMatrix& x, const RowMatrix& y, std::size_t block_size = 1);

// Benjamini-Hochberg step-up rule. Returns rejected indices, ascending.
std::vector<std::size_t> bh_adjust(std::span<const double> p, double q);

}  // namespace isw
