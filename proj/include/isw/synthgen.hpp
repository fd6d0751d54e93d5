#pragma once

// Synthetic meta-distributions: random functional curves on [0, 1] observed
// through multinomial counts, von Mises samples on the circle, and
// Mardia-Sutton samples on the cylinder.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "isw/histogram.hpp"
#include "isw/rng.hpp"
#include "isw/spectral.hpp"

namespace isw {

enum class Scenario { interval, circle, cylinder };

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& s);

struct ScenarioConfig {
  Scenario scenario = Scenario::interval;
  double delta = 0.0;  // curve offset (interval) or radians (circle, cylinder)
  std::size_t n1 = 60;
  std::size_t n2 = 40;
  // Bins per dimension. Ignored for the interval scenario, whose support is
  // the fixed design grid.
  std::size_t bins = 0;
  // Multinomial trials (interval) or random draws per sample. 0 = default.
  std::size_t draws_per_sample = 0;
  std::uint64_t seed = 0;
  // Cylinder only: add the second location draw mu0 to the conditional mean.
  bool cylinder_linear_offset = false;

  void validate() const;
  std::size_t effective_bins() const;
  std::size_t effective_draws() const;
};

// Domain the scenario's histograms live on.
DomainSpec scenario_domain(const ScenarioConfig& cfg);

namespace interval_model {
inline constexpr int kDesignPoints = 30;
inline constexpr std::size_t kTrials = 1000;
double mean_curve(double t);
// M = 3 (1 + sqrt 2 + sqrt 3); keeps the curves nonnegative.
double shift();
std::vector<double> design_points(int m = kDesignPoints);
// Normalized bin probabilities for given curve coefficients eps and offset.
std::vector<double> bin_probabilities(const std::vector<double>& t, double eps0, double eps1,
                                      double eps2, double offset);
}  // namespace interval_model

inline constexpr double kVonMisesKappa = 2.0;

double von_mises_density(double x, double mu, double kappa);

// Best-Fisher rejection sampler; result in [0, 2 pi).
double sample_von_mises(Rng& rng, double mu, double kappa);

// N(0, 1) restricted to [lo, hi] by resampling.
double truncated_normal(Rng& rng, double lo, double hi);

struct CylinderParams {
  double mu = 0.0;
  double mu0 = 0.0;
  double kappa = 2.0;
  double rho1 = 0.5;
  double rho2 = 0.5;
  double sigma = 1.0;
  bool linear_offset = false;
};

// Conditional mean and variance of X given Theta = theta.
double cylinder_conditional_mean(const CylinderParams& p, double theta);
double cylinder_conditional_variance(const CylinderParams& p);

// One histogram for `group` (1 or 2). Deterministic in the rng state.
Histogram gen_interval_histogram(int group, double delta, Rng& rng,
                                 std::size_t trials = interval_model::kTrials);
Histogram gen_vonmises_histogram(int group, double delta, Rng& rng, std::size_t bins = 72,
                                 std::size_t draws = 100);
Histogram gen_cylinder_histogram(int group, double delta, Rng& rng, std::size_t bins = 24,
                                 std::size_t draws = 500, bool linear_offset = false);

// Samples' location draws; exposed so tests can check the generator itself.
double draw_circle_center(int group, double delta, Rng& rng);

struct Dataset {
  std::vector<Histogram> group1;
  std::vector<Histogram> group2;
};

// n1 + n2 histograms; sample i uses stream derive_seed(seed, {i}).
Dataset generate_dataset(const ScenarioConfig& cfg);

}  // namespace isw
