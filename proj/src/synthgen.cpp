#include "isw/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>

#include "isw/error.hpp"
#include "isw/parallel.hpp"

namespace isw {
namespace {

using std::numbers::pi;
constexpr double kTwoPi = 2.0 * pi;

std::size_t bin_of(double v, double length, std::size_t bins) {
  auto b = static_cast<long long>(std::floor(v / length * static_cast<double>(bins)));
  return static_cast<std::size_t>(std::clamp<long long>(b, 0, static_cast<long long>(bins) - 1));
}

double bin_center(std::size_t k, double length, std::size_t bins) {
  return (static_cast<double>(k) + 0.5) * length / static_cast<double>(bins);
}

double wrap_angle(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

}  // namespace

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::interval: return "interval";
    case Scenario::circle: return "circle";
    case Scenario::cylinder: return "cylinder";
  }
  return "unknown";
}

Scenario scenario_from_string(const std::string& s) {
  for (auto k : {Scenario::interval, Scenario::circle, Scenario::cylinder}) {
    if (to_string(k) == s) return k;
  }
  throw InvalidArgument("unknown scenario '" + s + "' (expected interval, circle or cylinder)");
}

void ScenarioConfig::validate() const {
  if (n1 < 2 || n2 < 2) throw InvalidArgument("scenario group sizes must be at least 2");
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw InvalidArgument("scenario delta must be >= 0");
  if (bins == 1) throw InvalidArgument("scenario needs at least 2 bins");
}

std::size_t ScenarioConfig::effective_bins() const {
  switch (scenario) {
    case Scenario::interval: return interval_model::kDesignPoints;
    case Scenario::circle: return bins ? bins : 72;
    case Scenario::cylinder: return bins ? bins : 24;
  }
  return bins;
}

std::size_t ScenarioConfig::effective_draws() const {
  if (draws_per_sample) return draws_per_sample;
  switch (scenario) {
    case Scenario::interval: return interval_model::kTrials;
    case Scenario::circle: return 100;
    case Scenario::cylinder: return 500;
  }
  return 0;
}

DomainSpec scenario_domain(const ScenarioConfig& cfg) {
  switch (cfg.scenario) {
    case Scenario::interval: return DomainSpec::interval(1.0);
    case Scenario::circle: return DomainSpec::circle(kTwoPi);
    case Scenario::cylinder: return DomainSpec::cylinder(kTwoPi, kTwoPi);
  }
  throw InvalidArgument("unknown scenario");
}

namespace interval_model {

double mean_curve(double t) {
  return 1.2 + 2.3 * std::cos(2.0 * pi * t) + 4.2 * std::sin(2.0 * pi * t);
}

double shift() { return 3.0 * (1.0 + std::sqrt(2.0) + std::sqrt(3.0)); }

std::vector<double> design_points(int m) {
  std::vector<double> t(static_cast<std::size_t>(m));
  for (int j = 1; j <= m; ++j) t[static_cast<std::size_t>(j - 1)] = static_cast<double>(j) / (m + 1);
  return t;
}

std::vector<double> bin_probabilities(const std::vector<double>& t, double eps0, double eps1,
                                      double eps2, double offset) {
  std::vector<double> p(t.size());
  double total = 0.0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    const double c = std::cos(2.0 * pi * t[j]);
    const double s = std::sin(2.0 * pi * t[j]);
    const double noise = eps0 + std::sqrt(2.0) * eps1 * c + std::sqrt(3.0) * eps2 * s;
    p[j] = std::max(0.0, mean_curve(t[j]) + noise + offset + shift());
    total += p[j];
  }
  if (!(total > 0.0)) throw ComputationError("interval curve is nonpositive everywhere");
  for (double& v : p) v /= total;
  return p;
}

}  // namespace interval_model

double von_mises_density(double x, double mu, double kappa) {
  return std::exp(kappa * std::cos(x - mu)) / (kTwoPi * std::cyl_bessel_i(0.0, kappa));
}

double sample_von_mises(Rng& rng, double mu, double kappa) {
  if (kappa < 1e-8) return wrap_angle(kTwoPi * rng.uniform());
  const double tau = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
  const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * kappa);
  const double r = (1.0 + rho * rho) / (2.0 * rho);
  double f = 0.0;
  for (;;) {
    const double z = std::cos(pi * rng.uniform());
    f = (1.0 + r * z) / (r + z);
    const double c = kappa * (r - f);
    const double u2 = rng.uniform_open();
    if (c * (2.0 - c) - u2 > 0.0) break;
    if (std::log(c / u2) + 1.0 - c >= 0.0) break;
  }
  const double angle = std::acos(std::clamp(f, -1.0, 1.0));
  const double theta = rng.uniform() < 0.5 ? mu - angle : mu + angle;
  return wrap_angle(theta);
}

double truncated_normal(Rng& rng, double lo, double hi) {
  for (;;) {
    const double z = rng.normal();
    if (z >= lo && z <= hi) return z;
  }
}

double cylinder_conditional_mean(const CylinderParams& p, double theta) {
  const double bracket = p.rho1 * (std::cos(theta) - std::cos(p.mu)) +
                         p.rho2 * (std::sin(theta) - std::sin(p.mu));
  double m = p.mu + std::sqrt(p.kappa) * p.sigma * bracket;
  if (p.linear_offset) m += p.mu0;
  return m;
}

double cylinder_conditional_variance(const CylinderParams& p) {
  const double rho_sq = p.rho1 * p.rho1 + p.rho2 * p.rho2;
  return p.sigma * p.sigma * (1.0 - rho_sq);
}

Histogram gen_interval_histogram(int group, double delta, Rng& rng, std::size_t trials) {
  if (trials < 1) throw InvalidArgument("interval histogram needs at least one trial");
  const double eps0 = truncated_normal(rng, -3.0, 3.0);
  const double eps1 = truncated_normal(rng, -3.0, 3.0);
  const double eps2 = truncated_normal(rng, -3.0, 3.0);
  const auto t = interval_model::design_points();
  const auto prob = interval_model::bin_probabilities(t, eps0, eps1, eps2, group == 2 ? delta : 0.0);

  std::vector<double> cdf(prob.size());
  std::partial_sum(prob.begin(), prob.end(), cdf.begin());
  std::vector<double> counts(prob.size(), 0.0);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const double u = rng.uniform() * cdf.back();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    counts[static_cast<std::size_t>(it - cdf.begin())] += 1.0;
  }
  std::vector<Point> support;
  support.reserve(t.size());
  for (double tj : t) support.push_back({tj, 0.0});
  return Histogram::from_counts(DomainSpec::interval(1.0), std::move(support), std::move(counts));
}

double draw_circle_center(int group, double delta, Rng& rng) {
  return rng.normal(group == 2 ? delta : 0.0, 0.1);
}

Histogram gen_vonmises_histogram(int group, double delta, Rng& rng, std::size_t bins,
                                 std::size_t draws) {
  if (bins < 2 || draws < 1) throw InvalidArgument("von Mises histogram needs bins >= 2, draws >= 1");
  const double center = draw_circle_center(group, delta, rng);
  std::vector<double> counts(bins, 0.0);
  for (std::size_t i = 0; i < draws; ++i) {
    counts[bin_of(sample_von_mises(rng, center, kVonMisesKappa), kTwoPi, bins)] += 1.0;
  }
  std::vector<Point> support;
  std::vector<double> weights;
  for (std::size_t k = 0; k < bins; ++k) {
    if (counts[k] == 0.0) continue;
    support.push_back({bin_center(k, kTwoPi, bins), 0.0});
    weights.push_back(counts[k]);
  }
  return Histogram::from_counts(DomainSpec::circle(kTwoPi), std::move(support), std::move(weights));
}

Histogram gen_cylinder_histogram(int group, double delta, Rng& rng, std::size_t bins,
                                 std::size_t draws, bool linear_offset) {
  if (bins < 2 || draws < 1) throw InvalidArgument("cylinder histogram needs bins >= 2, draws >= 1");
  const double lo = group == 2 ? delta : 0.0;
  CylinderParams p;
  p.mu = rng.uniform(lo, lo + 1.0);
  p.mu0 = rng.uniform(lo, lo + 1.0);
  p.kappa = kVonMisesKappa;
  p.linear_offset = linear_offset;
  const double sd = std::sqrt(cylinder_conditional_variance(p));

  std::vector<double> counts(bins * bins, 0.0);
  for (std::size_t i = 0; i < draws; ++i) {
    const double theta = sample_von_mises(rng, p.mu, p.kappa);
    const double x = std::clamp(rng.normal(cylinder_conditional_mean(p, theta), sd), 0.0, kTwoPi);
    counts[bin_of(theta, kTwoPi, bins) * bins + bin_of(x, kTwoPi, bins)] += 1.0;
  }
  std::vector<Point> support;
  std::vector<double> weights;
  for (std::size_t a = 0; a < bins; ++a) {
    for (std::size_t b = 0; b < bins; ++b) {
      const double c = counts[a * bins + b];
      if (c == 0.0) continue;
      support.push_back({bin_center(a, kTwoPi, bins), bin_center(b, kTwoPi, bins)});
      weights.push_back(c);
    }
  }
  return Histogram::from_counts(DomainSpec::cylinder(kTwoPi, kTwoPi), std::move(support),
                                std::move(weights));
}

Dataset generate_dataset(const ScenarioConfig& cfg) {
  cfg.validate();
  const std::size_t total = cfg.n1 + cfg.n2;
  std::vector<std::optional<Histogram>> out(total);
  parallel_for(total, [&](std::size_t i) {
    Rng rng(derive_seed(cfg.seed, {i}));
    const int group = i < cfg.n1 ? 1 : 2;
    switch (cfg.scenario) {
      case Scenario::interval:
        out[i] = gen_interval_histogram(group, cfg.delta, rng, cfg.effective_draws());
        break;
      case Scenario::circle:
        out[i] = gen_vonmises_histogram(group, cfg.delta, rng, cfg.effective_bins(),
                                        cfg.effective_draws());
        break;
      case Scenario::cylinder:
        out[i] = gen_cylinder_histogram(group, cfg.delta, rng, cfg.effective_bins(),
                                        cfg.effective_draws(), cfg.cylinder_linear_offset);
        break;
    }
  });
  Dataset ds;
  ds.group1.reserve(cfg.n1);
  ds.group2.reserve(cfg.n2);
  for (std::size_t i = 0; i < total; ++i) {
    (i < cfg.n1 ? ds.group1 : ds.group2).push_back(std::move(*out[i]));
  }
  return ds;
}

}  // namespace isw
