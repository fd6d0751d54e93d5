#include "isw/bench.hpp"

#include <cmath>

#include "isw/error.hpp"
#include "isw/parallel.hpp"
#include "isw/rng.hpp"

namespace isw {

EmbedParams default_embed_params(Scenario s) {
  EmbedParams p;
  switch (s) {
    case Scenario::interval:
      p.num_slices = 3;
      p.dprime = 10;
      break;
    case Scenario::circle:
      // Ten frequencies, cos and sin each.
      p.num_slices = 20;
      p.dprime = 20;
      break;
    case Scenario::cylinder:
      p.num_slices = 4;
      p.dprime = 12;
      break;
  }
  return p;
}

std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials) {
  if (trials == 0) return {0.0, 1.0};
  constexpr double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double denom = 1.0 + z * z / n;
  const double center = (p + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  return {std::max(0.0, std::min(center - half, p)), std::min(1.0, std::max(center + half, p))};
}

PowerCurve run_power(const ScenarioConfig& cfg, const std::vector<double>& deltas,
                     const EmbedParams& params, const PowerOptions& opts) {
  if (opts.replicates < 1) throw InvalidArgument("power runs need at least one replicate");
  if (deltas.empty()) throw InvalidArgument("power runs need at least one delta");
  if (!(opts.alpha > 0.0 && opts.alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  cfg.validate();

  const DomainSpec domain = scenario_domain(cfg);
  const SpectralBasis basis = params.grid ? build_analytic_basis(domain, *params.grid)
                                          : build_analytic_basis(domain, params.num_slices);

  PowerCurve curve;
  curve.scenario = cfg.scenario;
  curve.method = opts.method;
  for (std::size_t d = 0; d < deltas.size(); ++d) {
    std::vector<char> rejected(opts.replicates, 0);
    parallel_for(opts.replicates, [&](std::size_t r) {
      ScenarioConfig rc = cfg;
      rc.delta = deltas[d];
      rc.seed = derive_seed(opts.seed, {d, r});
      const Dataset ds = generate_dataset(rc);
      const auto e1 = embed_all(ds.group1, basis, params.weight, params.dprime);
      const auto e2 = embed_all(ds.group2, basis, params.weight, params.dprime);
      const SampleGroup g1 = make_group(e1);
      const SampleGroup g2 = make_group(e2);
      const TestReport rep = opts.method == TestMethod::hmp
                                 ? hmp_test(g1, g2)
                                 : bootstrap_test(g1, g2, opts.bootstrap_replicates,
                                                  derive_seed(opts.seed, {d, r, 1}));
      rejected[r] = rep.p_value <= opts.alpha;
    });
    PowerRow row;
    row.delta = deltas[d];
    row.replicates = opts.replicates;
    for (char c : rejected) row.rejections += static_cast<std::size_t>(c);
    row.power = static_cast<double>(row.rejections) / static_cast<double>(row.replicates);
    std::tie(row.lo, row.hi) = wilson_interval(row.rejections, row.replicates);
    curve.rows.push_back(row);
  }
  return curve;
}

double run_size_calibration(const ScenarioConfig& cfg, const EmbedParams& params,
                            const PowerOptions& opts) {
  return run_power(cfg, {0.0}, params, opts).rows.front().power;
}

}  // namespace isw
