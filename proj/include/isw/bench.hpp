#pragma once

// Size and power experiments: sweep the shift delta, simulate replicate
// datasets, test each, and report rejection rates.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "isw/inference.hpp"
#include "isw/spectral.hpp"
#include "isw/synthgen.hpp"

namespace isw {

struct EmbedParams {
  std::size_t num_slices = 3;  // L
  std::size_t dprime = 10;     // D'
  SpectralWeight weight = SpectralWeight::heat(1.0);
  std::optional<ModeGrid> grid;  // overrides num_slices when set
};

// Defaults used in the synthetic experiments for each scenario.
EmbedParams default_embed_params(Scenario s);

struct PowerOptions {
  TestMethod method = TestMethod::hmp;
  std::size_t replicates = 400;
  std::size_t bootstrap_replicates = 199;
  double alpha = 0.05;
  std::uint64_t seed = 0;
};

struct PowerRow {
  double delta = 0.0;
  std::size_t replicates = 0;
  std::size_t rejections = 0;
  double power = 0.0;
  double lo = 0.0;  // Wilson 95% interval
  double hi = 0.0;
};

struct PowerCurve {
  Scenario scenario = Scenario::interval;
  TestMethod method = TestMethod::hmp;
  std::vector<PowerRow> rows;
};

// Wilson score interval at z = 1.959964.
std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials);

// Replicate r at delta index d uses dataset seed derive_seed(seed, {d, r})
// and bootstrap seed derive_seed(seed, {d, r, 1}).
PowerCurve run_power(const ScenarioConfig& cfg, const std::vector<double>& deltas,
                     const EmbedParams& params, const PowerOptions& opts);

// Rejection rate at delta = 0.
double run_size_calibration(const ScenarioConfig& cfg, const EmbedParams& params,
                            const PowerOptions& opts);

}  // namespace isw
