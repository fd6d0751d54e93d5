#pragma once
// Run configuration shared by the command-line tool. Every field is optional
// so a JSON file and command-line flags can be layered.
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace isw {

struct RunConfig {
  // Domain: analytic kind with lengths, or "graph" with an edge-list path.
  std::optional<std::string> domain;
  std::optional<double> length1;
  std::optional<double> length2;
  std::optional<std::string> edges;
  std::optional<bool> edges_header;
  std::optional<std::size_t> nodes;

  std::optional<std::string> weight;  // "heat" or "biharmonic"
  std::optional<double> heat_t;
  std::optional<std::size_t> num_slices;  // L
  std::optional<std::size_t> dprime;
  std::optional<std::size_t> grid1;  // mode grid, alternative to L
  std::optional<std::size_t> grid2;
  std::optional<std::string> distance_mode;  // "exact" or "embedding"

  std::optional<std::string> method;  // "boot" or "hmp"
  std::optional<std::size_t> bootstrap_replicates;
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha;
  std::optional<double> q;

  std::optional<std::string> scenario;
  std::optional<double> delta;
  std::optional<std::vector<double>> deltas;
  std::optional<std::size_t> n1;
  std::optional<std::size_t> n2;
  std::optional<std::size_t> bins;
  std::optional<std::size_t> draws;
  std::optional<bool> linear_offset;
  std::optional<std::size_t> replicates;

  std::optional<std::string> input;
  std::optional<std::string> output;
  std::optional<std::string> basis;
  std::optional<std::string> embedding;
  std::optional<std::string> groups;

  // Fields set in `over` replace those in *this.
  void merge(const RunConfig& over);

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Unset fields are omitted. Doubles are written so they read back exactly.
std::string run_config_to_json(const RunConfig& c);
// Unknown keys and mistyped values raise ParseError.
RunConfig run_config_from_json(const std::string& text);

}  // namespace isw
