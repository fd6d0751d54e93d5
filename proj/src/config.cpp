#include "isw/config.hpp"

#include "isw/error.hpp"
#include "json.hpp"

namespace isw {
namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// Applies f(key, member) to every field, in serialization order.
template <typename C, typename F>
void visit_fields(C& c, F&& f) {
  f("domain", c.domain);
  f("T1", c.length1);
  f("T2", c.length2);
  f("edges", c.edges);
  f("edges_header", c.edges_header);
  f("nodes", c.nodes);
  f("weight", c.weight);
  f("t", c.heat_t);
  f("L", c.num_slices);
  f("dprime", c.dprime);
  f("grid1", c.grid1);
  f("grid2", c.grid2);
  f("distance_mode", c.distance_mode);
  f("method", c.method);
  f("B", c.bootstrap_replicates);
  f("seed", c.seed);
  f("alpha", c.alpha);
  f("q", c.q);
  f("scenario", c.scenario);
  f("delta", c.delta);
  f("deltas", c.deltas);
  f("n1", c.n1);
  f("n2", c.n2);
  f("bins", c.bins);
  f("draws", c.draws);
  f("linear_offset", c.linear_offset);
  f("replicates", c.replicates);
  f("input", c.input);
  f("output", c.output);
  f("basis", c.basis);
  f("embedding", c.embedding);
  f("groups", c.groups);
}

}  // namespace

void RunConfig::merge(const RunConfig& over) {
  const RunConfig& copy = over;
  auto assign = [](auto& dst, const auto& src) {
    if (src) dst = src;
  };
  assign(domain, copy.domain);
  assign(length1, copy.length1);
  assign(length2, copy.length2);
  assign(edges, copy.edges);
  assign(edges_header, copy.edges_header);
  assign(nodes, copy.nodes);
  assign(weight, copy.weight);
  assign(heat_t, copy.heat_t);
  assign(num_slices, copy.num_slices);
  assign(dprime, copy.dprime);
  assign(grid1, copy.grid1);
  assign(grid2, copy.grid2);
  assign(distance_mode, copy.distance_mode);
  assign(method, copy.method);
  assign(bootstrap_replicates, copy.bootstrap_replicates);
  assign(seed, copy.seed);
  assign(alpha, copy.alpha);
  assign(q, copy.q);
  assign(scenario, copy.scenario);
  assign(delta, copy.delta);
  assign(deltas, copy.deltas);
  assign(n1, copy.n1);
  assign(n2, copy.n2);
  assign(bins, copy.bins);
  assign(draws, copy.draws);
  assign(linear_offset, copy.linear_offset);
  assign(replicates, copy.replicates);
  assign(input, copy.input);
  assign(output, copy.output);
  assign(basis, copy.basis);
  assign(embedding, copy.embedding);
  assign(groups, copy.groups);
}

std::string run_config_to_json(const RunConfig& c) {
  ordered_json j = ordered_json::object();
  visit_fields(c, [&](const char* key, const auto& field) {
    if (field) j[key] = *field;
  });
  return j.dump(2) + "\n";
}

RunConfig run_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("config: top level must be an object");
  RunConfig c;
  std::size_t used = 0;
  visit_fields(c, [&](const char* key, auto& field) {
    auto it = j.find(key);
    if (it == j.end()) return;
    ++used;
    using T = typename std::remove_reference_t<decltype(field)>::value_type;
    try {
      if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
        if (!it->is_number_unsigned()) throw ParseError("");
      }
      field = it->template get<T>();
    } catch (const std::exception&) {
      throw ParseError(std::string("config: field '") + key + "' has the wrong type");
    }
  });
  if (used != j.size()) {
    RunConfig probe;
    for (auto it = j.begin(); it != j.end(); ++it) {
      bool known = false;
      visit_fields(probe, [&](const char* key, auto&) { known = known || it.key() == key; });
      if (!known) throw ParseError("config: unknown field '" + it.key() + "'");
    }
  }
  return c;
}

}  // namespace isw
