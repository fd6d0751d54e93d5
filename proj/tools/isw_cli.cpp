// isw: command-line front end for bases, embeddings, distances, tests, FDR
// control, simulation and power curves.
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "isw/bench.hpp"
#include "isw/config.hpp"
#include "isw/distance.hpp"
#include "isw/error.hpp"
#include "isw/histogram.hpp"
#include "isw/inference.hpp"
#include "isw/io.hpp"
#include "isw/parallel.hpp"
#include "isw/spectral.hpp"
#include "isw/synthgen.hpp"
#include "json.hpp"

namespace {

using namespace isw;
using ordered_json = nlohmann::ordered_json;

constexpr int kExitComputation = 1;
constexpr int kExitInput = 2;

template <typename T>
void option(CLI::App* app, const std::string& name, std::optional<T>& dst, const std::string& desc) {
  app->add_option_function<T>(name, [&dst](const T& v) { dst = v; }, desc);
}

void flag(CLI::App* app, const std::string& name, std::optional<bool>& dst, const std::string& desc) {
  app->add_flag_function(name, [&dst](std::int64_t) { dst = true; }, desc);
}

template <typename T>
const T& need(const std::optional<T>& v, const char* what) {
  if (!v) throw InvalidArgument(std::string("missing required setting: ") + what);
  return *v;
}

struct Globals {
  std::optional<std::string> config;
  std::size_t threads = 0;
  bool entropy = false;
};

std::uint64_t resolve_seed(RunConfig& c, const Globals& g) {
  if (c.seed) return *c.seed;
  if (!g.entropy) {
    throw InvalidArgument("randomized command needs --seed (or --entropy for a fresh random seed)");
  }
  std::random_device rd;
  const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  c.seed = s;
  return s;
}

DomainSpec domain_of(const RunConfig& c) {
  if (c.edges) {
    std::ifstream in(*c.edges);
    if (!in) throw ParseError("cannot open edge list '" + *c.edges + "'");
    return io::read_edge_list(in, c.edges_header.value_or(false), c.nodes.value_or(0), *c.edges);
  }
  if (c.domain) {
    const DomainKind k = domain_kind_from_string(*c.domain);
    const double t1 = need(c.length1, "--T1");
    switch (k) {
      case DomainKind::interval: return DomainSpec::interval(t1);
      case DomainKind::circle: return DomainSpec::circle(t1);
      case DomainKind::rectangle: return DomainSpec::rectangle(t1, need(c.length2, "--T2"));
      case DomainKind::cylinder: return DomainSpec::cylinder(t1, need(c.length2, "--T2"));
      case DomainKind::torus: return DomainSpec::torus(t1, need(c.length2, "--T2"));
      case DomainKind::graph: throw InvalidArgument("graph domains are given with --edges");
    }
  }
  if (c.scenario) {
    ScenarioConfig sc;
    sc.scenario = scenario_from_string(*c.scenario);
    return scenario_domain(sc);
  }
  throw InvalidArgument("no domain given (use --domain, --edges or --scenario)");
}

SpectralWeight weight_of(const RunConfig& c) {
  const std::string kind = c.weight.value_or("heat");
  if (kind == "heat") return SpectralWeight::heat(c.heat_t.value_or(1.0));
  if (kind == "biharmonic") return SpectralWeight::biharmonic();
  throw InvalidArgument("unknown weight '" + kind + "' (expected heat or biharmonic)");
}

SpectralBasis load_basis(const RunConfig& c) {
  const auto& path = need(c.basis, "--basis");
  return io::basis_from_json(io::read_file(path));
}

io::HistogramCollection load_histograms(const RunConfig& c, const DomainSpec& d) {
  const auto& path = need(c.input, "--input");
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return io::read_histograms(in, d, path);
}

// Writes to the path, or stdout when unset.
void emit(const std::optional<std::string>& path, const std::string& text) {
  if (path) {
    io::write_file(*path, text);
  } else {
    std::cout << text;
  }
}

ScenarioConfig scenario_of(const RunConfig& c, std::uint64_t seed) {
  ScenarioConfig sc;
  sc.scenario = scenario_from_string(need(c.scenario, "--scenario"));
  sc.delta = c.delta.value_or(0.0);
  sc.n1 = c.n1.value_or(sc.n1);
  sc.n2 = c.n2.value_or(sc.n2);
  sc.bins = c.bins.value_or(0);
  sc.draws_per_sample = c.draws.value_or(0);
  sc.seed = seed;
  sc.cylinder_linear_offset = c.linear_offset.value_or(false);
  sc.validate();
  return sc;
}

int cmd_basis(const RunConfig& c) {
  const DomainSpec d = domain_of(c);
  SpectralBasis b = [&] {
    if (c.grid1) {
      return build_analytic_basis(d, ModeGrid{static_cast<int>(*c.grid1), static_cast<int>(c.grid2.value_or(0))});
    }
    std::size_t l = 0;
    if (c.num_slices) {
      l = *c.num_slices;
    } else if (c.scenario) {
      l = default_embed_params(scenario_from_string(*c.scenario)).num_slices;
    } else {
      throw InvalidArgument("missing required setting: --L");
    }
    return build_basis(d, l);
  }();
  emit(c.output, io::basis_to_json(b));
  std::cerr << "basis: " << b.size() << " eigenpairs on " << d.describe() << ", fingerprint "
            << fingerprint_hex(b.fingerprint()) << "\n";
  return 0;
}

int cmd_embed(const RunConfig& c) {
  const SpectralBasis b = load_basis(c);
  const auto hc = load_histograms(c, b.domain());
  const std::size_t dprime = need(c.dprime, "--dprime");
  if (c.num_slices && *c.num_slices != b.size()) {
    throw BasisMismatch("--L " + std::to_string(*c.num_slices) + " does not match the basis (" +
                        std::to_string(b.size()) + " eigenfunctions)");
  }
  const auto es = embed_all(hc.histograms, b, weight_of(c), dprime);
  io::EmbeddingTable t;
  t.ids = hc.ids;
  t.meta = es.front().meta;
  t.rows = RowMatrix(es.size(), t.meta.dimension());
  for (std::size_t i = 0; i < es.size(); ++i) {
    std::copy(es[i].values.begin(), es[i].values.end(), t.rows.row(i).begin());
  }
  const auto& out = need(c.output, "--out");
  std::ostringstream os;
  io::write_embedding_csv(os, t);
  io::write_file(out, os.str());
  io::write_file(out + ".json", io::embedding_sidecar_json(t.meta));
  std::cerr << "embed: " << es.size() << " histograms, D = " << t.meta.dimension() << "\n";
  return 0;
}

int cmd_dist(const RunConfig& c) {
  const SpectralBasis b = load_basis(c);
  const auto hc = load_histograms(c, b.domain());
  const std::string mode_name = c.distance_mode.value_or("exact");
  DistanceMode mode;
  if (mode_name == "exact") {
    mode = ExactSlices{};
  } else if (mode_name == "embedding") {
    mode = EmbeddingMode{need(c.dprime, "--dprime")};
  } else {
    throw InvalidArgument("unknown distance mode '" + mode_name + "' (expected exact or embedding)");
  }
  const auto d = distance_matrix(hc.histograms, b, weight_of(c), mode);
  std::ostringstream os;
  io::write_distance_matrix(os, hc.ids, d);
  emit(c.output, os.str());
  return 0;
}

int cmd_test(RunConfig& c, const Globals& g) {
  const auto& path = need(c.embedding, "--embedding");
  const EmbeddingMeta meta = io::embedding_meta_from_json(io::read_file(path + ".json"));
  if (c.basis) {
    const SpectralBasis b = load_basis(c);
    if (b.fingerprint() != meta.basis_fingerprint) {
      throw BasisMismatch("embedding was built from basis " + fingerprint_hex(meta.basis_fingerprint) +
                          " but --basis has fingerprint " + fingerprint_hex(b.fingerprint()));
    }
  }
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  const io::EmbeddingTable t = io::read_embedding_csv(in, meta, path);

  const auto& gpath = need(c.groups, "--groups");
  std::ifstream gin(gpath);
  if (!gin) throw ParseError("cannot open '" + gpath + "'");
  std::map<std::string, std::string> label_of;
  std::set<std::string> labels;
  for (const auto& [id, label] : io::read_groups(gin, gpath)) {
    if (!label_of.emplace(id, label).second) throw ParseError(gpath + ": duplicate id '" + id + "'");
    labels.insert(label);
  }
  if (labels.size() != 2) {
    throw InvalidArgument("groups file must name exactly two groups, found " + std::to_string(labels.size()));
  }
  const std::string first = *labels.begin();
  std::vector<std::size_t> rows1, rows2;
  for (std::size_t i = 0; i < t.ids.size(); ++i) {
    auto it = label_of.find(t.ids[i]);
    if (it == label_of.end()) throw InvalidArgument("id '" + t.ids[i] + "' has no group");
    (it->second == first ? rows1 : rows2).push_back(i);
  }
  auto take = [&](const std::vector<std::size_t>& idx) {
    SampleGroup s;
    s.meta = meta;
    s.rows = RowMatrix(idx.size(), meta.dimension());
    for (std::size_t r = 0; r < idx.size(); ++r) {
      const auto src = t.rows.row(idx[r]);
      std::copy(src.begin(), src.end(), s.rows.row(r).begin());
      s.ids.push_back(t.ids[idx[r]]);
    }
    return s;
  };
  const SampleGroup g1 = take(rows1), g2 = take(rows2);

  const TestMethod method = test_method_from_string(c.method.value_or("hmp"));
  TestReport r;
  if (method == TestMethod::boot) {
    const std::uint64_t seed = resolve_seed(c, g);
    r = bootstrap_test(g1, g2, c.bootstrap_replicates.value_or(kDefaultBootstrapReplicates), seed);
  } else {
    r = hmp_test(g1, g2);
  }
  const std::string json = io::test_report_json(r);
  std::cout << json;
  if (c.output) io::write_file(*c.output, json);
  std::cerr << to_string(method) << " test: groups '" << first << "' (n=" << r.n1 << ") vs '"
            << *std::next(labels.begin()) << "' (n=" << r.n2 << "), D = " << r.dimension
            << ", statistic = " << io::format_double(r.statistic) << ", p = " << io::format_double(r.p_value)
            << (r.p_value <= c.alpha.value_or(0.05) ? " (reject" : " (retain") << " at alpha = "
            << io::format_double(c.alpha.value_or(0.05)) << ")\n";
  return 0;
}

int cmd_fdr(const RunConfig& c) {
  const auto& path = need(c.input, "--input");
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  const auto rows = io::read_pvalues(in, path);
  std::vector<double> p;
  for (const auto& r : rows) p.push_back(r.second);
  const auto rejected = bh_adjust(p, c.q.value_or(0.1));
  std::ostringstream os;
  io::write_fdr(os, rows, rejected);
  emit(c.output, os.str());
  std::cerr << "fdr: " << rejected.size() << " of " << rows.size() << " rejected\n";
  return 0;
}

int cmd_simulate(RunConfig& c, const Globals& g) {
  const std::uint64_t seed = resolve_seed(c, g);
  const ScenarioConfig sc = scenario_of(c, seed);
  const Dataset ds = generate_dataset(sc);
  std::vector<std::string> ids;
  std::vector<Histogram> hs;
  std::ostringstream groups;
  groups << "id,group\n";
  auto add = [&](const std::vector<Histogram>& v, int label) {
    for (const auto& h : v) {
      ids.push_back("s" + std::to_string(ids.size() + 1));
      hs.push_back(h);
      groups << ids.back() << ',' << label << '\n';
    }
  };
  add(ds.group1, 1);
  add(ds.group2, 2);
  const DomainSpec d = scenario_domain(sc);
  const auto& out = need(c.output, "--out");
  std::ostringstream os;
  io::write_histograms(os, ids, hs, d.dimension());
  io::write_file(out, os.str());
  const std::string gpath = c.groups.value_or(out + ".groups.csv");
  io::write_file(gpath, groups.str());

  ordered_json m;
  m["scenario"] = to_string(sc.scenario);
  m["delta"] = sc.delta;
  m["n1"] = sc.n1;
  m["n2"] = sc.n2;
  m["bins"] = sc.effective_bins();
  m["draws"] = sc.effective_draws();
  m["linear_offset"] = sc.cylinder_linear_offset;
  m["seed"] = seed;
  m["domain"] = nlohmann::json::parse(io::domain_to_json(d));
  m["histograms"] = out;
  m["groups"] = gpath;
  io::write_file(out + ".json", m.dump(2) + "\n");
  std::cerr << "simulate: " << hs.size() << " histograms on " << d.describe() << "\n";
  return 0;
}

int cmd_power(RunConfig& c, const Globals& g) {
  const std::uint64_t seed = resolve_seed(c, g);
  const ScenarioConfig sc = scenario_of(c, seed);
  EmbedParams ep = default_embed_params(sc.scenario);
  if (c.num_slices) {
    ep.num_slices = *c.num_slices;
    ep.grid.reset();
  }
  if (c.grid1) ep.grid = ModeGrid{static_cast<int>(*c.grid1), static_cast<int>(c.grid2.value_or(0))};
  if (c.dprime) ep.dprime = *c.dprime;
  ep.weight = weight_of(c);

  PowerOptions po;
  po.method = test_method_from_string(c.method.value_or("hmp"));
  po.replicates = c.replicates.value_or(po.replicates);
  po.bootstrap_replicates = c.bootstrap_replicates.value_or(po.bootstrap_replicates);
  po.alpha = c.alpha.value_or(po.alpha);
  po.seed = seed;
  const std::vector<double> deltas = c.deltas.value_or(std::vector<double>{sc.delta});

  const PowerCurve curve = run_power(sc, deltas, ep, po);
  std::ostringstream os;
  io::write_power_csv(os, curve);
  emit(c.output, os.str());
  if (c.output) {
    ordered_json m;
    m["scenario"] = to_string(sc.scenario);
    m["method"] = to_string(po.method);
    m["replicates"] = po.replicates;
    if (po.method == TestMethod::boot) m["B"] = po.bootstrap_replicates;
    m["alpha"] = po.alpha;
    m["seed"] = seed;
    m["n1"] = sc.n1;
    m["n2"] = sc.n2;
    if (ep.grid) {
      m["grid"] = {ep.grid->max_l1, ep.grid->max_l2};
    } else {
      m["L"] = ep.num_slices;
    }
    m["dprime"] = ep.dprime;
    m["weight"] = ep.weight.name();
    ordered_json rows = ordered_json::array();
    for (const auto& r : curve.rows) {
      rows.push_back({{"delta", r.delta},
                      {"replicates", r.replicates},
                      {"rejections", r.rejections},
                      {"power", r.power},
                      {"lo", r.lo},
                      {"hi", r.hi}});
    }
    m["rows"] = std::move(rows);
    io::write_file(*c.output + ".json", m.dump(2) + "\n");
  }
  return 0;
}

void domain_options(CLI::App* s, RunConfig& f) {
  option(s, "--domain", f.domain, "interval|circle|rectangle|cylinder|torus");
  option(s, "--T1", f.length1, "first length or period");
  option(s, "--T2", f.length2, "second length or period");
  option(s, "--edges", f.edges, "edge list CSV (src,dst[,weight]) for a graph domain");
  flag(s, "--edges-header", f.edges_header, "edge list has a header row");
  option(s, "--nodes", f.nodes, "graph node count (default: largest id + 1)");
}

void weight_options(CLI::App* s, RunConfig& f) {
  option(s, "--weight", f.weight, "heat (default) or biharmonic");
  option(s, "--t", f.heat_t, "heat kernel time (default 1)");
}

void scenario_options(CLI::App* s, RunConfig& f) {
  option(s, "--scenario", f.scenario, "interval|circle|cylinder");
  option(s, "--n1", f.n1, "group 1 size (default 60)");
  option(s, "--n2", f.n2, "group 2 size (default 40)");
  option(s, "--bins", f.bins, "bins per dimension");
  option(s, "--draws", f.draws, "trials or draws per sample");
  flag(s, "--linear-offset", f.linear_offset, "cylinder: add the mu0 offset to the linear mean");
  option(s, "--seed", f.seed, "master seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Intrinsic sliced Wasserstein distances and two-sample tests for histograms"};
  app.require_subcommand(1);
  Globals g;
  RunConfig f;
  app.add_option_function<std::string>("--config", [&](const std::string& p) { g.config = p; },
                                       "JSON run configuration; flags override its fields");
  app.add_option("--threads", g.threads, "worker threads (default: all cores)");
  app.add_flag("--entropy", g.entropy, "draw a fresh seed when --seed is absent");

  auto* basis = app.add_subcommand("basis", "build a spectral basis file");
  domain_options(basis, f);
  option(basis, "--scenario", f.scenario, "use a synthetic scenario's domain (and default L)");
  option(basis, "--L", f.num_slices, "number of eigenfunctions");
  option(basis, "--grid1", f.grid1, "mode grid: max index of the first factor");
  option(basis, "--grid2", f.grid2, "mode grid: max index of the second factor");
  option(basis, "--out,-o", f.output, "output path (default stdout)");

  auto* embed = app.add_subcommand("embed", "embed a histogram collection");
  option(embed, "--basis", f.basis, "basis file");
  option(embed, "--input,-i", f.input, "histogram CSV");
  option(embed, "--L", f.num_slices, "expected basis size (checked)");
  option(embed, "--dprime", f.dprime, "quantile knots per slice");
  weight_options(embed, f);
  option(embed, "--out,-o", f.output, "embedding CSV; sidecar written to <out>.json");

  auto* dist = app.add_subcommand("dist", "pairwise ISW2 distance matrix");
  option(dist, "--basis", f.basis, "basis file");
  option(dist, "--input,-i", f.input, "histogram CSV");
  option(dist, "--mode", f.distance_mode, "exact (default) or embedding");
  option(dist, "--dprime", f.dprime, "knots per slice for embedding mode");
  weight_options(dist, f);
  option(dist, "--out,-o", f.output, "output path (default stdout)");

  auto* test = app.add_subcommand("test", "two-sample test on an embedding");
  option(test, "--embedding,-e", f.embedding, "embedding CSV (sidecar at <path>.json)");
  option(test, "--groups,-g", f.groups, "id,group CSV with exactly two labels");
  option(test, "--basis", f.basis, "verify the embedding against this basis file");
  option(test, "--method", f.method, "hmp (default) or boot");
  option(test, "--B", f.bootstrap_replicates, "bootstrap replicates (default 1000)");
  option(test, "--seed", f.seed, "seed for the bootstrap");
  option(test, "--alpha", f.alpha, "level for the stderr verdict (default 0.05; report only)");
  option(test, "--out,-o", f.output, "also write the JSON report here");

  auto* fdr = app.add_subcommand("fdr", "Benjamini-Hochberg FDR control");
  option(fdr, "--input,-i", f.input, "label,p CSV");
  option(fdr, "--q", f.q, "target FDR level (default 0.1)");
  option(fdr, "--out,-o", f.output, "output path (default stdout)");

  auto* sim = app.add_subcommand("simulate", "generate a synthetic two-group collection");
  scenario_options(sim, f);
  option(sim, "--delta", f.delta, "shift between groups");
  option(sim, "--groups", f.groups, "group file path (default <out>.groups.csv)");
  option(sim, "--out,-o", f.output, "histogram CSV; manifest written to <out>.json");

  auto* power = app.add_subcommand("power", "empirical size and power over a delta grid");
  scenario_options(power, f);
  power->add_option_function<std::vector<double>>(
             "--deltas", [&](const std::vector<double>& v) { f.deltas = v; }, "comma-separated delta grid")
      ->delimiter(',');
  option(power, "--delta", f.delta, "single delta (when --deltas is absent)");
  option(power, "--method", f.method, "hmp (default) or boot");
  option(power, "--replicates", f.replicates, "datasets per delta (default 400)");
  option(power, "--B", f.bootstrap_replicates, "bootstrap replicates per test (default 199)");
  option(power, "--alpha", f.alpha, "rejection level (default 0.05)");
  option(power, "--L", f.num_slices, "eigenfunctions");
  option(power, "--grid1", f.grid1, "mode grid: max index of the first factor");
  option(power, "--grid2", f.grid2, "mode grid: max index of the second factor");
  option(power, "--dprime", f.dprime, "quantile knots per slice");
  weight_options(power, f);
  option(power, "--out,-o", f.output, "power CSV; manifest written to <out>.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    RunConfig c;
    if (g.config) c = run_config_from_json(io::read_file(*g.config));
    c.merge(f);
    set_thread_count(g.threads);
    if (basis->parsed()) return cmd_basis(c);
    if (embed->parsed()) return cmd_embed(c);
    if (dist->parsed()) return cmd_dist(c);
    if (test->parsed()) return cmd_test(c, g);
    if (fdr->parsed()) return cmd_fdr(c);
    if (sim->parsed()) return cmd_simulate(c, g);
    if (power->parsed()) return cmd_power(c, g);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const BasisMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitComputation;
  }
  return kExitInput;
}
