#include "isw/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include "json.hpp"
#include <sstream>
#include <unordered_map>

#include "format.hpp"
#include "isw/error.hpp"

namespace isw::io {
namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc{} && r.ptr == s.data() + s.size() && std::isfinite(out);
}

bool parse_index(std::string_view s, std::size_t& out) {
  if (s.empty()) return false;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc{} && r.ptr == s.data() + s.size();
}

// Iterates non-empty lines with 1-based line numbers.
template <typename F>
void for_each_line(std::istream& in, F&& f) {
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    const auto t = trim(line);
    if (t.empty()) continue;
    f(no, t);
  }
}

json domain_json(const DomainSpec& d) {
  json j;
  j["kind"] = to_string(d.kind());
  if (d.is_graph()) {
    j["nodes"] = d.node_count();
    json edges = json::array();
    for (const Edge& e : d.edges()) edges.push_back({e.src, e.dst, e.weight});
    j["edges"] = std::move(edges);
  } else {
    j["T1"] = d.length1();
    if (d.dimension() == 2) j["T2"] = d.length2();
  }
  return j;
}

DomainSpec domain_from(const json& j) {
  const DomainKind k = domain_kind_from_string(j.at("kind").get<std::string>());
  switch (k) {
    case DomainKind::interval: return DomainSpec::interval(j.at("T1").get<double>());
    case DomainKind::circle: return DomainSpec::circle(j.at("T1").get<double>());
    case DomainKind::rectangle:
      return DomainSpec::rectangle(j.at("T1").get<double>(), j.at("T2").get<double>());
    case DomainKind::cylinder:
      return DomainSpec::cylinder(j.at("T1").get<double>(), j.at("T2").get<double>());
    case DomainKind::torus:
      return DomainSpec::torus(j.at("T1").get<double>(), j.at("T2").get<double>());
    case DomainKind::graph: {
      std::vector<Edge> edges;
      for (const auto& e : j.at("edges")) {
        edges.push_back({e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>(), e.at(2).get<double>()});
      }
      return DomainSpec::graph(j.at("nodes").get<std::size_t>(), std::move(edges));
    }
  }
  throw ParseError("unknown domain kind");
}

template <typename F>
auto json_guard(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ParseError(what + ": " + e.what());
  }
}

}  // namespace

std::string format_double(double v) { return detail::shortest(v); }

DomainSpec read_edge_list(std::istream& in, bool has_header, std::size_t node_count,
                          const std::string& source) {
  std::vector<Edge> edges;
  std::size_t max_id = 0;
  bool header_pending = has_header;
  for_each_line(in, [&](std::size_t no, std::string_view line) {
    if (header_pending) {
      header_pending = false;
      return;
    }
    const auto f = split(line);
    if (f.size() != 2 && f.size() != 3) {
      throw ParseError(source, no, "expected 'src,dst[,weight]', got " + std::to_string(f.size()) + " fields");
    }
    Edge e;
    if (!parse_index(f[0], e.src) || !parse_index(f[1], e.dst)) {
      throw ParseError(source, no, "node ids must be nonnegative integers");
    }
    if (f.size() == 3 && !parse_double(f[2], e.weight)) {
      throw ParseError(source, no, "edge weight is not a number");
    }
    if (e.weight < 0.0) throw ParseError(source, no, "edge weight is negative");
    if (e.src == e.dst) throw ParseError(source, no, "self-loop on node " + std::to_string(e.src));
    max_id = std::max({max_id, e.src, e.dst});
    edges.push_back(e);
  });
  if (edges.empty()) throw ParseError(source + ": edge list is empty");
  if (node_count == 0) node_count = max_id + 1;
  if (max_id >= node_count) {
    throw ParseError(source + ": node id " + std::to_string(max_id) + " exceeds node count " +
                     std::to_string(node_count));
  }
  return DomainSpec::graph(node_count, std::move(edges));
}

HistogramCollection read_histograms(std::istream& in, const DomainSpec& domain,
                                    const std::string& source) {
  const std::size_t want = static_cast<std::size_t>(domain.dimension()) + 2;
  struct Pending {
    std::vector<Point> support;
    std::vector<double> weights;
    std::size_t first_line = 0;
  };
  std::vector<std::string> ids;
  std::unordered_map<std::string, Pending> by_id;
  bool first = true;

  for_each_line(in, [&](std::size_t no, std::string_view line) {
    const auto f = split(line);
    double w = 0.0;
    if (first) {
      first = false;
      if (!parse_double(f.back(), w)) return;  // header
    }
    if (f.size() != want) {
      throw ParseError(source, no, "expected " + std::to_string(want) + " fields for a " +
                                       to_string(domain.kind()) + " histogram, got " +
                                       std::to_string(f.size()));
    }
    Point p;
    if (!parse_double(f[1], p.c1) || (want == 4 && !parse_double(f[2], p.c2))) {
      throw ParseError(source, no, "coordinate is not a number");
    }
    if (!parse_double(f.back(), w) || w < 0.0) {
      throw ParseError(source, no, "weight must be a nonnegative number");
    }
    try {
      domain.validate_point(p);
    } catch (const InvalidArgument& e) {
      throw ParseError(source, no, e.what());
    }
    const std::string id(f[0]);
    auto [it, inserted] = by_id.try_emplace(id);
    if (inserted) {
      ids.push_back(id);
      it->second.first_line = no;
    }
    it->second.support.push_back(p);
    it->second.weights.push_back(w);
  });

  HistogramCollection c;
  for (const auto& id : ids) {
    auto& pend = by_id.at(id);
    try {
      c.histograms.push_back(Histogram::from_counts(domain, std::move(pend.support), std::move(pend.weights)));
    } catch (const InvalidArgument& e) {
      throw ParseError(source, pend.first_line, "histogram '" + id + "': " + e.what());
    }
  }
  if (ids.empty()) throw ParseError(source + ": no histograms found");
  c.ids = std::move(ids);
  return c;
}

void write_histograms(std::ostream& out, const std::vector<std::string>& ids,
                      const std::vector<Histogram>& hs, int dimension) {
  out << (dimension == 2 ? "id,coord1,coord2,weight\n" : "id,coord1,weight\n");
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const auto sup = hs[i].support();
    const auto w = hs[i].weights();
    for (std::size_t a = 0; a < sup.size(); ++a) {
      out << ids[i] << ',' << format_double(sup[a].c1) << ',';
      if (dimension == 2) out << format_double(sup[a].c2) << ',';
      out << format_double(w[a]) << '\n';
    }
  }
}

std::string domain_to_json(const DomainSpec& d) { return domain_json(d).dump(); }

DomainSpec domain_from_json(const std::string& text) {
  return json_guard("domain", [&] { return domain_from(json::parse(text)); });
}

std::string basis_to_json(const SpectralBasis& basis) {
  ordered_json j;
  j["format"] = "isw-basis/1";
  j["domain"] = domain_json(basis.domain());
  j["L"] = basis.size();
  j["eigenvalues"] = std::vector<double>(basis.eigenvalues().begin(), basis.eigenvalues().end());
  if (basis.is_graph()) {
    const std::size_t n = basis.domain().node_count();
    json rows = json::array();
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> row(basis.size());
      for (std::size_t ell = 1; ell <= basis.size(); ++ell) row[ell - 1] = basis.vector(ell)[i];
      rows.push_back(std::move(row));
    }
    j["vectors"] = std::move(rows);
  } else {
    json modes = json::array();
    for (const auto& m : basis.modes()) {
      modes.push_back({{"l1", m.l1},
                       {"l2", m.l2},
                       {"trig1", m.trig1 == Trig::cos ? "cos" : "sin"},
                       {"trig2", m.trig2 == Trig::cos ? "cos" : "sin"},
                       {"norm", m.norm}});
    }
    j["modes"] = std::move(modes);
  }
  j["fingerprint"] = fingerprint_hex(basis.fingerprint());
  return j.dump(2) + "\n";
}

SpectralBasis basis_from_json(const std::string& text) {
  return json_guard("basis file", [&] {
    const json j = json::parse(text);
    DomainSpec domain = domain_from(j.at("domain"));
    auto eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
    std::vector<AnalyticMode> modes;
    std::vector<double> vectors;
    if (domain.is_graph()) {
      const auto& rows = j.at("vectors");
      const std::size_t n = domain.node_count();
      const std::size_t l = eigenvalues.size();
      if (rows.size() != n) throw ParseError("basis file: vectors must have one row per node");
      vectors.assign(n * l, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const auto row = rows.at(i).get<std::vector<double>>();
        if (row.size() != l) throw ParseError("basis file: vector row has the wrong length");
        for (std::size_t ell = 0; ell < l; ++ell) vectors[ell * n + i] = row[ell];
      }
    } else {
      auto trig = [](const json& t) {
        const auto s = t.get<std::string>();
        if (s == "cos") return Trig::cos;
        if (s == "sin") return Trig::sin;
        throw ParseError("basis file: trig must be cos or sin");
      };
      for (const auto& m : j.at("modes")) {
        modes.push_back({m.at("l1").get<int>(), m.at("l2").get<int>(), trig(m.at("trig1")),
                         trig(m.at("trig2")), m.at("norm").get<double>()});
      }
    }
    SpectralBasis b = SpectralBasis::from_parts(std::move(domain), std::move(eigenvalues),
                                                std::move(modes), std::move(vectors));
    if (j.contains("fingerprint") &&
        fingerprint_from_hex(j.at("fingerprint").get<std::string>()) != b.fingerprint()) {
      throw BasisMismatch("basis file fingerprint does not match its contents");
    }
    return b;
  });
}

void write_embedding_csv(std::ostream& out, const EmbeddingTable& t) {
  out << "id";
  for (std::size_t k = 1; k <= t.rows.cols(); ++k) out << ",e" << k;
  out << '\n';
  for (std::size_t i = 0; i < t.rows.rows(); ++i) {
    out << t.ids[i];
    for (double v : t.rows.row(i)) out << ',' << format_double(v);
    out << '\n';
  }
}

std::string embedding_sidecar_json(const EmbeddingMeta& meta) {
  ordered_json j;
  j["format"] = "isw-embedding/1";
  j["L"] = meta.num_slices;
  j["dprime"] = meta.dprime;
  j["D"] = meta.dimension();
  j["knots"] = embedding_knots(meta.dprime);
  j["weight"] = meta.weight;
  j["basis_fingerprint"] = fingerprint_hex(meta.basis_fingerprint);
  return j.dump(2) + "\n";
}

EmbeddingMeta embedding_meta_from_json(const std::string& text) {
  return json_guard("embedding sidecar", [&] {
    const json j = json::parse(text);
    EmbeddingMeta m;
    m.num_slices = j.at("L").get<std::size_t>();
    m.dprime = j.at("dprime").get<std::size_t>();
    m.weight = j.at("weight").get<std::string>();
    m.basis_fingerprint = fingerprint_from_hex(j.at("basis_fingerprint").get<std::string>());
    if (j.contains("D") && j.at("D").get<std::size_t>() != m.dimension()) {
      throw ParseError("embedding sidecar: D does not equal L * dprime");
    }
    return m;
  });
}

EmbeddingTable read_embedding_csv(std::istream& in, const EmbeddingMeta& meta,
                                  const std::string& source) {
  EmbeddingTable t;
  t.meta = meta;
  const std::size_t d = meta.dimension();
  std::vector<double> data;
  bool header = true;
  for_each_line(in, [&](std::size_t no, std::string_view line) {
    const auto f = split(line);
    if (header) {
      header = false;
      if (f.size() != d + 1) {
        throw ParseError(source, no, "header has " + std::to_string(f.size() - 1) +
                                         " value columns; sidecar says D = " + std::to_string(d));
      }
      return;
    }
    if (f.size() != d + 1) throw ParseError(source, no, "row does not have D + 1 fields");
    t.ids.emplace_back(f[0]);
    for (std::size_t k = 1; k <= d; ++k) {
      double v = 0.0;
      if (!parse_double(f[k], v)) throw ParseError(source, no, "embedding value is not a number");
      data.push_back(v);
    }
  });
  t.rows = RowMatrix(t.ids.size(), d, std::move(data));
  return t;
}

void write_distance_matrix(std::ostream& out, const std::vector<std::string>& ids,
                           const std::vector<double>& d) {
  const std::size_t n = ids.size();
  out << "id";
  for (const auto& id : ids) out << ',' << id;
  out << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    out << ids[i];
    for (std::size_t j = 0; j < n; ++j) out << ',' << format_double(d[i * n + j]);
    out << '\n';
  }
}

std::string test_report_json(const TestReport& r) {
  ordered_json j;
  j["method"] = to_string(r.method);
  j["statistic"] = r.statistic;
  j["p_value"] = r.p_value;
  if (r.method == TestMethod::hmp) {
    j["per_coordinate"] = r.per_coordinate;
    j["degenerate_coordinates"] = r.degenerate_coordinates;
  } else {
    j["B"] = r.replicates;
  }
  j["seed"] = r.seed;
  j["n1"] = r.n1;
  j["n2"] = r.n2;
  j["D"] = r.dimension;
  return j.dump(2) + "\n";
}

std::vector<std::pair<std::string, double>> read_pvalues(std::istream& in, const std::string& source) {
  std::vector<std::pair<std::string, double>> rows;
  bool first = true;
  for_each_line(in, [&](std::size_t no, std::string_view line) {
    const auto f = split(line);
    double p = 0.0;
    if (f.size() != 2) throw ParseError(source, no, "expected 'label,p'");
    const bool ok = parse_double(f[1], p);
    if (first) {
      first = false;
      if (!ok) return;  // header
    }
    if (!ok || p < 0.0 || p > 1.0) throw ParseError(source, no, "p-value must be a number in [0, 1]");
    rows.emplace_back(std::string(f[0]), p);
  });
  return rows;
}

void write_fdr(std::ostream& out, const std::vector<std::pair<std::string, double>>& rows,
               const std::vector<std::size_t>& rejected) {
  std::vector<char> flag(rows.size(), 0);
  for (auto i : rejected) flag[i] = 1;
  out << "label,p,rejected\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << rows[i].first << ',' << format_double(rows[i].second) << ',' << (flag[i] ? "true" : "false")
        << '\n';
  }
}

std::vector<std::pair<std::string, std::string>> read_groups(std::istream& in, const std::string& source) {
  std::vector<std::pair<std::string, std::string>> rows;
  bool first = true;
  for_each_line(in, [&](std::size_t no, std::string_view line) {
    const auto f = split(line);
    if (f.size() != 2) throw ParseError(source, no, "expected 'id,group'");
    if (first) {
      first = false;
      if (f[0] == "id" && f[1] == "group") return;
    }
    rows.emplace_back(std::string(f[0]), std::string(f[1]));
  });
  return rows;
}

void write_power_csv(std::ostream& out, const PowerCurve& c) {
  out << "delta,power,lo,hi\n";
  for (const auto& r : c.rows) {
    out << format_double(r.delta) << ',' << format_double(r.power) << ',' << format_double(r.lo) << ','
        << format_double(r.hi) << '\n';
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << contents;
  if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace isw::io
