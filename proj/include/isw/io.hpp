#pragma once

// File formats: edge lists, histogram collections, embedding matrices with
// JSON sidecars, basis files, p-value lists, power curves.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "isw/bench.hpp"
#include "isw/histogram.hpp"
#include "isw/inference.hpp"
#include "isw/spectral.hpp"

namespace isw::io {

// `src,dst[,weight]` per line, 0-based ids. Node count is 1 + the largest id
// unless given. Throws ParseError with the line number on malformed rows.
DomainSpec read_edge_list(std::istream& in, bool has_header, std::size_t node_count = 0,
                          const std::string& source = "<edges>");

struct HistogramCollection {
  std::vector<std::string> ids;  // order of first appearance
  std::vector<Histogram> histograms;
};

// `id,coord1[,coord2],weight`; one histogram per distinct id, weights
// normalized per id. A header row is detected when its last field is not
// numeric.
HistogramCollection read_histograms(std::istream& in, const DomainSpec& domain,
                                    const std::string& source = "<histograms>");
void write_histograms(std::ostream& out, const std::vector<std::string>& ids,
                      const std::vector<Histogram>& hs, int dimension);

// Basis file: {"domain": ..., "eigenvalues": [...], "modes"|"vectors": ...,
// "fingerprint": "<hex>"}. Loading verifies the stored fingerprint.
std::string basis_to_json(const SpectralBasis& basis);
SpectralBasis basis_from_json(const std::string& text);

std::string domain_to_json(const DomainSpec& d);
DomainSpec domain_from_json(const std::string& text);

struct EmbeddingTable {
  std::vector<std::string> ids;
  RowMatrix rows;
  EmbeddingMeta meta;
};

// CSV body: header `id,e1..eD`, then one row per histogram. The sidecar holds
// L, D', knots, weight and basis fingerprint.
void write_embedding_csv(std::ostream& out, const EmbeddingTable& t);
std::string embedding_sidecar_json(const EmbeddingMeta& meta);
EmbeddingMeta embedding_meta_from_json(const std::string& text);
EmbeddingTable read_embedding_csv(std::istream& in, const EmbeddingMeta& meta,
                                  const std::string& source = "<embedding>");

// Distance matrix with ids as header row and first column.
void write_distance_matrix(std::ostream& out, const std::vector<std::string>& ids,
                           const std::vector<double>& d);

std::string test_report_json(const TestReport& r);

// `label,p` rows (optional header) in, `label,p,rejected` out.
std::vector<std::pair<std::string, double>> read_pvalues(std::istream& in,
                                                         const std::string& source = "<pvalues>");
void write_fdr(std::ostream& out, const std::vector<std::pair<std::string, double>>& rows,
               const std::vector<std::size_t>& rejected);

// `id,group` rows.
std::vector<std::pair<std::string, std::string>> read_groups(std::istream& in,
                                                             const std::string& source = "<groups>");

void write_power_csv(std::ostream& out, const PowerCurve& c);

// Shortest decimal that round-trips.
std::string format_double(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace isw::io
