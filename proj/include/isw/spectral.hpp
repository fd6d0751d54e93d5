#pragma once

// Laplacian eigenbases for the supported domains and the spectral weight
// functions alpha(lambda) that combine them.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace isw {

enum class DomainKind { interval, circle, rectangle, cylinder, torus, graph };

std::string to_string(DomainKind k);
DomainKind domain_kind_from_string(const std::string& s);

struct Edge {
  std::size_t src = 0;
  std::size_t dst = 0;
  double weight = 1.0;
};

// A location on a domain. Analytic domains use (c1[, c2]) as coordinates;
// graphs carry the node id in c1.
struct Point {
  double c1 = 0.0;
  double c2 = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

class DomainSpec {
 public:
  static DomainSpec interval(double length);
  static DomainSpec circle(double period);
  static DomainSpec rectangle(double length1, double length2);
  // Periodic first factor (period1) times an interval (length2).
  static DomainSpec cylinder(double period1, double length2);
  static DomainSpec torus(double period1, double period2);
  static DomainSpec graph(std::size_t node_count, std::vector<Edge> edges);

  DomainKind kind() const noexcept { return kind_; }
  bool is_graph() const noexcept { return kind_ == DomainKind::graph; }
  // Number of coordinates a point carries (1 for interval/circle/graph).
  int dimension() const noexcept;

  double length1() const noexcept { return t1_; }
  double length2() const noexcept { return t2_; }
  std::size_t node_count() const noexcept { return nodes_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  // Throws InvalidArgument when p is not a location on this domain.
  void validate_point(const Point& p) const;

  // Node index for a graph point; throws InvalidArgument on a bad id.
  std::size_t node_of(const Point& p) const;

  // Content hash of the spec (kind, lengths, edge list).
  std::uint64_t fingerprint() const noexcept;

  std::string describe() const;

 private:
  DomainSpec() = default;

  DomainKind kind_ = DomainKind::interval;
  double t1_ = 1.0;
  double t2_ = 0.0;
  std::size_t nodes_ = 0;
  std::vector<Edge> edges_;
};

enum class Trig { cos, sin };

// Closed-form eigenfunction on an analytic domain: a product of at most two
// trigonometric factors times a normalization constant.
struct AnalyticMode {
  int l1 = 0;
  int l2 = 0;  // 0 on one-dimensional domains
  Trig trig1 = Trig::cos;
  Trig trig2 = Trig::cos;
  double norm = 0.0;

  friend bool operator==(const AnalyticMode&, const AnalyticMode&) = default;
};

// Restricts analytic enumeration to the cross product l1 <= max_l1,
// l2 <= max_l2 (every trig choice kept) instead of the L lowest modes.
struct ModeGrid {
  int max_l1 = 1;
  int max_l2 = 1;
};

class SpectralBasis {
 public:
  // Eigenvalues ascending, all strictly positive.
  std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }
  double eigenvalue(std::size_t ell) const;  // 1-based
  std::size_t size() const noexcept { return eigenvalues_.size(); }

  const DomainSpec& domain() const noexcept { return domain_; }
  bool is_graph() const noexcept { return domain_.is_graph(); }

  // Analytic descriptors (empty for graphs).
  std::span<const AnalyticMode> modes() const noexcept { return modes_; }

  // Graph eigenvectors, column-major: column ell-1 holds eigenvector ell.
  std::span<const double> vectors() const noexcept { return vectors_; }
  std::span<const double> vector(std::size_t ell) const;  // 1-based

  // phi_ell(p). ell is 1-based. Throws InvalidArgument for bad ell or point.
  double eval(std::size_t ell, const Point& p) const;

  // Content hash of domain, eigenvalues and eigenfunction data.
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }

  // Rebuild from stored parts (used by the basis file loader). The
  // fingerprint is recomputed.
  static SpectralBasis from_parts(DomainSpec domain, std::vector<double> eigenvalues,
                                  std::vector<AnalyticMode> modes, std::vector<double> vectors);

 private:
  friend SpectralBasis build_analytic_basis(const DomainSpec&, std::size_t);
  friend SpectralBasis build_analytic_basis(const DomainSpec&, const ModeGrid&);
  friend SpectralBasis build_graph_basis(const DomainSpec&, std::size_t);

  explicit SpectralBasis(DomainSpec domain) : domain_(std::move(domain)) {}
  void seal();

  DomainSpec domain_;
  std::vector<double> eigenvalues_;
  std::vector<AnalyticMode> modes_;
  std::vector<double> vectors_;
  std::uint64_t fingerprint_ = 0;
};

// The L lowest nonconstant eigenfunctions of an analytic domain, ordered by
// eigenvalue with ties broken by (l1, l2, cos before sin).
SpectralBasis build_analytic_basis(const DomainSpec& domain, std::size_t count);

// Every mode of the grid, same ordering as above.
SpectralBasis build_analytic_basis(const DomainSpec& domain, const ModeGrid& grid);

// L smallest nonzero eigenpairs of the unnormalized Laplacian D - W.
// Requires a connected graph with at most 5000 nodes.
SpectralBasis build_graph_basis(const DomainSpec& domain, std::size_t count);

// Dispatches on the domain kind.
SpectralBasis build_basis(const DomainSpec& domain, std::size_t count);

// Eigenvalue of an analytic mode on the given domain.
double analytic_eigenvalue(const DomainSpec& domain, const AnalyticMode& mode);

inline constexpr std::size_t kMaxGraphNodes = 5000;

// alpha(lambda): heat exp(-t lambda), biharmonic 1/lambda^2 (0 at 0), or a
// table looked up by exact lambda.
class SpectralWeight {
 public:
  struct Heat {
    double t = 1.0;
  };
  struct Biharmonic {};
  struct Custom {
    std::vector<std::pair<double, double>> table;
  };

  static SpectralWeight heat(double t);
  static SpectralWeight biharmonic();
  static SpectralWeight custom(std::vector<std::pair<double, double>> table);

  double operator()(double lambda) const;

  // Short stable label, e.g. "heat(t=1)".
  std::string name() const;

  const std::variant<Heat, Biharmonic, Custom>& kind() const noexcept { return kind_; }

 private:
  explicit SpectralWeight(std::variant<Heat, Biharmonic, Custom> k) : kind_(std::move(k)) {}
  std::variant<Heat, Biharmonic, Custom> kind_;
};

// alpha(lambda_ell) for every retained eigenvalue of the basis.
std::vector<double> basis_weights(const SpectralBasis& basis, const SpectralWeight& w);

}  // namespace isw
