#include "isw/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <tuple>

#include "format.hpp"
#include "hash.hpp"
#include "isw/error.hpp"

namespace isw {
namespace {

using std::numbers::pi;

enum class Factor { none, interval, periodic };

struct Factors {
  Factor first = Factor::none;
  Factor second = Factor::none;
};

Factors factors_of(DomainKind k) {
  switch (k) {
    case DomainKind::interval: return {Factor::interval, Factor::none};
    case DomainKind::circle: return {Factor::periodic, Factor::none};
    case DomainKind::rectangle: return {Factor::interval, Factor::interval};
    case DomainKind::cylinder: return {Factor::periodic, Factor::interval};
    case DomainKind::torus: return {Factor::periodic, Factor::periodic};
    case DomainKind::graph: break;
  }
  return {};
}

double factor_frequency(Factor f, int l, double length) {
  const double c = f == Factor::periodic ? 2.0 * pi : pi;
  return c * l / length;
}

double factor_eigenvalue(Factor f, int l, double length) {
  const double w = factor_frequency(f, l, length);
  return w * w;
}

double factor_value(Factor f, Trig trig, int l, double length, double x) {
  const double arg = factor_frequency(f, l, length) * x;
  return trig == Trig::cos ? std::cos(arg) : std::sin(arg);
}

void check_length(double t, const char* what) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw InvalidArgument(std::string(what) + " must be a positive finite length");
  }
}

std::vector<Trig> trig_choices(Factor f) {
  if (f == Factor::periodic) return {Trig::cos, Trig::sin};
  return {Trig::cos};
}

// All modes with l1 <= k1 and l2 <= k2 (l2 ignored in 1-D).
std::vector<AnalyticMode> enumerate_box(const DomainSpec& d, int k1, int k2) {
  const Factors f = factors_of(d.kind());
  const bool two_d = f.second != Factor::none;
  const double norm = two_d ? std::sqrt(4.0 / (d.length1() * d.length2()))
                            : std::sqrt(2.0 / d.length1());
  std::vector<AnalyticMode> out;
  for (int l1 = 1; l1 <= k1; ++l1) {
    for (int l2 = two_d ? 1 : 0; l2 <= (two_d ? k2 : 0); ++l2) {
      for (Trig t1 : trig_choices(f.first)) {
        if (!two_d) {
          out.push_back({l1, 0, t1, Trig::cos, norm});
          continue;
        }
        for (Trig t2 : trig_choices(f.second)) out.push_back({l1, l2, t1, t2, norm});
      }
    }
  }
  return out;
}

void sort_modes(const DomainSpec& d, std::vector<AnalyticMode>& modes, std::vector<double>& lambdas) {
  std::vector<std::size_t> order(modes.size());
  std::vector<double> lam(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) {
    order[i] = i;
    lam[i] = analytic_eigenvalue(d, modes[i]);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ma = modes[a];
    const auto& mb = modes[b];
    return std::tuple(lam[a], ma.l1, ma.l2, ma.trig1, ma.trig2) <
           std::tuple(lam[b], mb.l1, mb.l2, mb.trig1, mb.trig2);
  });
  std::vector<AnalyticMode> sorted;
  sorted.reserve(modes.size());
  lambdas.clear();
  for (auto i : order) {
    sorted.push_back(modes[i]);
    lambdas.push_back(lam[i]);
  }
  modes = std::move(sorted);
}

}  // namespace

std::string to_string(DomainKind k) {
  switch (k) {
    case DomainKind::interval: return "interval";
    case DomainKind::circle: return "circle";
    case DomainKind::rectangle: return "rectangle";
    case DomainKind::cylinder: return "cylinder";
    case DomainKind::torus: return "torus";
    case DomainKind::graph: return "graph";
  }
  return "unknown";
}

DomainKind domain_kind_from_string(const std::string& s) {
  for (auto k : {DomainKind::interval, DomainKind::circle, DomainKind::rectangle,
                 DomainKind::cylinder, DomainKind::torus, DomainKind::graph}) {
    if (to_string(k) == s) return k;
  }
  throw InvalidArgument("unknown domain kind '" + s + "'");
}

DomainSpec DomainSpec::interval(double length) {
  check_length(length, "interval length");
  DomainSpec d;
  d.kind_ = DomainKind::interval;
  d.t1_ = length;
  return d;
}

DomainSpec DomainSpec::circle(double period) {
  check_length(period, "circle period");
  DomainSpec d;
  d.kind_ = DomainKind::circle;
  d.t1_ = period;
  return d;
}

DomainSpec DomainSpec::rectangle(double length1, double length2) {
  check_length(length1, "rectangle T1");
  check_length(length2, "rectangle T2");
  DomainSpec d;
  d.kind_ = DomainKind::rectangle;
  d.t1_ = length1;
  d.t2_ = length2;
  return d;
}

DomainSpec DomainSpec::cylinder(double period1, double length2) {
  check_length(period1, "cylinder period T1");
  check_length(length2, "cylinder length T2");
  DomainSpec d;
  d.kind_ = DomainKind::cylinder;
  d.t1_ = period1;
  d.t2_ = length2;
  return d;
}

DomainSpec DomainSpec::torus(double period1, double period2) {
  check_length(period1, "torus period T1");
  check_length(period2, "torus period T2");
  DomainSpec d;
  d.kind_ = DomainKind::torus;
  d.t1_ = period1;
  d.t2_ = period2;
  return d;
}

DomainSpec DomainSpec::graph(std::size_t node_count, std::vector<Edge> edges) {
  if (node_count == 0) throw InvalidArgument("graph must have at least one node");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    if (e.src >= node_count || e.dst >= node_count) {
      throw InvalidArgument("edge " + std::to_string(i) + " has an endpoint outside [0, " +
                            std::to_string(node_count) + ")");
    }
    if (e.src == e.dst) throw InvalidArgument("edge " + std::to_string(i) + " is a self-loop");
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) {
      throw InvalidArgument("edge " + std::to_string(i) + " has a negative or non-finite weight");
    }
  }
  DomainSpec d;
  d.kind_ = DomainKind::graph;
  d.t1_ = 0.0;
  d.nodes_ = node_count;
  d.edges_ = std::move(edges);
  return d;
}

int DomainSpec::dimension() const noexcept {
  switch (kind_) {
    case DomainKind::rectangle:
    case DomainKind::cylinder:
    case DomainKind::torus: return 2;
    default: return 1;
  }
}

std::size_t DomainSpec::node_of(const Point& p) const {
  if (!is_graph()) throw InvalidArgument("node_of called on a non-graph domain");
  if (!(p.c1 >= 0.0) || p.c1 != std::floor(p.c1) || p.c1 >= static_cast<double>(nodes_)) {
    throw InvalidArgument("node id " + detail::shortest(p.c1) + " is not in [0, " +
                          std::to_string(nodes_) + ")");
  }
  return static_cast<std::size_t>(p.c1);
}

void DomainSpec::validate_point(const Point& p) const {
  if (is_graph()) {
    node_of(p);
    return;
  }
  const Factors f = factors_of(kind_);
  auto check = [](Factor fac, double x, double t, const char* name) {
    if (!std::isfinite(x)) throw InvalidArgument(std::string(name) + " is not finite");
    if (fac == Factor::interval && (x < 0.0 || x > t)) {
      throw InvalidArgument(std::string(name) + " = " + detail::shortest(x) + " outside [0, " +
                            detail::shortest(t) + "]");
    }
  };
  check(f.first, p.c1, t1_, "coordinate 1");
  if (f.second != Factor::none) check(f.second, p.c2, t2_, "coordinate 2");
}

std::uint64_t DomainSpec::fingerprint() const noexcept {
  detail::Fnv1a h;
  h.str(to_string(kind_));
  h.f64(t1_);
  h.f64(t2_);
  h.u64(nodes_);
  h.u64(edges_.size());
  for (const Edge& e : edges_) {
    h.u64(e.src);
    h.u64(e.dst);
    h.f64(e.weight);
  }
  return h.value();
}

std::string DomainSpec::describe() const {
  std::ostringstream os;
  os << to_string(kind_);
  if (is_graph()) {
    os << "(nodes=" << nodes_ << ", edges=" << edges_.size() << ")";
  } else if (dimension() == 2) {
    os << "(" << detail::shortest(t1_) << ", " << detail::shortest(t2_) << ")";
  } else {
    os << "(" << detail::shortest(t1_) << ")";
  }
  return os.str();
}

double analytic_eigenvalue(const DomainSpec& d, const AnalyticMode& m) {
  const Factors f = factors_of(d.kind());
  if (f.first == Factor::none) throw InvalidArgument("analytic_eigenvalue on a graph domain");
  double lam = factor_eigenvalue(f.first, m.l1, d.length1());
  if (f.second != Factor::none) lam += factor_eigenvalue(f.second, m.l2, d.length2());
  return lam;
}

double SpectralBasis::eigenvalue(std::size_t ell) const {
  if (ell < 1 || ell > size()) {
    throw InvalidArgument("eigenfunction index " + std::to_string(ell) + " not in [1, " +
                          std::to_string(size()) + "]");
  }
  return eigenvalues_[ell - 1];
}

std::span<const double> SpectralBasis::vector(std::size_t ell) const {
  if (!is_graph()) throw InvalidArgument("vector() requires a graph basis");
  eigenvalue(ell);
  const std::size_t n = domain_.node_count();
  return std::span<const double>(vectors_).subspan((ell - 1) * n, n);
}

double SpectralBasis::eval(std::size_t ell, const Point& p) const {
  eigenvalue(ell);
  if (is_graph()) {
    const std::size_t node = domain_.node_of(p);
    return vectors_[(ell - 1) * domain_.node_count() + node];
  }
  domain_.validate_point(p);
  const AnalyticMode& m = modes_[ell - 1];
  const Factors f = factors_of(domain_.kind());
  double v = m.norm * factor_value(f.first, m.trig1, m.l1, domain_.length1(), p.c1);
  if (f.second != Factor::none) {
    v *= factor_value(f.second, m.trig2, m.l2, domain_.length2(), p.c2);
  }
  return v;
}

void SpectralBasis::seal() {
  detail::Fnv1a h;
  h.u64(domain_.fingerprint());
  h.f64s(eigenvalues_);
  h.u64(modes_.size());
  for (const auto& m : modes_) {
    h.u64(static_cast<std::uint64_t>(m.l1));
    h.u64(static_cast<std::uint64_t>(m.l2));
    h.u64(m.trig1 == Trig::sin);
    h.u64(m.trig2 == Trig::sin);
    h.f64(m.norm);
  }
  h.f64s(vectors_);
  fingerprint_ = h.value();
}

SpectralBasis SpectralBasis::from_parts(DomainSpec domain, std::vector<double> eigenvalues,
                                        std::vector<AnalyticMode> modes,
                                        std::vector<double> vectors) {
  SpectralBasis b(std::move(domain));
  if (b.is_graph()) {
    if (!modes.empty()) throw InvalidArgument("graph basis cannot carry analytic modes");
    if (vectors.size() != eigenvalues.size() * b.domain_.node_count()) {
      throw InvalidArgument("graph basis: vector data does not match eigenvalue count");
    }
  } else {
    if (!vectors.empty()) throw InvalidArgument("analytic basis cannot carry vectors");
    if (modes.size() != eigenvalues.size()) {
      throw InvalidArgument("analytic basis: mode count does not match eigenvalue count");
    }
  }
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    if (!(eigenvalues[i] > 0.0)) throw InvalidArgument("basis eigenvalues must be positive");
    if (i > 0 && eigenvalues[i] < eigenvalues[i - 1]) {
      throw InvalidArgument("basis eigenvalues must be sorted ascending");
    }
  }
  b.eigenvalues_ = std::move(eigenvalues);
  b.modes_ = std::move(modes);
  b.vectors_ = std::move(vectors);
  b.seal();
  return b;
}

SpectralBasis build_analytic_basis(const DomainSpec& domain, std::size_t count) {
  if (domain.is_graph()) {
    throw BasisMismatch("build_analytic_basis: graph domains need build_graph_basis");
  }
  if (count < 1) throw InvalidArgument("basis size L must be at least 1");
  if (count > 1'000'000) throw InvalidArgument("basis size L is unreasonably large");

  const Factors f = factors_of(domain.kind());
  std::vector<AnalyticMode> modes;
  std::vector<double> lambdas;
  if (f.second == Factor::none) {
    modes = enumerate_box(domain, static_cast<int>(count), 0);
    sort_modes(domain, modes, lambdas);
  } else {
    // Grow a square box of indices until every mode outside it has an
    // eigenvalue strictly above the L-th smallest inside it. Eigenvalues
    // increase in each index, so the box boundary bounds the outside.
    for (int k = 1;; k *= 2) {
      modes = enumerate_box(domain, k, k);
      sort_modes(domain, modes, lambdas);
      if (modes.size() < count) continue;
      const double outside = std::min(analytic_eigenvalue(domain, {k + 1, 1}),
                                      analytic_eigenvalue(domain, {1, k + 1}));
      if (lambdas[count - 1] < outside) break;
    }
  }
  modes.resize(count);
  lambdas.resize(count);

  SpectralBasis b(domain);
  b.eigenvalues_ = std::move(lambdas);
  b.modes_ = std::move(modes);
  b.seal();
  return b;
}

SpectralBasis build_analytic_basis(const DomainSpec& domain, const ModeGrid& grid) {
  if (domain.is_graph()) {
    throw BasisMismatch("build_analytic_basis: graph domains need build_graph_basis");
  }
  if (grid.max_l1 < 1) throw InvalidArgument("mode grid needs max_l1 >= 1");
  const bool two_d = domain.dimension() == 2;
  if (two_d && grid.max_l2 < 1) throw InvalidArgument("mode grid needs max_l2 >= 1");

  std::vector<AnalyticMode> modes = enumerate_box(domain, grid.max_l1, grid.max_l2);
  std::vector<double> lambdas;
  sort_modes(domain, modes, lambdas);

  SpectralBasis b(domain);
  b.eigenvalues_ = std::move(lambdas);
  b.modes_ = std::move(modes);
  b.seal();
  return b;
}

SpectralBasis build_graph_basis(const DomainSpec& domain, std::size_t count) {
  if (!domain.is_graph()) throw BasisMismatch("build_graph_basis: domain is not a graph");
  const std::size_t n = domain.node_count();
  if (n > kMaxGraphNodes) {
    throw InvalidArgument("graph has " + std::to_string(n) + " nodes; the dense solver limit is " +
                          std::to_string(kMaxGraphNodes));
  }
  if (count < 1) throw InvalidArgument("basis size L must be at least 1");
  if (count > n - 1) {
    throw InvalidArgument("basis size L = " + std::to_string(count) + " exceeds node_count - 1 = " +
                          std::to_string(n - 1));
  }

  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(ni, ni);
  for (const Edge& e : domain.edges()) {
    const auto s = static_cast<Eigen::Index>(e.src);
    const auto t = static_cast<Eigen::Index>(e.dst);
    lap(s, t) -= e.weight;
    lap(t, s) -= e.weight;
    lap(s, s) += e.weight;
    lap(t, t) += e.weight;
  }
  const double max_degree = lap.diagonal().maxCoeff();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
  if (solver.info() != Eigen::Success) {
    throw ComputationError("symmetric eigendecomposition of the graph Laplacian failed");
  }
  const Eigen::VectorXd& vals = solver.eigenvalues();
  const Eigen::MatrixXd& vecs = solver.eigenvectors();

  const double zero_tol = 1e-9 * max_degree;
  std::size_t zero_modes = 0;
  for (Eigen::Index i = 0; i < ni; ++i) {
    if (vals(i) < zero_tol || max_degree == 0.0) ++zero_modes;
  }
  if (zero_modes != 1) {
    throw ComputationError("graph is disconnected: Laplacian has " + std::to_string(zero_modes) +
                           " zero-eigenvalue modes");
  }

  SpectralBasis b(domain);
  b.eigenvalues_.reserve(count);
  b.vectors_.reserve(count * n);
  for (std::size_t ell = 1; ell <= count; ++ell) {
    const auto col = static_cast<Eigen::Index>(ell);
    b.eigenvalues_.push_back(vals(col));
    const double max_abs = vecs.col(col).cwiseAbs().maxCoeff();
    double sign = 1.0;
    for (Eigen::Index i = 0; i < ni; ++i) {
      if (std::abs(vecs(i, col)) >= max_abs - 1e-12 * std::max(1.0, max_abs)) {
        sign = vecs(i, col) < 0.0 ? -1.0 : 1.0;
        break;
      }
    }
    for (Eigen::Index i = 0; i < ni; ++i) b.vectors_.push_back(sign * vecs(i, col));
  }
  b.seal();
  return b;
}

SpectralBasis build_basis(const DomainSpec& domain, std::size_t count) {
  return domain.is_graph() ? build_graph_basis(domain, count) : build_analytic_basis(domain, count);
}

SpectralWeight SpectralWeight::heat(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("heat weight needs t > 0");
  return SpectralWeight(Heat{t});
}

SpectralWeight SpectralWeight::biharmonic() { return SpectralWeight(Biharmonic{}); }

SpectralWeight SpectralWeight::custom(std::vector<std::pair<double, double>> table) {
  for (const auto& [lam, a] : table) {
    if (!(lam >= 0.0) || !(a >= 0.0) || !std::isfinite(a)) {
      throw InvalidArgument("custom weight table needs lambda >= 0 and alpha >= 0");
    }
  }
  return SpectralWeight(Custom{std::move(table)});
}

double SpectralWeight::operator()(double lambda) const {
  if (!(lambda >= 0.0)) throw InvalidArgument("spectral weight evaluated at negative lambda");
  if (const auto* h = std::get_if<Heat>(&kind_)) return std::exp(-h->t * lambda);
  if (std::holds_alternative<Biharmonic>(kind_)) {
    return lambda == 0.0 ? 0.0 : 1.0 / (lambda * lambda);
  }
  const auto& table = std::get<Custom>(kind_).table;
  for (const auto& [lam, a] : table) {
    if (lam == lambda) return a;
  }
  throw InvalidArgument("custom weight table has no entry for lambda = " + detail::shortest(lambda));
}

std::string SpectralWeight::name() const {
  if (const auto* h = std::get_if<Heat>(&kind_)) return "heat(t=" + detail::shortest(h->t) + ")";
  if (std::holds_alternative<Biharmonic>(kind_)) return "biharmonic";
  detail::Fnv1a fp;
  for (const auto& [lam, a] : std::get<Custom>(kind_).table) {
    fp.f64(lam);
    fp.f64(a);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fp.value()));
  return std::string("custom(") + buf + ")";
}

std::vector<double> basis_weights(const SpectralBasis& basis, const SpectralWeight& w) {
  std::vector<double> out;
  out.reserve(basis.size());
  for (double lam : basis.eigenvalues()) out.push_back(w(lam));
  return out;
}

}  // namespace isw
