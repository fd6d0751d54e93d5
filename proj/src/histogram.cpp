#include "isw/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "isw/error.hpp"
#include "isw/parallel.hpp"

namespace isw {
namespace {

void check_shape(const std::vector<Point>& support, const std::vector<double>& weights) {
  if (support.empty()) throw InvalidArgument("histogram support is empty");
  if (support.size() != weights.size()) {
    throw InvalidArgument("histogram support and weights differ in length");
  }
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InvalidArgument("histogram weights must be finite and nonnegative");
    }
  }
}

double total(const std::vector<double>& w) { return std::accumulate(w.begin(), w.end(), 0.0); }

}  // namespace

Histogram::Histogram(const DomainSpec& domain, std::vector<Point> support,
                     std::vector<double> weights) {
  check_shape(support, weights);
  const double sum = total(weights);
  if (!(sum > 0.0)) throw InvalidArgument("histogram has zero total weight");
  if (std::abs(sum - 1.0) > 1e-6) {
    throw InvalidArgument("histogram weights sum to " + std::to_string(sum) +
                          ", not 1 (use from_counts for unnormalized input)");
  }
  for (const Point& p : support) domain.validate_point(p);
  for (double& w : weights) w /= sum;
  support_ = std::move(support);
  weights_ = std::move(weights);
  domain_fp_ = domain.fingerprint();
}

Histogram Histogram::from_counts(const DomainSpec& domain, std::vector<Point> support,
                                 std::vector<double> counts) {
  check_shape(support, counts);
  const double sum = total(counts);
  if (!(sum > 0.0)) throw InvalidArgument("histogram has zero total weight");
  for (double& c : counts) c /= sum;
  return Histogram(domain, std::move(support), std::move(counts));
}

LineHistogram pushforward(const Histogram& h, const SpectralBasis& basis, std::size_t ell) {
  if (h.domain_fingerprint() != basis.domain().fingerprint()) {
    throw BasisMismatch("histogram domain does not match the basis domain " +
                        basis.domain().describe());
  }
  basis.eigenvalue(ell);
  LineHistogram out;
  out.positions.reserve(h.size());
  for (const Point& p : h.support()) out.positions.push_back(basis.eval(ell, p));
  out.weights.assign(h.weights().begin(), h.weights().end());
  return out;
}

QuantileFunction::QuantileFunction(const LineHistogram& lh) {
  if (lh.positions.empty() || lh.positions.size() != lh.weights.size()) {
    throw InvalidArgument("line histogram must be nonempty with matching weights");
  }
  std::vector<std::size_t> order(lh.positions.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return lh.positions[a] < lh.positions[b];
  });
  positions_.reserve(order.size());
  cumulative_.reserve(order.size());
  double cum = 0.0;
  for (auto i : order) {
    cum += lh.weights[i];
    positions_.push_back(lh.positions[i]);
    cumulative_.push_back(cum);
  }
}

double QuantileFunction::operator()(double s) const {
  if (!(s >= 0.0 && s < 1.0)) throw InvalidArgument("quantile level must lie in [0, 1)");
  // First cumulative weight strictly greater than s. If rounding leaves the
  // total just under s, the largest atom is the answer.
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  if (it == cumulative_.end()) return positions_.back();
  return positions_[static_cast<std::size_t>(it - cumulative_.begin())];
}

double quantile(const LineHistogram& lh, double s) { return QuantileFunction(lh)(s); }

std::vector<double> embedding_knots(std::size_t dprime) {
  std::vector<double> s(dprime);
  for (std::size_t k = 0; k < dprime; ++k) {
    s[k] = static_cast<double>(k + 1) / static_cast<double>(dprime + 1);
  }
  return s;
}

std::vector<double> embed_line(const LineHistogram& lh, std::size_t dprime) {
  if (dprime < 1) throw InvalidArgument("embedding dimension D' must be at least 1");
  const QuantileFunction q(lh);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dprime));
  std::vector<double> out;
  out.reserve(dprime);
  for (double s : embedding_knots(dprime)) out.push_back(scale * q(s));
  return out;
}

Embedding embed(const Histogram& h, const SpectralBasis& basis, const SpectralWeight& w,
                std::size_t dprime) {
  if (basis.size() < 1) throw InvalidArgument("embedding needs a basis with L >= 1");
  if (dprime < 1) throw InvalidArgument("embedding dimension D' must be at least 1");
  Embedding e;
  e.meta = {basis.size(), dprime, w.name(), basis.fingerprint()};
  e.values.reserve(basis.size() * dprime);
  for (std::size_t ell = 1; ell <= basis.size(); ++ell) {
    const double a = std::sqrt(w(basis.eigenvalue(ell)));
    for (double v : embed_line(pushforward(h, basis, ell), dprime)) e.values.push_back(a * v);
  }
  return e;
}

std::vector<Embedding> embed_all(std::span<const Histogram> hs, const SpectralBasis& basis,
                                 const SpectralWeight& w, std::size_t dprime) {
  std::vector<Embedding> out(hs.size());
  parallel_for(hs.size(), [&](std::size_t i) { out[i] = embed(hs[i], basis, w, dprime); });
  return out;
}

std::string fingerprint_hex(std::uint64_t fp) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fp));
  return buf;
}

std::uint64_t fingerprint_from_hex(const std::string& hex) {
  if (hex.size() != 16 || hex.find_first_not_of("0123456789abcdef") != std::string::npos) {
    throw ParseError("malformed fingerprint '" + hex + "'");
  }
  return std::stoull(hex, nullptr, 16);
}

}  // namespace isw
