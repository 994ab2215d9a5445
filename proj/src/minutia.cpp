#include "fplr/minutia.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fplr {

Minutia make_minutia(cplx location, cplx orientation, int mtype, double tol) {
  if (mtype < -1 || mtype > 1)
    throw std::invalid_argument("minutia type must be in {-1,0,1}");
  double mod = std::abs(orientation);
  if (!std::isfinite(mod) || std::abs(mod - 1.0) > tol)
    throw std::invalid_argument("minutia orientation must have unit modulus");
  return Minutia{location, orientation / mod, mtype};
}

Minutia make_minutia(double x, double y, double theta, int mtype) {
  return make_minutia(cplx{x, y}, std::polar(1.0, theta), mtype);
}

MinutiaConfig::MinutiaConfig(std::string id, std::vector<Minutia> minutiae)
    : id_(std::move(id)), minutiae_(std::move(minutiae)) {
  for (const auto& m : minutiae_) {
    if (m.mtype < -1 || m.mtype > 1)
      throw std::invalid_argument("minutia type must be in {-1,0,1}");
    if (std::abs(std::abs(m.orientation) - 1.0) > 1e-9)
      throw std::invalid_argument("minutia orientation must be normalized");
    centroid_ += m.location;
    ++type_counts_[m.mtype + 1];
  }
  if (!minutiae_.empty()) centroid_ /= static_cast<double>(minutiae_.size());
  for (const auto& m : minutiae_) scatter_ += std::norm(m.location - centroid_);
}

int MinutiaConfig::type_count(int t) const {
  if (t < -1 || t > 1) throw std::invalid_argument("type must be in {-1,0,1}");
  return type_counts_[t + 1];
}

MinutiaConfig apply_transform(const MinutiaConfig& cfg,
                              const SimilarityTransform& t) {
  if (t.psi == cplx{0.0, 0.0})
    throw std::invalid_argument("similarity transform requires psi != 0");
  double mod = std::abs(t.psi);
  std::vector<Minutia> out;
  out.reserve(cfg.size());
  for (const auto& m : cfg.minutiae())
    out.push_back(Minutia{t.psi * m.location + t.tau,
                          t.psi / mod * m.orientation, m.mtype});
  return MinutiaConfig(cfg.id(), std::move(out));
}

Matching::Matching(int n_a, int n_b, std::vector<std::pair<int, int>> edges)
    : n_a_(n_a), n_b_(n_b), edges_(std::move(edges)),
      a_of_b_(n_b, -1), b_of_a_(n_a, -1) {
  if (n_a < 0 || n_b < 0)
    throw std::invalid_argument("matching sizes must be non-negative");
  for (auto [a, b] : edges_) {
    if (a < 0 || a >= n_a_ || b < 0 || b >= n_b_)
      throw std::invalid_argument("matching edge index out of range");
    if (a_of_b_[b] != -1 || b_of_a_[a] != -1)
      throw std::invalid_argument("matching must have maximum degree one");
    a_of_b_[b] = a;
    b_of_a_[a] = b;
  }
  std::sort(edges_.begin(), edges_.end(),
            [](auto& x, auto& y) { return x.second < y.second; });
}

Matching Matching::with_edge(int a, int b) const {
  auto e = edges_;
  e.emplace_back(a, b);
  return Matching(n_a_, n_b_, std::move(e));
}

Matching Matching::without_b(int b) const {
  if (b < 0 || b >= n_b_) throw std::invalid_argument("b index out of range");
  std::vector<std::pair<int, int>> e;
  e.reserve(edges_.size());
  for (auto& p : edges_)
    if (p.second != b) e.push_back(p);
  return Matching(n_a_, n_b_, std::move(e));
}

unsigned long long xi_space_size_exact(int n_a, int n_b) {
  if (n_a < 0 || n_b < 0)
    throw std::invalid_argument("configuration sizes must be non-negative");
  // term_k = C(nA,k) C(nB,k) k!, built by the recurrence
  // term_{k+1} = term_k * (nA-k)(nB-k)/(k+1).
  unsigned long long total = 0;
  long double term = 1.0L;
  for (int k = 0; k <= std::min(n_a, n_b); ++k) {
    if (term > 1.8e19L) throw std::overflow_error("xi_space_size overflows");
    unsigned long long t = static_cast<unsigned long long>(term + 0.5L);
    if (total > ~0ull - t) throw std::overflow_error("xi_space_size overflows");
    total += t;
    term *= static_cast<long double>(n_a - k) * (n_b - k) / (k + 1.0L);
  }
  return total;
}

double xi_space_size_log10(int n_a, int n_b) {
  if (n_a < 0 || n_b < 0)
    throw std::invalid_argument("configuration sizes must be non-negative");
  // logsumexp over log terms: lC(nA,k)+lC(nB,k)+lgamma(k+1).
  auto lchoose = [](int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
           std::lgamma(n - k + 1.0);
  };
  int kmax = std::min(n_a, n_b);
  std::vector<double> lt(kmax + 1);
  double mx = -HUGE_VAL;
  for (int k = 0; k <= kmax; ++k) {
    lt[k] = lchoose(n_a, k) + lchoose(n_b, k) + std::lgamma(k + 1.0);
    mx = std::max(mx, lt[k]);
  }
  double s = 0.0;
  for (double v : lt) s += std::exp(v - mx);
  return (mx + std::log(s)) / std::log(10.0);
}

}  // namespace fplr
