#ifndef FPLR_MINUTIA_HPP
#define FPLR_MINUTIA_HPP

#include <complex>
#include <string>
#include <utility>
#include <vector>

namespace fplr {

using cplx = std::complex<double>;

/// One minutia: location in the complex plane, unit-modulus orientation,
/// and type (-1 ridge ending, +1 bifurcation, 0 unobserved).
struct Minutia {
  cplx location;
  cplx orientation;
  int mtype = 0;
};

/// Validating constructor; normalizes the orientation to unit modulus and
/// rejects orientations further than tol from the circle or types outside
/// {-1,0,1}.
Minutia make_minutia(cplx location, cplx orientation, int mtype,
                     double tol = 1e-6);
Minutia make_minutia(double x, double y, double theta, int mtype);

/// An observed minutia configuration with its derived statistics.
/// Immutable after construction; all statistics are recomputed
/// deterministically from the minutia list.
class MinutiaConfig {
 public:
  MinutiaConfig() = default;
  MinutiaConfig(std::string id, std::vector<Minutia> minutiae);

  const std::string& id() const { return id_; }
  const std::vector<Minutia>& minutiae() const { return minutiae_; }
  const Minutia& operator[](int i) const { return minutiae_[i]; }
  int size() const { return static_cast<int>(minutiae_.size()); }

  /// Count of minutiae with the given type, t in {-1,0,1}.
  int type_count(int t) const;
  cplx centroid() const { return centroid_; }
  /// Sum of squared deviations from the centroid.
  double scatter() const { return scatter_; }

 private:
  std::string id_;
  std::vector<Minutia> minutiae_;
  cplx centroid_{0.0, 0.0};
  double scatter_ = 0.0;
  int type_counts_[3] = {0, 0, 0};  // indices 0,1,2 <-> types -1,0,1
};

/// r -> psi*r + tau on locations, s -> psi*s/|psi| on orientations.
struct SimilarityTransform {
  cplx tau{0.0, 0.0};
  cplx psi{1.0, 0.0};
};

MinutiaConfig apply_transform(const MinutiaConfig& cfg,
                              const SimilarityTransform& t);

/// A bipartite matching of maximum degree one between configurations of
/// sizes n_a and n_b.  Absent entries play the role of the "no match"
/// sentinel.  Validated on construction.
class Matching {
 public:
  Matching() = default;
  Matching(int n_a, int n_b,
           std::vector<std::pair<int, int>> edges = {});

  static Matching empty(int n_a, int n_b) { return Matching(n_a, n_b); }

  int n_a() const { return n_a_; }
  int n_b() const { return n_b_; }
  int size() const { return static_cast<int>(edges_.size()); }

  /// Edges sorted by the b index.
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  /// Index in A matched to b, or -1.
  int a_of_b(int b) const { return a_of_b_[b]; }
  /// Index in B matched to a, or -1.
  int b_of_a(int a) const { return b_of_a_[a]; }

  Matching with_edge(int a, int b) const;
  Matching without_b(int b) const;

  bool operator==(const Matching& o) const {
    return n_a_ == o.n_a_ && n_b_ == o.n_b_ && edges_ == o.edges_;
  }

 private:
  int n_a_ = 0;
  int n_b_ = 0;
  std::vector<std::pair<int, int>> edges_;
  std::vector<int> a_of_b_;
  std::vector<int> b_of_a_;
};

/// |Xi(A,B)| = sum_k C(nA,k) C(nB,k) k!, exact; throws if it does not fit
/// in an unsigned 64-bit integer.
unsigned long long xi_space_size_exact(int n_a, int n_b);

/// log10 |Xi(A,B)|, safe for large configurations.
double xi_space_size_log10(int n_a, int n_b);

}  // namespace fplr

#endif
