#ifndef FPLR_MCMC_HPP
#define FPLR_MCMC_HPP

#include <iosfwd>
#include <vector>

#include "fplr/minutia.hpp"
#include "fplr/model.hpp"
#include "fplr/rng.hpp"
#include "fplr/samplers.hpp"

namespace fplr {

/// D(alpha,beta,lambda) parameters of a thinning-probability conditional.
struct DParams {
  double alpha;
  double beta;
  double lambda;
};

/// log density of D(alpha,beta,lambda) at delta.
double d_logpdf(double delta, const DParams& p);

/// Bivariate complex normal full conditional of (tau_a, tau_b).
struct TauConditional {
  cplx mean_a, mean_b;
  double cov_aa, cov_bb;  // real diagonal of the covariance
  cplx cov_ab;
  double log_det_cov;

  std::pair<cplx, cplx> sample(Rng& rng) const;
  double logpdf(cplx ta, cplx tb) const;
};

/// Full conditional of u = sigma^-2: Gamma(shape, rate).  Ordinates are
/// reported in u space (the Jacobian convention is applied once, in the
/// Chib numerator).
struct SigmaConditional {
  double shape;
  double rate;

  double sample_sigma(Rng& rng) const;          // draws u, returns sigma
  double logpdf_u(double u) const;
};

/// Full conditional of psi: von Mises with natural parameter nu0
/// (uniform when nu0 = 0).
struct PsiConditional {
  cplx nu0;

  cplx sample(Rng& rng) const;
  double logpdf(cplx psi) const;  // w.r.t. the uniform distribution
};

struct ChainState {
  LatentParams theta;
  Matching xi;
  long sweep_index = 0;
};

/// Metropolis-within-Gibbs sampler for (theta, xi) given one pair (A,B).
/// One sweep updates delta_A, delta_B, (tau_A,tau_B), sigma, psi in that
/// order, then performs n_A xi updates.
///
/// Components of theta can be clamped (for Chib reduced runs), and a prefix
/// of B (in index order) can have its xi edges clamped to a reference
/// matching.
class GibbsSampler {
 public:
  GibbsSampler(const MinutiaConfig& a, const MinutiaConfig& b,
               const FixedParams& fixed);

  /// xi empty; delta_A at its prior mean, delta_B = 1/2, tau at the data
  /// centroids, psi = 1, sigma^2 = (S_A+S_B)/(2(n_A+n_B)).
  void init_default();

  void set_theta(const LatentParams& theta);
  void set_xi(const Matching& xi);

  void clamp_delta_a(double v);
  void clamp_delta_b(double v);
  void clamp_tau(cplx ta, cplx tb);
  void clamp_sigma(double v);
  void clamp_psi(cplx v);
  /// Clamp the edges of every b < b_limit to those of the reference
  /// matching; the remaining b's stay free.
  void clamp_xi_below(int b_limit, const Matching& reference);
  /// Freeze the entire matching (no xi moves at all).
  void clamp_xi_all();

  void sweep(Rng& rng);
  void xi_sweep(Rng& rng);     // n_A xi steps only
  void xi_step(Rng& rng);      // a single beta update

  const LatentParams& theta() const { return theta_; }
  ChainState state() const;
  Matching xi() const;
  int n_xi() const { return n_xi_; }

  // Full-conditional parameters at the current state.
  DParams cond_delta_a_params() const;
  DParams cond_delta_b_params() const;
  TauConditional cond_tau_params() const;
  SigmaConditional cond_sigma_params() const;
  PsiConditional cond_psi_params() const;

  /// pr(b's match = a_star | every other edge of the current state),
  /// normalized over the permitted moves; a_star = -1 means unmatched.
  double xi_component_prob(int b, int a_star);

  /// Optional diagnostics sink: one CSV line per sweep.
  void set_trace(std::ostream* out) { trace_ = out; }
  static const char* trace_header();

 private:
  void refresh_tables();
  void unmatch_b(int b);
  void match(int a, int b);
  double column_normalizer(int b, int skip_current_of_b) const;

  const MinutiaConfig& a_;
  const MinutiaConfig& b_;
  FixedParams fixed_;
  LatentParams theta_;

  int na_ = 0, nb_ = 0;
  std::vector<int> a_of_b_, b_of_a_;
  int n_xi_ = 0;
  long sweep_index_ = 0;

  bool clamp_da_ = false, clamp_db_ = false, clamp_tau_ = false,
       clamp_sigma_ = false, clamp_psi_ = false;
  int xi_clamp_limit_ = 0;  // b < limit are clamped
  std::vector<int> free_b_;

  // Per-sweep tables for the xi kernel (valid for the current theta):
  // weights_[a*nb+b] = w(a,b|theta), exps_ = exp(w - colmax), phi weight
  // exp(-colmax) per column, colsum over all a.
  std::vector<double> weights_, exps_;
  std::vector<double> col_max_, col_phi_, col_sum_;
  bool tables_fresh_ = false;

  std::ostream* trace_ = nullptr;
};

/// One Alg.-4 style update of the matching at fixed theta (convenience
/// wrapper used by tests; builds the sampler context each call).
Matching step_xi(Rng& rng, const MinutiaConfig& a, const MinutiaConfig& b,
                 const Matching& xi, const LatentParams& theta,
                 const FixedParams& fixed);

/// Exact maximizer of log_joint_hp over matchings at fixed theta:
/// maximum-weight bipartite matching on the positive-weight subgraph,
/// solved by an augmenting-path assignment algorithm.
Matching argmax_xi(const MinutiaConfig& a, const MinutiaConfig& b,
                   const LatentParams& theta, const FixedParams& fixed);

/// Exact solver for the rectangular assignment problem used by argmax_xi:
/// returns, for each row, the assigned column (or -1), maximizing the sum
/// of weights over assigned cells; only cells with weight > 0 end up
/// assigned.  Exposed for testing.
std::vector<int> max_weight_assignment(int n_rows, int n_cols,
                                       const std::vector<double>& weights);

}  // namespace fplr

#endif
