#ifndef FPLR_MODEL_HPP
#define FPLR_MODEL_HPP

#include "fplr/minutia.hpp"

namespace fplr {

/// Population-level parameters treated as known at scoring time.
/// epsilon is carried for simulation fidelity; it cancels in the
/// likelihood ratio and never enters scoring.
struct FixedParams {
  double rho0 = 132.74;
  double chi = 0.38;
  double epsilon = 0.1;
  double omega = 0.047;
  double kappa = 35.0;
  double alpha_delta = 14.67;
  double beta_delta = 3.30;

  void validate() const;
};

/// Per-comparison nuisance parameters theta = (dA, dB, tauA, tauB, sigma, psi).
struct LatentParams {
  double delta_a = 0.5;
  double delta_b = 0.5;
  cplx tau_a{0.0, 0.0};
  cplx tau_b{0.0, 0.0};
  double sigma = 1.0;
  cplx psi{1.0, 0.0};
};

/// Derived quantities of the matched-pair covariance
/// Sigma_AB = sigma^2 [[1, psi/(1+w^2)], [conj(psi)/(1+w^2), 1]]
/// that every density evaluation needs.  x and y are the recurring
/// rational functions of omega:
///   x = (w^2+1)^2 / ((w^2+1)^2 - 1),   y = (w^2+1) / ((w^2+1)^2 - 1).
struct SigmaAB {
  double sigma2;
  cplx psi;
  cplx coupling;       // psi/(1+w^2)
  double x;
  double y;
  double log_det;      // log |Sigma_AB|

  SigmaAB(double sigma, cplx psi, double omega);
};

/// T(ta,tb): 1 if ta*tb = 0; 0 if ta*tb = -1; 1/chi and 1/(1-chi) on the
/// matched-type diagonal.
double type_compat(int ta, int tb, double chi);
/// log T; -inf for incompatible types.
double log_type_compat(int ta, int tb, double chi);

/// log prior log pr(theta): Beta(alpha_delta,beta_delta) for delta_a,
/// uniform delta_b, improper sigma^-5 (constant convention: exactly
/// -5 log sigma), psi uniform on the circle.  -inf outside the domain.
double log_prior(const LatentParams& theta, const FixedParams& fixed);

/// Analytic log pr(A,B|H_d), excluding the data-only factors
/// c~(A) c~(B), which are dropped from both hypotheses and cancel in the
/// likelihood ratio.
double log_marginal_hd(const MinutiaConfig& a, const MinutiaConfig& b,
                       const FixedParams& fixed);

/// log pr(A,B,xi|theta,H_p), same dropped-constant convention as
/// log_marginal_hd.  Returns -inf when a matched pair has incompatible
/// types (ta*tb = -1).
double log_joint_hp(const MinutiaConfig& a, const MinutiaConfig& b,
                    const Matching& xi, const LatentParams& theta,
                    const FixedParams& fixed);

/// The edge weight w(a,b|theta): the exact change in log_joint_hp from
/// adding the (otherwise unmatched) pair a~b to a matching.
double edge_weight(const Minutia& a, const Minutia& b,
                   const LatentParams& theta, const FixedParams& fixed);

/// Sentinel-aware overload: either side absent gives weight 0.
double edge_weight(const Minutia* a, const Minutia* b,
                   const LatentParams& theta, const FixedParams& fixed);

/// log of the univariate complex normal density phi(r; mu, s2) =
/// exp(-|r-mu|^2/s2)/(pi s2).
double log_cnormal(cplx r, cplx mu, double s2);

/// log of the matched-pair density phi_2(ra, rb; tauA, tauB, Sigma_AB).
double log_cnormal2(cplx ra, cplx rb, cplx tau_a, cplx tau_b,
                    const SigmaAB& s);

}  // namespace fplr

#endif
