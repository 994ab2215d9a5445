#ifndef FPLR_SPECIAL_HPP
#define FPLR_SPECIAL_HPP

namespace fplr {

/// log I0(kappa), modified Bessel function of the first kind, order zero.
/// Series below the switch point, asymptotic expansion above; stays in
/// log space so kappa up to ~1e4 does not overflow.
double log_bessel_i0(double kappa);

/// log I1(kappa).  Requires kappa > 0 (I1(0) = 0).
double log_bessel_i1(double kappa);

/// I1(kappa)/I0(kappa), strictly increasing on [0,inf), values in [0,1).
double bessel_ratio_i1_i0(double kappa);

/// Solve I1(k)/I0(k) = r for k by bisection; r in [0,1).
double bessel_ratio_inverse(double r);

/// log 1F1(a,b,x), confluent hypergeometric (Kummer) function.
/// Supported patterns: a>0, b>0 and, for x<0, b-a>0 (handled through the
/// Kummer transform 1F1(a,b,x) = e^x 1F1(b-a,b,-x)).
double log_kummer_1f1(double a, double b, double x);

/// log Beta(a,b).
double lbeta(double a, double b);

/// Regularized lower incomplete gamma P(a,x).
double gamma_p(double a, double x);

/// log of the unregularized lower incomplete gamma function gamma(a,x),
/// stable when P(a,x) underflows.
double log_lower_gamma(double a, double x);

/// log of the normalizer of the D(alpha,beta,lambda) density
/// delta^(alpha-1)(1-delta)^(beta-1)exp(-lambda*delta) on (0,1):
/// logB(alpha,beta) + log 1F1(alpha, alpha+beta, -lambda).
double log_d_normalizer(double alpha, double beta, double lambda);

}  // namespace fplr

#endif
