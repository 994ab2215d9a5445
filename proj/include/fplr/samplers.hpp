#ifndef FPLR_SAMPLERS_HPP
#define FPLR_SAMPLERS_HPP

#include <complex>

#include "fplr/rng.hpp"

namespace fplr {

using cplx = std::complex<double>;

double sample_std_normal(Rng& rng);

/// Standard circularly-symmetric complex normal, E|z|^2 = 1.
cplx sample_std_complex_normal(Rng& rng);

/// Gamma(shape, rate) by Marsaglia-Tsang; shape<1 handled by boosting.
double sample_gamma(Rng& rng, double shape, double rate);

double sample_beta(Rng& rng, double a, double b);

/// Gamma(shape, rate) conditioned on (0,1].  Exact inverse-CDF in log
/// space (bisection on log gamma(shape, rate*x)), so extreme parameters
/// cannot stall a rejection loop.  Requires rate > 0.
double sample_truncated_gamma(Rng& rng, double shape, double rate);

/// von Mises on the unit circle, density exp(kappa*Re(s*conj(nu0)))/I0(kappa)
/// with respect to the uniform distribution; Best-Fisher rejection sampler.
cplx sample_von_mises(Rng& rng, cplx nu0, double kappa);

/// Mode of the D(alpha,beta,lambda) density on [0,1].
double d_mode(double alpha, double beta, double lambda);

struct DSampleStats {
  long proposals = 0;
  long accepts = 0;
  double acceptance_rate() const {
    return proposals == 0 ? 1.0 : static_cast<double>(accepts) / proposals;
  }
};

/// Exact sample from D(alpha,beta,lambda), density proportional to
/// delta^(alpha-1) (1-delta)^(beta-1) exp(-lambda*delta) on (0,1).
/// Two-branch rejection scheme: reflection to D(beta,alpha,-lambda) when the
/// mode sits right and the mirrored proposal is valid, otherwise a truncated
/// gamma proposal matched at the mode.
double sample_d_distribution(Rng& rng, double alpha, double beta,
                             double lambda, DSampleStats* stats = nullptr);

}  // namespace fplr

#endif
