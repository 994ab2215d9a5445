#include "fplr/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fplr/special.hpp"

namespace fplr {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

void FixedParams::validate() const {
  if (!(rho0 > 0.0)) throw std::invalid_argument("rho0 must be > 0");
  if (!(chi > 0.0 && chi < 1.0))
    throw std::invalid_argument("chi must be in (0,1)");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("epsilon must be in (0,1)");
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be > 0");
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be > 0");
  if (!(alpha_delta > 0.0) || !(beta_delta > 0.0))
    throw std::invalid_argument("alpha_delta, beta_delta must be > 0");
}

SigmaAB::SigmaAB(double sigma, cplx psi_in, double omega) {
  if (!(sigma > 0.0) || !(omega > 0.0))
    throw std::invalid_argument("SigmaAB: need sigma>0, omega>0");
  double w2p1 = omega * omega + 1.0;
  double denom = w2p1 * w2p1 - 1.0;  // = w^2 (w^2 + 2) > 0
  sigma2 = sigma * sigma;
  psi = psi_in;
  coupling = psi_in / w2p1;
  x = w2p1 * w2p1 / denom;
  y = w2p1 / denom;
  log_det = 2.0 * std::log(sigma2) + std::log(denom) - 2.0 * std::log(w2p1);
}

double type_compat(int ta, int tb, double chi) {
  if (ta < -1 || ta > 1 || tb < -1 || tb > 1)
    throw std::invalid_argument("types must be in {-1,0,1}");
  int prod = ta * tb;
  if (prod == 0) return 1.0;
  if (prod == -1) return 0.0;
  return ta == 1 ? 1.0 / chi : 1.0 / (1.0 - chi);
}

double log_type_compat(int ta, int tb, double chi) {
  double t = type_compat(ta, tb, chi);
  return t == 0.0 ? kNegInf : std::log(t);
}

double log_prior(const LatentParams& theta, const FixedParams& fixed) {
  if (!(theta.delta_a > 0.0 && theta.delta_a < 1.0)) return kNegInf;
  if (!(theta.delta_b > 0.0 && theta.delta_b < 1.0)) return kNegInf;
  if (!(theta.sigma > 0.0)) return kNegInf;
  const double a = fixed.alpha_delta, b = fixed.beta_delta;
  return (a - 1.0) * std::log(theta.delta_a) +
         (b - 1.0) * std::log1p(-theta.delta_a) - lbeta(a, b) -
         5.0 * std::log(theta.sigma);
}

double log_cnormal(cplx r, cplx mu, double s2) {
  return -std::norm(r - mu) / s2 - std::log(M_PI * s2);
}

double log_cnormal2(cplx ra, cplx rb, cplx tau_a, cplx tau_b,
                    const SigmaAB& s) {
  cplx da = ra - tau_a;
  cplx db = rb - tau_b;
  // (conj d)^T Sigma^-1 d with Sigma = sigma2 [[1, c],[conj c, 1]],
  // c = psi/(1+w^2):
  //   [ x (|da|^2 + |db|^2) - 2 y Re(conj(psi) da conj(db)) ] / sigma2.
  double quad = (s.x * (std::norm(da) + std::norm(db)) -
                 2.0 * s.y * (std::conj(s.psi) * da * std::conj(db)).real()) /
                s.sigma2;
  return -quad - 2.0 * std::log(M_PI) - s.log_det;
}

double log_marginal_hd(const MinutiaConfig& a, const MinutiaConfig& b,
                       const FixedParams& fixed) {
  fixed.validate();
  const int na = a.size(), nb = b.size();
  if (na < 1 || nb < 1)
    throw std::invalid_argument("log_marginal_hd: need n_A, n_B >= 1");
  const double s_sum = a.scatter() + b.scatter();
  if (!(s_sum > 0.0))
    throw std::invalid_argument(
        "log_marginal_hd: degenerate configurations (S_A + S_B = 0)");
  const double ad = fixed.alpha_delta, bd = fixed.beta_delta,
               rho0 = fixed.rho0;
  double r = -2.0 * rho0 + 2.0 * std::log(M_PI);
  r += (a.type_count(1) + b.type_count(1)) * std::log(fixed.chi);
  r += (a.type_count(-1) + b.type_count(-1)) * std::log1p(-fixed.chi);
  r += (na + nb) * (std::log(rho0) - std::log(M_PI * s_sum));
  r += std::lgamma(ad + bd) + std::lgamma(ad + na) + std::lgamma(na + nb) -
       std::log(2.0) - std::lgamma(ad) - std::lgamma(ad + bd + na) -
       std::log(static_cast<double>(na)) -
       std::log(static_cast<double>(nb)) - std::log(nb + 1.0);
  r += log_kummer_1f1(bd, ad + bd + na, rho0);
  r += log_kummer_1f1(1.0, nb + 2.0, rho0);
  return r;
}

namespace {

// Shared by log_joint_hp and edge_weight: the matched-pair log factor
// phi_2 * exp(kappa Re(sa conj(sb psi))) / I0(kappa) * T(ta,tb).
double log_pair_factor(const Minutia& ma, const Minutia& mb,
                       const LatentParams& theta, const FixedParams& fixed,
                       const SigmaAB& s, double log_i0) {
  double lt = log_type_compat(ma.mtype, mb.mtype, fixed.chi);
  if (lt == kNegInf) return kNegInf;
  double von_mises =
      fixed.kappa *
      (ma.orientation * std::conj(mb.orientation * theta.psi)).real();
  return log_cnormal2(ma.location, mb.location, theta.tau_a, theta.tau_b, s) +
         von_mises - log_i0 + lt;
}

}  // namespace

double log_joint_hp(const MinutiaConfig& a, const MinutiaConfig& b,
                    const Matching& xi, const LatentParams& theta,
                    const FixedParams& fixed) {
  fixed.validate();
  if (xi.n_a() != a.size() || xi.n_b() != b.size())
    throw std::invalid_argument("log_joint_hp: matching sizes do not fit");
  if (!(theta.delta_a > 0.0 && theta.delta_a < 1.0) ||
      !(theta.delta_b > 0.0 && theta.delta_b < 1.0) || !(theta.sigma > 0.0))
    return kNegInf;
  const int na = a.size(), nb = b.size(), nxi = xi.size();
  const double da = theta.delta_a, db = theta.delta_b, rho0 = fixed.rho0;
  const double sigma2 = theta.sigma * theta.sigma;
  const SigmaAB s(theta.sigma, theta.psi, fixed.omega);
  const double log_i0 = log_bessel_i0(fixed.kappa);

  double r = -rho0 * (da + db - da * db) + (na + nb - nxi) * std::log(rho0);
  r += (a.type_count(1) + b.type_count(1)) * std::log(fixed.chi);
  r += (a.type_count(-1) + b.type_count(-1)) * std::log1p(-fixed.chi);
  r += na * std::log(da) + nb * std::log(db);
  r += (nb - nxi) * std::log1p(-da) + (na - nxi) * std::log1p(-db);

  for (int i = 0; i < na; ++i)
    if (xi.b_of_a(i) < 0)
      r += log_cnormal(a[i].location, theta.tau_a, sigma2);
  for (int j = 0; j < nb; ++j)
    if (xi.a_of_b(j) < 0)
      r += log_cnormal(b[j].location, theta.tau_b, sigma2);
  for (auto [i, j] : xi.edges()) {
    double lp = log_pair_factor(a[i], b[j], theta, fixed, s, log_i0);
    if (lp == kNegInf) return kNegInf;
    r += lp;
  }
  return r;
}

double edge_weight(const Minutia& a, const Minutia& b,
                   const LatentParams& theta, const FixedParams& fixed) {
  double lt = log_type_compat(a.mtype, b.mtype, fixed.chi);
  if (lt == kNegInf) return kNegInf;
  const double w2p1 = fixed.omega * fixed.omega + 1.0;
  const double denom = w2p1 * w2p1 - 1.0;
  const double sigma2 = theta.sigma * theta.sigma;
  cplx da = (a.location - theta.tau_a);
  cplx db = (b.location - theta.tau_b);
  double cross =
      (fixed.kappa * a.orientation * std::conj(theta.psi * b.orientation) +
       2.0 * (w2p1 / denom) * std::conj(theta.psi) * da * std::conj(db) /
           sigma2)
          .real();
  double penalty = (std::norm(da) + std::norm(db)) / (denom * sigma2);
  double constant =
      lt + 2.0 * std::log(w2p1) -
      std::log(fixed.rho0) - log_bessel_i0(fixed.kappa) -
      std::log1p(-theta.delta_a) - std::log1p(-theta.delta_b) -
      std::log(denom);
  return cross - penalty + constant;
}

double edge_weight(const Minutia* a, const Minutia* b,
                   const LatentParams& theta, const FixedParams& fixed) {
  if (a == nullptr || b == nullptr) return 0.0;
  return edge_weight(*a, *b, theta, fixed);
}

}  // namespace fplr
