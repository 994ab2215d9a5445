#include "fplr/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fplr {

namespace {

constexpr double kBesselSeriesMax = 50.0;
constexpr double kRescaleAt = 1e280;
constexpr double kRescaleBy = 1e-280;

double log_bessel_i_series(int nu, double x) {
  // I_nu(x) = sum_k (x/2)^(2k+nu) / (k! (k+nu)!); all terms positive.
  const double q = 0.25 * x * x;
  double term = 1.0, sum = 1.0, log_scale = 0.0;
  for (int k = 1; k < 2000; ++k) {
    term *= q / (static_cast<double>(k) * (k + nu));
    sum += term;
    if (sum > kRescaleAt) {
      sum *= kRescaleBy;
      term *= kRescaleBy;
      log_scale -= std::log(kRescaleBy);
    }
    if (term < 1e-18 * sum && 2 * k > x) break;
  }
  double lead = nu == 0 ? 0.0 : nu * std::log(0.5 * x);
  return lead + std::log(sum) + log_scale;
}

double log_bessel_i_asymptotic(int nu, double x) {
  // I_nu(x) ~ e^x / sqrt(2 pi x) * sum_k t_k with mu = 4 nu^2.
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= 12; ++k) {
    double odd = 2.0 * k - 1.0;
    term *= (odd * odd - mu) / (8.0 * k * x);
    sum += term;
    if (std::abs(term) < 1e-17 * sum) break;
  }
  return x - 0.5 * std::log(2.0 * M_PI * x) + std::log(sum);
}

}  // namespace

double log_bessel_i0(double kappa) {
  if (!(kappa >= 0.0) || !std::isfinite(kappa))
    throw std::invalid_argument("log_bessel_i0: kappa must be finite and >= 0");
  if (kappa == 0.0) return 0.0;
  if (kappa < kBesselSeriesMax) return log_bessel_i_series(0, kappa);
  return log_bessel_i_asymptotic(0, kappa);
}

double log_bessel_i1(double kappa) {
  if (!(kappa > 0.0) || !std::isfinite(kappa))
    throw std::invalid_argument("log_bessel_i1: kappa must be finite and > 0");
  if (kappa < kBesselSeriesMax) return log_bessel_i_series(1, kappa);
  return log_bessel_i_asymptotic(1, kappa);
}

double bessel_ratio_i1_i0(double kappa) {
  if (!(kappa >= 0.0) || !std::isfinite(kappa))
    throw std::invalid_argument("bessel_ratio_i1_i0: kappa must be >= 0");
  if (kappa == 0.0) return 0.0;
  if (kappa < 1e-8) return 0.5 * kappa;
  return std::exp(log_bessel_i1(kappa) - log_bessel_i0(kappa));
}

double bessel_ratio_inverse(double r) {
  if (!(r >= 0.0 && r < 1.0))
    throw std::invalid_argument("bessel_ratio_inverse: r must be in [0,1)");
  if (r == 0.0) return 0.0;
  double lo = 0.0, hi = 4.0;
  while (bessel_ratio_i1_i0(hi) < r) {
    hi *= 2.0;
    if (hi > 1e9) return hi;
  }
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (bessel_ratio_i1_i0(mid) < r)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-12 * (1.0 + hi)) break;
  }
  return 0.5 * (lo + hi);
}

double log_kummer_1f1(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(x))
    throw std::invalid_argument("log_kummer_1f1: need a>0, b>0, finite x");
  if (x == 0.0) return 0.0;
  if (x < 0.0) {
    // Kummer transform keeps every series term positive.
    if (!(b - a > 0.0))
      throw std::invalid_argument("log_kummer_1f1: x<0 requires b-a>0");
    return x + log_kummer_1f1(b - a, b, -x);
  }
  double term = 1.0, sum = 1.0, log_scale = 0.0;
  for (int k = 0; k < 1000000; ++k) {
    term *= (a + k) * x / ((b + k) * (k + 1.0));
    sum += term;
    if (sum > kRescaleAt) {
      sum *= kRescaleBy;
      term *= kRescaleBy;
      log_scale -= std::log(kRescaleBy);
    }
    if (term < 1e-18 * sum && k > x) break;
  }
  return std::log(sum) + log_scale;
}

double lbeta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

namespace {

// log of gamma(a,x) by series, accurate for x < a+1.
double log_lower_gamma_series(double a, double x) {
  // gamma(a,x) = x^a e^-x sum_n x^n / (a(a+1)...(a+n))
  double term = 1.0 / a, sum = term, log_scale = 0.0;
  for (int n = 1; n < 100000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (sum > kRescaleAt) {
      sum *= kRescaleBy;
      term *= kRescaleBy;
      log_scale -= std::log(kRescaleBy);
    }
    if (term < 1e-18 * sum) break;
  }
  return a * std::log(x) - x + std::log(sum) + log_scale;
}

// Regularized upper incomplete gamma Q(a,x) by Lentz's continued fraction,
// for x >= a+1.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 10000; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  double log_q = a * std::log(x) - x - std::lgamma(a) + std::log(h);
  return std::exp(log_q);
}

}  // namespace

double gamma_p(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0))
    throw std::invalid_argument("gamma_p: need a>0, x>=0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0)
    return std::exp(log_lower_gamma_series(a, x) - std::lgamma(a));
  return 1.0 - gamma_q_cf(a, x);
}

double log_lower_gamma(double a, double x) {
  if (!(a > 0.0) || !(x > 0.0))
    throw std::invalid_argument("log_lower_gamma: need a>0, x>0");
  if (x < a + 1.0) return log_lower_gamma_series(a, x);
  double q = gamma_q_cf(a, x);
  return std::lgamma(a) + std::log1p(-q);
}

double log_d_normalizer(double alpha, double beta, double lambda) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("log_d_normalizer: need alpha,beta>0");
  return lbeta(alpha, beta) + log_kummer_1f1(alpha, alpha + beta, -lambda);
}

}  // namespace fplr
