#include "fplr/samplers.hpp"

#include <cmath>
#include <stdexcept>

#include "fplr/special.hpp"

namespace fplr {

double sample_std_normal(Rng& rng) {
  // Marsaglia polar method.
  for (;;) {
    double u = 2.0 * rng.uniform() - 1.0;
    double v = 2.0 * rng.uniform() - 1.0;
    double s = u * u + v * v;
    if (s > 0.0 && s < 1.0)
      return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

cplx sample_std_complex_normal(Rng& rng) {
  const double h = std::sqrt(0.5);
  return {h * sample_std_normal(rng), h * sample_std_normal(rng)};
}

double sample_gamma(Rng& rng, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw std::invalid_argument("sample_gamma: need shape>0, rate>0");
  if (shape < 1.0) {
    double g = sample_gamma(rng, shape + 1.0, rate);
    return g * std::pow(rng.uniform(), 1.0 / shape);
  }
  // Marsaglia-Tsang squeeze.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = sample_std_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    double u = rng.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
      return d * v / rate;
  }
}

double sample_beta(Rng& rng, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::invalid_argument("sample_beta: need a>0, b>0");
  double x = sample_gamma(rng, a, 1.0);
  double y = sample_gamma(rng, b, 1.0);
  return x / (x + y);
}

double sample_truncated_gamma(Rng& rng, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw std::invalid_argument("sample_truncated_gamma: need shape,rate>0");
  // Invert CDF(x) = gamma(shape, rate x)/gamma(shape, rate) on (0,1].
  const double log_g1 = log_lower_gamma(shape, rate);
  const double target = log_g1 + std::log(rng.uniform());
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double v = mid > 0.0 ? log_lower_gamma(shape, rate * mid)
                         : -std::numeric_limits<double>::infinity();
    if (v < target)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-15) break;
  }
  double x = 0.5 * (lo + hi);
  return x > 0.0 ? x : std::numeric_limits<double>::min();
}

cplx sample_von_mises(Rng& rng, cplx nu0, double kappa) {
  if (!(kappa >= 0.0))
    throw std::invalid_argument("sample_von_mises: kappa must be >= 0");
  double mod = std::abs(nu0);
  if (kappa > 0.0 && std::abs(mod - 1.0) > 1e-6)
    throw std::invalid_argument("sample_von_mises: |nu0| must be 1");
  if (kappa < 1e-12) {
    double t = rng.uniform(-M_PI, M_PI);
    return {std::cos(t), std::sin(t)};
  }
  cplx mean = nu0 / mod;
  // Best & Fisher (1979) wrapped-Cauchy envelope.
  const double a = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
  const double b = (a - std::sqrt(2.0 * a)) / (2.0 * kappa);
  const double r = (1.0 + b * b) / (2.0 * b);
  double f;
  for (;;) {
    double u1 = rng.uniform();
    double z = std::cos(M_PI * u1);
    f = (1.0 + r * z) / (r + z);
    double c = kappa * (r - f);
    double u2 = rng.uniform();
    if (c * (2.0 - c) - u2 > 0.0) break;
    if (std::log(c / u2) + 1.0 - c >= 0.0) break;
  }
  double u3 = rng.uniform();
  double theta = (u3 < 0.5 ? -1.0 : 1.0) * std::acos(f);
  return mean * cplx{std::cos(theta), std::sin(theta)};
}

namespace {

double d_logf(double delta, double alpha, double beta, double lambda) {
  if (delta <= 0.0 || delta >= 1.0)
    return -std::numeric_limits<double>::infinity();
  return (alpha - 1.0) * std::log(delta) + (beta - 1.0) * std::log1p(-delta) -
         lambda * delta;
}

}  // namespace

double d_mode(double alpha, double beta, double lambda) {
  // Stationary points solve lambda d^2 - (lambda+alpha+beta-2) d + (alpha-1) = 0.
  const double eps = 1e-12;
  double best = 0.5;
  double best_v = d_logf(0.5, alpha, beta, lambda);
  auto consider = [&](double d) {
    if (!(d >= 0.0 && d <= 1.0)) return;
    double dc = std::min(1.0 - eps, std::max(eps, d));
    double v = d_logf(dc, alpha, beta, lambda);
    if (v > best_v) {
      best_v = v;
      best = dc;
    }
  };
  if (lambda == 0.0) {
    if (alpha + beta > 2.0) consider((alpha - 1.0) / (alpha + beta - 2.0));
  } else {
    double bq = -(lambda + alpha + beta - 2.0);
    double disc = bq * bq - 4.0 * lambda * (alpha - 1.0);
    if (disc >= 0.0) {
      double sq = std::sqrt(disc);
      consider((-bq - sq) / (2.0 * lambda));
      consider((-bq + sq) / (2.0 * lambda));
    }
  }
  consider(eps);
  consider(1.0 - eps);
  return best;
}

double sample_d_distribution(Rng& rng, double alpha, double beta,
                             double lambda, DSampleStats* stats) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument(
        "sample_d_distribution: need alpha,beta>0 and finite lambda");
  if (lambda == 0.0) return sample_beta(rng, alpha, beta);

  const double delta0 = d_mode(alpha, beta, lambda);

  // Reflection branch: 1 - D(beta,alpha,-lambda), used when the mode sits in
  // the right half and the mirrored gamma proposal has positive rate.
  if (delta0 > 0.5 && alpha >= 1.0 && lambda < (alpha - 1.0) / delta0)
    return 1.0 - sample_d_distribution(rng, beta, alpha, -lambda, stats);

  // Gamma proposal matched at the mode: Gamma(alpha, lambda+(beta-1)/(1-delta0))
  // truncated to (0,1]; acceptance is the exact bound ratio, maximal at delta0.
  const double prop_rate = lambda + (beta - 1.0) / (1.0 - delta0);
  if (beta >= 1.0 && prop_rate > 0.0 && delta0 < 1.0 - 1e-9) {
    for (long it = 0; it < 1000000; ++it) {
      double delta = sample_truncated_gamma(rng, alpha, prop_rate);
      if (stats) ++stats->proposals;
      if (beta == 1.0) {
        if (stats) ++stats->accepts;
        return delta;
      }
      double log_acc = (beta - 1.0) * (std::log1p(-delta) -
                                       std::log1p(-delta0) +
                                       (delta - delta0) / (1.0 - delta0));
      if (std::log(rng.uniform()) <= log_acc) {
        if (stats) ++stats->accepts;
        return delta;
      }
    }
    throw std::runtime_error("sample_d_distribution: rejection loop stalled");
  }

  // Fallback for corner parameter sets (beta<1 with tilt, etc.): Beta
  // proposal with the exponential factor as bounded acceptance ratio.
  const double shift = lambda > 0.0 ? 0.0 : 1.0;
  for (long it = 0; it < 1000000; ++it) {
    double delta = sample_beta(rng, alpha, beta);
    if (stats) ++stats->proposals;
    if (std::log(rng.uniform()) <= -lambda * (delta - shift)) {
      if (stats) ++stats->accepts;
      return delta;
    }
  }
  throw std::runtime_error("sample_d_distribution: fallback loop stalled");
}

}  // namespace fplr
