#ifndef FPLR_TESTS_TEST_UTIL_HPP
#define FPLR_TESTS_TEST_UTIL_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "fplr/minutia.hpp"
#include "fplr/rng.hpp"
#include "fplr/samplers.hpp"
#include "fplr/special.hpp"

namespace testutil {

using fplr::cplx;

/// Asymptotic Kolmogorov-Smirnov p-value for statistic d at sample size n.
inline double ks_pvalue(double d, std::size_t n) {
  double sn = std::sqrt(static_cast<double>(n));
  double lambda = (sn + 0.12 + 0.11 / sn) * d;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    double term = 2.0 * ((k % 2) ? 1.0 : -1.0) *
                  std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-14) break;
  }
  return std::min(1.0, std::max(0.0, sum));
}

/// One-sample KS test against a CDF; returns the p-value.
inline double ks_test(std::vector<double> xs,
                      const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  double d = 0.0;
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double f = cdf(xs[i]);
    d = std::max(d, std::abs(f - i / n));
    d = std::max(d, std::abs((i + 1) / n - f));
  }
  return ks_pvalue(d, xs.size());
}

/// Upper-tail chi-square p-value.
inline double chi2_pvalue(double stat, double dof) {
  return 1.0 - fplr::gamma_p(0.5 * dof, 0.5 * stat);
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / v.size();
}

inline double variance(const std::vector<double>& v) {
  double m = mean(v), s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / (v.size() - 1.0);
}

/// Adaptive Simpson quadrature; independent of the quadrature backend the
/// library itself uses.
inline double simpson_rec(const std::function<double(double)>& f, double a,
                          double b, double fa, double fm, double fb,
                          double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-11, int depth = 28) {
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

/// All matchings between configurations of sizes n_a and n_b.
inline std::vector<fplr::Matching> all_matchings(int n_a, int n_b) {
  std::vector<fplr::Matching> out;
  std::vector<std::pair<int, int>> edges;
  std::vector<char> used_b(n_b, 0);
  std::function<void(int)> rec = [&](int a) {
    if (a == n_a) {
      out.emplace_back(n_a, n_b, edges);
      return;
    }
    rec(a + 1);  // a unmatched
    for (int b = 0; b < n_b; ++b) {
      if (used_b[b]) continue;
      used_b[b] = 1;
      edges.emplace_back(a, b);
      rec(a + 1);
      edges.pop_back();
      used_b[b] = 0;
    }
  };
  rec(0);
  return out;
}

/// Random configuration with locations in a disc of the given scale.
inline fplr::MinutiaConfig random_config(fplr::Rng& rng, int n,
                                         const std::string& id,
                                         double scale = 1.0) {
  std::vector<fplr::Minutia> ms;
  for (int i = 0; i < n; ++i) {
    cplx r = scale * fplr::sample_std_complex_normal(rng);
    double ang = rng.uniform(-M_PI, M_PI);
    int t = static_cast<int>(rng.uniform_below(3)) - 1;
    ms.push_back(fplr::make_minutia(r, std::polar(1.0, ang), t));
  }
  return fplr::MinutiaConfig(id, std::move(ms));
}

inline double logsumexp(const std::vector<double>& v) {
  double mx = -HUGE_VAL;
  for (double x : v) mx = std::max(mx, x);
  if (mx == -HUGE_VAL) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

}  // namespace testutil

#endif
