#include "fplr/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "json.hpp"

#include "fplr/mcmc.hpp"
#include "fplr/special.hpp"

namespace fplr {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double fit_chi(const std::vector<TrainingPair>& corpus) {
  if (corpus.empty()) throw std::invalid_argument("fit_chi: empty corpus");
  long pos = 0, neg = 0;
  for (const auto& tp : corpus) {
    int n1_xi = 0, nm1_xi = 0;
    for (auto [i, j] : tp.xi.edges()) {
      if (tp.a[i].mtype == 1 && tp.b[j].mtype == 1) ++n1_xi;
      if (tp.a[i].mtype == -1 && tp.b[j].mtype == -1) ++nm1_xi;
    }
    pos += tp.a.type_count(1) + tp.b.type_count(1) - n1_xi;
    neg += tp.a.type_count(-1) + tp.b.type_count(-1) - nm1_xi;
  }
  if (pos + neg == 0)
    throw std::invalid_argument("fit_chi: no typed minutiae in corpus");
  return static_cast<double>(pos) / static_cast<double>(pos + neg);
}

double log_f1_marginal(int n_a, int n_b, int n_xi, double alpha_delta,
                       double beta_delta, double rho0) {
  // integral over delta_B is analytic:
  //   int e^{-rho0(1-dA) dB} dB^{nB} (1-dB)^{nA-nxi} d dB
  //     = B(nB+1, nA-nxi+1) 1F1(nB+1, nA+nB-nxi+2, -rho0(1-dA)).
  // The delta_A integral is numeric; the integrand is evaluated in log
  // space and rescaled by its maximum.
  const double a_exp = alpha_delta + n_a - 1.0;
  const double b_exp = beta_delta + n_b - n_xi - 1.0;
  const double f1a = n_b + 1.0;
  const double f1b = n_a + n_b - n_xi + 2.0;
  auto log_g = [&](double d) {
    if (d <= 0.0 || d >= 1.0) return kNegInf;
    return -rho0 * d + a_exp * std::log(d) + b_exp * std::log1p(-d) +
           log_kummer_1f1(f1a, f1b, -rho0 * (1.0 - d));
  };
  double mx = kNegInf;
  for (int k = 1; k < 18; ++k) mx = std::max(mx, log_g(k / 18.0));
  if (mx == kNegInf) return kNegInf;
  auto f = [&](double d) { return std::exp(log_g(d) - mx); };
  double integral = boost::math::quadrature::gauss_kronrod<double, 15>::
      integrate(f, 0.0, 1.0, 10, 1e-10);
  return -lbeta(alpha_delta, beta_delta) +
         (n_a + n_b - n_xi) * std::log(rho0) +
         lbeta(n_b + 1.0, n_a - n_xi + 1.0) + mx + std::log(integral);
}

namespace {

struct PairCounts {
  int n_a, n_b, n_xi;
};

double delta_rho_loglik(const std::vector<PairCounts>& counts, double ad,
                        double bd, double rho0) {
  double s = 0.0;
  for (const auto& c : counts)
    s += log_f1_marginal(c.n_a, c.n_b, c.n_xi, ad, bd, rho0);
  return s;
}

/// Compact Nelder-Mead minimizer.
double nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                   std::vector<double>& x, double step, int max_iter,
                   double tol) {
  const size_t n = x.size();
  std::vector<std::vector<double>> simplex(n + 1, x);
  std::vector<double> fv(n + 1);
  for (size_t i = 0; i < n; ++i) simplex[i + 1][i] += step;
  for (size_t i = 0; i <= n; ++i) fv[i] = f(simplex[i]);

  for (int it = 0; it < max_iter; ++it) {
    // order
    std::vector<size_t> idx(n + 1);
    std::iota(idx.begin(), idx.end(), 0u);
    std::sort(idx.begin(), idx.end(),
              [&](size_t i, size_t j) { return fv[i] < fv[j]; });
    size_t best = idx[0], worst = idx[n], second = idx[n - 1];
    if (std::abs(fv[worst] - fv[best]) <
        tol * (1.0 + std::abs(fv[best])))
      break;
    std::vector<double> centroid(n, 0.0);
    for (size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (size_t d = 0; d < n; ++d) centroid[d] += simplex[i][d];
    }
    for (double& c : centroid) c /= static_cast<double>(n);
    auto blend = [&](double t) {
      std::vector<double> p(n);
      for (size_t d = 0; d < n; ++d)
        p[d] = centroid[d] + t * (simplex[worst][d] - centroid[d]);
      return p;
    };
    auto refl = blend(-1.0);
    double fr = f(refl);
    if (fr < fv[best]) {
      auto exp_p = blend(-2.0);
      double fe = f(exp_p);
      if (fe < fr) {
        simplex[worst] = exp_p;
        fv[worst] = fe;
      } else {
        simplex[worst] = refl;
        fv[worst] = fr;
      }
    } else if (fr < fv[second]) {
      simplex[worst] = refl;
      fv[worst] = fr;
    } else {
      auto con = blend(fr < fv[worst] ? -0.5 : 0.5);
      double fc = f(con);
      if (fc < std::min(fr, fv[worst])) {
        simplex[worst] = con;
        fv[worst] = fc;
      } else {
        for (size_t i = 0; i <= n; ++i) {
          if (i == best) continue;
          for (size_t d = 0; d < n; ++d)
            simplex[i][d] = 0.5 * (simplex[i][d] + simplex[best][d]);
          fv[i] = f(simplex[i]);
        }
      }
    }
  }
  size_t best = 0;
  for (size_t i = 1; i <= n; ++i)
    if (fv[i] < fv[best]) best = i;
  x = simplex[best];
  return fv[best];
}

}  // namespace

DeltaRhoFit fit_delta_rho(const std::vector<TrainingPair>& corpus,
                          std::uint64_t seed, int n_restarts) {
  if (corpus.empty())
    throw std::invalid_argument("fit_delta_rho: empty corpus");
  std::vector<PairCounts> counts;
  counts.reserve(corpus.size());
  double mean_nb = 0.0, mean_na = 0.0;
  for (const auto& tp : corpus) {
    counts.push_back({tp.a.size(), tp.b.size(), tp.xi.size()});
    mean_na += tp.a.size();
    mean_nb += tp.b.size();
  }
  mean_na /= corpus.size();
  mean_nb /= corpus.size();

  // Moment-flavored initial point: E n_B = rho0/2, E n_A = rho0 E delta_A.
  double rho0_init = std::max(2.0 * mean_nb, 1.0);
  double mu_init = std::min(0.95, std::max(0.05, mean_na / rho0_init));
  double conc_init = 10.0;

  auto objective = [&](const std::vector<double>& u) {
    double ad = std::exp(u[0]), bd = std::exp(u[1]), r0 = std::exp(u[2]);
    if (!(std::isfinite(ad) && std::isfinite(bd) && std::isfinite(r0)))
      return 1e30;
    double ll = delta_rho_loglik(counts, ad, bd, r0);
    return std::isfinite(ll) ? -ll : 1e30;
  };

  Rng rng(seed);
  DeltaRhoFit best;
  best.log_likelihood = kNegInf;
  for (int r = 0; r < n_restarts; ++r) {
    double jitter = r == 0 ? 1.0 : std::exp(rng.uniform(-0.7, 0.7));
    double mu = std::min(0.95, std::max(0.05, mu_init * jitter));
    std::vector<double> u = {std::log(conc_init * mu * jitter),
                             std::log(conc_init * (1.0 - mu)),
                             std::log(rho0_init) + rng.uniform(-0.3, 0.3) *
                                                       (r == 0 ? 0.0 : 1.0)};
    double fv = nelder_mead(objective, u, 0.4, 400, 1e-10);
    if (-fv > best.log_likelihood) {
      best.log_likelihood = -fv;
      best.alpha_delta = std::exp(u[0]);
      best.beta_delta = std::exp(u[1]);
      best.rho0 = std::exp(u[2]);
      best.converged = true;
      best.restarts = r + 1;
    }
  }
  return best;
}

std::vector<double> solve_cubic(double c3, double c2, double c1, double c0) {
  std::vector<double> roots;
  if (std::abs(c3) < 1e-14 * std::max({std::abs(c2), std::abs(c1),
                                       std::abs(c0)})) {
    // quadratic
    if (c2 == 0.0) {
      if (c1 != 0.0) roots.push_back(-c0 / c1);
      return roots;
    }
    double disc = c1 * c1 - 4.0 * c2 * c0;
    if (disc >= 0.0) {
      double s = std::sqrt(disc);
      roots.push_back((-c1 + s) / (2.0 * c2));
      roots.push_back((-c1 - s) / (2.0 * c2));
    }
    return roots;
  }
  double a = c2 / c3, b = c1 / c3, c = c0 / c3;
  double q = (a * a - 3.0 * b) / 9.0;
  double r = (2.0 * a * a * a - 9.0 * a * b + 27.0 * c) / 54.0;
  if (r * r < q * q * q) {
    double th = std::acos(r / std::sqrt(q * q * q));
    for (int k = -1; k <= 1; ++k)
      roots.push_back(-2.0 * std::sqrt(q) *
                          std::cos((th + 2.0 * M_PI * k) / 3.0) -
                      a / 3.0);
  } else {
    double s = -std::copysign(
        std::cbrt(std::abs(r) + std::sqrt(r * r - q * q * q)), r);
    double t = s == 0.0 ? 0.0 : q / s;
    roots.push_back(s + t - a / 3.0);
  }
  // Newton polish.
  for (double& x : roots) {
    for (int it = 0; it < 3; ++it) {
      double f = ((c3 * x + c2) * x + c1) * x + c0;
      double fp = (3.0 * c3 * x + 2.0 * c2) * x + c1;
      if (fp != 0.0) x -= f / fp;
    }
  }
  return roots;
}

double omega_update_x(double r1, double r2, double r3) {
  double c3 = r2 * r2 - 4.0 * r3 * r3;
  double c2 = 4.0 * r3 * r3 - 2.0 * r1 * r2 - r2 * r2;
  double c1 = r1 * r1 + 2.0 * r1 * r2 - r3 * r3;
  double c0 = -r1 * r1;
  auto roots = solve_cubic(c3, c2, c1, c0);
  auto score = [&](double x) {
    // d/dx of R1 log x - R2 x + 2 R3 sqrt(x(x-1))
    return r1 / x - r2 + r3 * (2.0 * x - 1.0) / std::sqrt(x * (x - 1.0));
  };
  double best = 0.0, best_resid = std::numeric_limits<double>::infinity();
  for (double x : roots) {
    if (!(x > 1.0) || !std::isfinite(x)) continue;
    double resid = std::abs(score(x));
    if (resid < best_resid) {
      best_resid = resid;
      best = x;
    }
  }
  if (best == 0.0)
    throw std::runtime_error(
        "omega_update_x: no admissible root of the score cubic in (1,inf)");
  return best;
}

double mann_kendall_z(const std::vector<double>& x) {
  const size_t n = x.size();
  if (n < 3) return 0.0;
  long s = 0;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j)
      s += (x[j] > x[i]) - (x[j] < x[i]);
  double var = n * (n - 1.0) * (2.0 * n + 5.0) / 18.0;
  if (s > 0) return (s - 1.0) / std::sqrt(var);
  if (s < 0) return (s + 1.0) / std::sqrt(var);
  return 0.0;
}

SemResult fit_omega_kappa(const std::vector<TrainingPair>& corpus,
                          const FixedParams& base, const SemConfig& cfg) {
  if (corpus.empty())
    throw std::invalid_argument("fit_omega_kappa: empty corpus");
  for (size_t i = 0; i < corpus.size(); ++i)
    if (corpus[i].xi.size() < 1)
      throw std::invalid_argument(
          "fit_omega_kappa: pair " + std::to_string(i) +
          " has an empty matching (n_xi >= 1 required for identifiability)");

  SemResult res;
  double omega = cfg.omega_init, kappa = cfg.kappa_init;
  Rng base_rng(cfg.seed);

  // Persistent per-pair states of (tau, sigma, psi).
  std::vector<LatentParams> states(corpus.size());
  std::vector<Rng> rngs;
  rngs.reserve(corpus.size());
  for (size_t i = 0; i < corpus.size(); ++i) {
    rngs.push_back(base_rng.substream(static_cast<std::uint64_t>(i)));
    states[i].delta_a = 0.5;
    states[i].delta_b = 0.5;
    states[i].tau_a = corpus[i].a.centroid();
    states[i].tau_b = corpus[i].b.centroid();
    states[i].psi = cplx{1.0, 0.0};
    double s2 = (corpus[i].a.scatter() + corpus[i].b.scatter()) /
                (2.0 * (corpus[i].a.size() + corpus[i].b.size()));
    states[i].sigma = std::sqrt(std::max(s2, 1e-12));
  }

  int quiet = 0;
  int avg_left = -1;
  double omega_acc = 0.0, kappa_acc = 0.0;
  int acc_n = 0;
  std::vector<double> win_omega, win_kappa;

  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    FixedParams fx = base;
    fx.omega = omega;
    fx.kappa = std::max(kappa, 1e-6);

    double r1 = 0.0, r2 = 0.0, r3 = 0.0, s_orient = 0.0;
    for (size_t i = 0; i < corpus.size(); ++i) {
      GibbsSampler g(corpus[i].a, corpus[i].b, fx);
      g.set_theta(states[i]);
      g.set_xi(corpus[i].xi);
      g.clamp_xi_all();
      g.clamp_delta_a(states[i].delta_a);
      g.clamp_delta_b(states[i].delta_b);
      for (int k = 0; k < cfg.sweeps_per_iter; ++k) g.sweep(rngs[i]);
      states[i] = g.theta();

      const auto& th = states[i];
      double u = 1.0 / (th.sigma * th.sigma);
      r1 += corpus[i].xi.size();
      for (auto [ia, ib] : corpus[i].xi.edges()) {
        cplx da = corpus[i].a[ia].location - th.tau_a;
        cplx db = corpus[i].b[ib].location - th.tau_b;
        r2 += u * (std::norm(da) + std::norm(db));
        r3 += u * (da * std::conj(th.psi * db)).real();
        s_orient += (corpus[i].a[ia].orientation *
                     std::conj(th.psi * corpus[i].b[ib].orientation))
                        .real();
      }
    }

    double x;
    try {
      x = omega_update_x(r1, r2, r3);
    } catch (const std::runtime_error&) {
      // No admissible root for this draw; repeat with fresh draws.
      continue;
    }
    double w2 = std::sqrt(x / (x - 1.0)) - 1.0;
    double new_omega = std::sqrt(std::max(w2, 1e-12));

    double ratio = s_orient / r1;
    double new_kappa;
    if (ratio <= 0.0) {
      new_kappa = 0.0;
      ++res.kappa_boundary_hits;
    } else if (ratio >= 1.0 - 1e-12) {
      new_kappa = bessel_ratio_inverse(1.0 - 1e-12);
      ++res.kappa_boundary_hits;
    } else {
      new_kappa = bessel_ratio_inverse(ratio);
    }

    double rel = std::max(
        std::abs(new_omega - omega) / std::max(std::abs(omega), 1e-12),
        std::abs(new_kappa - kappa) / std::max(std::abs(kappa), 1e-12));
    omega = new_omega;
    kappa = new_kappa;
    res.omega_trace.push_back(omega);
    res.kappa_trace.push_back(kappa);

    if (avg_left < 0) {
      quiet = rel < cfg.stab_rel_tol ? quiet + 1 : 0;
      if (quiet >= cfg.stab_window) {
        res.stabilized_at = iter;
        avg_left = cfg.avg_window;
      }
    } else if (avg_left > 0) {
      omega_acc += omega;
      kappa_acc += kappa;
      win_omega.push_back(omega);
      win_kappa.push_back(kappa);
      ++acc_n;
      --avg_left;
      if (avg_left == 0) break;
    }
  }

  if (acc_n > 0) {
    res.omega = omega_acc / acc_n;
    res.kappa = kappa_acc / acc_n;
    res.converged = (avg_left == 0);
    res.mk_z_omega = mann_kendall_z(win_omega);
    res.mk_z_kappa = mann_kendall_z(win_kappa);
  } else {
    res.omega = omega;
    res.kappa = kappa;
    res.converged = false;
  }
  return res;
}

FitReport fit_all(const std::vector<TrainingPair>& corpus,
                  double epsilon_carry, const SemConfig& sem_cfg,
                  std::uint64_t seed) {
  FitReport rep;
  rep.delta_rho = fit_delta_rho(corpus, seed);
  rep.chi = fit_chi(corpus);
  rep.chi_boundary = rep.chi <= 0.0 || rep.chi >= 1.0;

  FixedParams base;
  base.rho0 = rep.delta_rho.rho0;
  base.alpha_delta = rep.delta_rho.alpha_delta;
  base.beta_delta = rep.delta_rho.beta_delta;
  base.chi = rep.chi_boundary ? std::min(0.999, std::max(0.001, rep.chi))
                              : rep.chi;
  base.epsilon = epsilon_carry;
  rep.sem = fit_omega_kappa(corpus, base, sem_cfg);

  rep.fitted = base;
  rep.fitted.omega = rep.sem.omega;
  rep.fitted.kappa = rep.sem.kappa;
  return rep;
}

std::string FitReport::to_json() const {
  nlohmann::json j;
  j["schema"] = "fit-report/1";
  j["fitted"] = {{"rho0", fitted.rho0},
                 {"chi", fitted.chi},
                 {"epsilon", fitted.epsilon},
                 {"omega", fitted.omega},
                 {"kappa", fitted.kappa},
                 {"alpha_delta", fitted.alpha_delta},
                 {"beta_delta", fitted.beta_delta}};
  j["delta_rho"] = {{"alpha_delta", delta_rho.alpha_delta},
                    {"beta_delta", delta_rho.beta_delta},
                    {"rho0", delta_rho.rho0},
                    {"log_likelihood", delta_rho.log_likelihood},
                    {"converged", delta_rho.converged},
                    {"restarts", delta_rho.restarts}};
  j["chi"] = {{"value", chi}, {"boundary", chi_boundary}};
  j["sem"] = {{"omega", sem.omega},
              {"kappa", sem.kappa},
              {"converged", sem.converged},
              {"stabilized_at", sem.stabilized_at},
              {"iterations", sem.omega_trace.size()},
              {"mann_kendall_z_omega", sem.mk_z_omega},
              {"mann_kendall_z_kappa", sem.mk_z_kappa},
              {"kappa_boundary_hits", sem.kappa_boundary_hits},
              {"omega_trace", sem.omega_trace},
              {"kappa_trace", sem.kappa_trace}};
  return j.dump(2) + "\n";
}

}  // namespace fplr
