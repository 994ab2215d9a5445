#ifndef FPLR_ESTIMATION_HPP
#define FPLR_ESTIMATION_HPP

#include <functional>
#include <string>
#include <vector>

#include "fplr/minutia.hpp"
#include "fplr/model.hpp"
#include "fplr/rng.hpp"

namespace fplr {

/// One matching-augmented training pair (A_i, B_i, xi_check_i).
struct TrainingPair {
  MinutiaConfig a;
  MinutiaConfig b;
  Matching xi;
};

/// Closed-form MLE of chi from type counts:
///   chi = sum(n1_A+n1_B-n1_xi) / sum over both type classes.
/// Throws if no typed minutiae are present; values at the 0/1 boundary are
/// legal output and flagged by the caller.
double fit_chi(const std::vector<TrainingPair>& corpus);

struct DeltaRhoFit {
  double alpha_delta = 0.0;
  double beta_delta = 0.0;
  double rho0 = 0.0;
  double log_likelihood = 0.0;
  bool converged = false;
  int restarts = 0;
};

/// Maximizes sum_i log integral integral f1 d(delta_A) d(delta_B): the
/// delta_B integral is analytic (1F1), the delta_A integral is adaptive
/// Gauss-Kronrod, and the outer maximization is Nelder-Mead on
/// (log alpha_delta, log beta_delta, log rho0) with random restarts.
DeltaRhoFit fit_delta_rho(const std::vector<TrainingPair>& corpus,
                          std::uint64_t seed = 1, int n_restarts = 5);

/// The per-pair log marginal of f1 at given hyperparameters (exposed for
/// testing the quadrature against independent oracles).
double log_f1_marginal(int n_a, int n_b, int n_xi, double alpha_delta,
                       double beta_delta, double rho0);

struct SemConfig {
  int sweeps_per_iter = 5;
  int max_iter = 3000;
  double stab_rel_tol = 0.01;  // relative change defining "stabilized"
  int stab_window = 50;        // consecutive quiet iterations required
  int avg_window = 500;        // averaging window after stabilization
  double omega_init = 0.2;
  double kappa_init = 5.0;
  std::uint64_t seed = 0;
};

struct SemResult {
  double omega = 0.0;
  double kappa = 0.0;
  bool converged = false;
  int stabilized_at = -1;
  std::vector<double> omega_trace;
  std::vector<double> kappa_trace;
  double mk_z_omega = 0.0;  // Mann-Kendall trend z over the averaging window
  double mk_z_kappa = 0.0;
  int kappa_boundary_hits = 0;
};

/// Stochastic EM for (omega, kappa): per-pair Gibbs draws of
/// (tau_A,tau_B,sigma,psi) with xi fixed to the training matching, then the
/// exact M-step (cubic root in x for omega, Bessel-ratio bisection for
/// kappa).  Requires every pair to have n_xi >= 1.
SemResult fit_omega_kappa(const std::vector<TrainingPair>& corpus,
                          const FixedParams& base, const SemConfig& cfg);

/// Real roots of c3 x^3 + c2 x^2 + c1 x + c0 = 0.
std::vector<double> solve_cubic(double c3, double c2, double c1, double c0);

/// The omega M-step in isolation: root of the score cubic in
/// x = (w^2+1)^2/((w^2+1)^2-1), restricted to x > 1; ties broken by the
/// residual of the original score equation.  Returns x.
double omega_update_x(double r1, double r2, double r3);

/// Mann-Kendall trend z-statistic.
double mann_kendall_z(const std::vector<double>& x);

struct FitReport {
  FixedParams fitted;
  DeltaRhoFit delta_rho;
  double chi = 0.0;
  bool chi_boundary = false;
  SemResult sem;
  std::string to_json() const;
};

FitReport fit_all(const std::vector<TrainingPair>& corpus,
                  double epsilon_carry, const SemConfig& sem_cfg,
                  std::uint64_t seed = 1);

}  // namespace fplr

#endif
