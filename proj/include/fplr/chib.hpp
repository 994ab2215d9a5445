#ifndef FPLR_CHIB_HPP
#define FPLR_CHIB_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "fplr/mcmc.hpp"

namespace fplr {

struct ChibConfig {
  long n_burn = 5000;     // burn-in of the first (full) run
  long n_samples = 5000;  // samples per reduced run
  long n_xi = 200;        // samples per beta term of the xi* ordinate
  long stage_burn = 500;  // re-burn of warm-started reduced runs
  long xi_burn = 20;      // sweeps before each xi-ordinate run
  std::uint64_t seed = 0;

  void validate() const;
};

/// A run could not estimate some factor of the xi* ordinate (every sample
/// gave probability zero); remedied by a larger n_xi.
class ChibDegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StageRecord {
  std::string clamped;    // components held at their starred values
  std::string ordinate;   // which ordinate factor this run estimated
  double log_ordinate;
  double se_log;          // batch-means standard error on the log scale
};

struct HpEstimate {
  double log_hp = 0.0;
  double log_numerator = 0.0;
  double log_denominator = 0.0;
  double mc_se_log = 0.0;  // natural-log scale
  LatentParams theta_star;
  Matching xi_star;
  std::vector<StageRecord> stages;     // theta ordinates, in stage order
  double log_xi_ordinate = 0.0;
  std::vector<double> beta_log_terms;  // per-beta contributions
  double mean_n_xi = 0.0;
  int min_n_xi = 0, max_n_xi = 0;
};

/// Chib's marginal-likelihood estimate of log pr(A,B|H_p) (with the shared
/// dropped-constant convention of log_joint_hp).  Six staged reduced runs
/// fix theta* component by component; each ordinate factor is averaged over
/// the run that clamps strictly fewer components, and the xi* ordinate is
/// the product over b in B of sample-averaged normalized full conditionals,
/// the term for b taken from the run clamping the edges of all b' < b.
HpEstimate estimate_log_hp(const MinutiaConfig& a, const MinutiaConfig& b,
                           const FixedParams& fixed, const ChibConfig& cfg);

struct LrResult {
  std::string a_id, b_id;
  double log10_lr = 0.0;
  double log_hp = 0.0;
  double log_hd = 0.0;
  double mc_se_log10 = 0.0;
  std::uint64_t seed = 0;
  HpEstimate hp;
};

LrResult log10_lr(const MinutiaConfig& a, const MinutiaConfig& b,
                  const FixedParams& fixed, const ChibConfig& cfg);

std::string lr_result_to_json(const LrResult& r);

}  // namespace fplr

#endif
