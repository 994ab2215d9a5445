#include "fplr/chib.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "json.hpp"

#include "fplr/special.hpp"

namespace fplr {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Accumulates log values v_i and reports log(mean exp(v_i)) together with
/// a 10-batch standard error of the log of the mean.
class LogMeanAccumulator {
 public:
  void add(double log_v) { logs_.push_back(log_v); }

  double log_mean() const {
    if (logs_.empty()) return kNegInf;
    double mx = *std::max_element(logs_.begin(), logs_.end());
    if (mx == kNegInf) return kNegInf;
    double s = 0.0;
    for (double v : logs_) s += std::exp(v - mx);
    return mx + std::log(s / logs_.size());
  }

  /// Standard error of log(mean) from 10 batch means.
  double se_log() const {
    const size_t nb = 10;
    if (logs_.size() < 2 * nb) return 0.0;
    double lm = log_mean();
    if (lm == kNegInf) return 0.0;
    size_t per = logs_.size() / nb;
    double ss = 0.0;
    int used = 0;
    for (size_t k = 0; k < nb; ++k) {
      double mx = kNegInf;
      for (size_t i = k * per; i < (k + 1) * per; ++i)
        mx = std::max(mx, logs_[i]);
      double s = 0.0;
      if (mx > kNegInf)
        for (size_t i = k * per; i < (k + 1) * per; ++i)
          s += std::exp(logs_[i] - mx);
      double log_bm = mx > kNegInf ? mx + std::log(s / per) : kNegInf;
      double rel = log_bm == kNegInf ? -1.0 : std::exp(log_bm - lm) - 1.0;
      ss += rel * rel;
      ++used;
    }
    return std::sqrt(ss / (used * (used - 1.0)));
  }

  bool all_zero() const {
    for (double v : logs_)
      if (v > kNegInf) return false;
    return true;
  }

 private:
  std::vector<double> logs_;
};

struct NXiStats {
  long count = 0;
  double sum = 0.0;
  int mn = std::numeric_limits<int>::max();
  int mx = 0;
  void add(int n) {
    ++count;
    sum += n;
    mn = std::min(mn, n);
    mx = std::max(mx, n);
  }
};

}  // namespace

void ChibConfig::validate() const {
  if (n_burn < 1 || n_samples < 1 || n_xi < 1 || stage_burn < 0 || xi_burn < 0)
    throw std::invalid_argument("ChibConfig: counts must be positive");
}

HpEstimate estimate_log_hp(const MinutiaConfig& a, const MinutiaConfig& b,
                           const FixedParams& fixed, const ChibConfig& cfg) {
  cfg.validate();
  fixed.validate();
  if (a.size() < 1 || b.size() < 1)
    throw std::invalid_argument("estimate_log_hp: need n_A, n_B >= 1");

  Rng rng = Rng(cfg.seed).substream("chib");
  GibbsSampler sampler(a, b, fixed);
  sampler.init_default();

  HpEstimate out;
  NXiStats nxi_stats;
  LatentParams star;

  // ---- Stage 1: full run; fixes delta_A*.
  for (long i = 0; i < cfg.n_burn; ++i) sampler.sweep(rng);
  {
    double acc = 0.0;
    for (long i = 0; i < cfg.n_samples; ++i) {
      sampler.sweep(rng);
      acc += sampler.theta().delta_a;
      nxi_stats.add(sampler.n_xi());
    }
    star.delta_a = acc / cfg.n_samples;
  }
  sampler.clamp_delta_a(star.delta_a);

  // ---- Stage 2: fixes delta_B*; estimates the delta_A* ordinate.
  LogMeanAccumulator ord_da;
  {
    for (long i = 0; i < cfg.stage_burn; ++i) sampler.sweep(rng);
    double acc = 0.0;
    for (long i = 0; i < cfg.n_samples; ++i) {
      sampler.sweep(rng);
      acc += sampler.theta().delta_b;
      ord_da.add(d_logpdf(star.delta_a, sampler.cond_delta_a_params()));
    }
    star.delta_b = acc / cfg.n_samples;
  }
  out.stages.push_back({"dA", "dA", ord_da.log_mean(), ord_da.se_log()});
  sampler.clamp_delta_b(star.delta_b);

  // ---- Stage 3: fixes tau*; estimates the delta_B* ordinate.
  LogMeanAccumulator ord_db;
  {
    for (long i = 0; i < cfg.stage_burn; ++i) sampler.sweep(rng);
    cplx acc_a{0, 0}, acc_b{0, 0};
    for (long i = 0; i < cfg.n_samples; ++i) {
      sampler.sweep(rng);
      acc_a += sampler.theta().tau_a;
      acc_b += sampler.theta().tau_b;
      ord_db.add(d_logpdf(star.delta_b, sampler.cond_delta_b_params()));
    }
    star.tau_a = acc_a / static_cast<double>(cfg.n_samples);
    star.tau_b = acc_b / static_cast<double>(cfg.n_samples);
  }
  out.stages.push_back({"dA dB", "dB", ord_db.log_mean(), ord_db.se_log()});
  sampler.clamp_tau(star.tau_a, star.tau_b);

  // ---- Stage 4: fixes sigma*; estimates the tau* ordinate.
  LogMeanAccumulator ord_tau;
  {
    for (long i = 0; i < cfg.stage_burn; ++i) sampler.sweep(rng);
    double acc = 0.0;
    for (long i = 0; i < cfg.n_samples; ++i) {
      sampler.sweep(rng);
      acc += sampler.theta().sigma;
      ord_tau.add(sampler.cond_tau_params().logpdf(star.tau_a, star.tau_b));
    }
    star.sigma = acc / cfg.n_samples;
  }
  out.stages.push_back({"dA dB tau", "tau", ord_tau.log_mean(),
                        ord_tau.se_log()});
  sampler.clamp_sigma(star.sigma);
  const double u_star = 1.0 / (star.sigma * star.sigma);

  // ---- Stage 5: fixes psi*; estimates the sigma* ordinate (u space).
  LogMeanAccumulator ord_sigma;
  {
    for (long i = 0; i < cfg.stage_burn; ++i) sampler.sweep(rng);
    cplx acc{0, 0};
    for (long i = 0; i < cfg.n_samples; ++i) {
      sampler.sweep(rng);
      acc += sampler.theta().psi;
      ord_sigma.add(sampler.cond_sigma_params().logpdf_u(u_star));
    }
    double mod = std::abs(acc);
    star.psi = mod > 0.0 ? acc / mod : cplx{1.0, 0.0};
  }
  out.stages.push_back({"dA dB tau sigma", "sigma", ord_sigma.log_mean(),
                        ord_sigma.se_log()});
  sampler.clamp_psi(star.psi);

  out.theta_star = star;
  out.xi_star = argmax_xi(a, b, star, fixed);

  // ---- Stage 6: only xi moves; estimates the psi* ordinate and the first
  // beta term of the xi* ordinate (no edges clamped yet).
  LogMeanAccumulator ord_psi;
  std::vector<LogMeanAccumulator> beta_terms(b.size());
  {
    for (long i = 0; i < cfg.stage_burn; ++i) sampler.sweep(rng);
    for (long i = 0; i < cfg.n_samples; ++i) {
      sampler.sweep(rng);
      ord_psi.add(sampler.cond_psi_params().logpdf(star.psi));
      double h = sampler.xi_component_prob(0, out.xi_star.a_of_b(0));
      beta_terms[0].add(h > 0.0 ? std::log(h) : kNegInf);
    }
  }
  out.stages.push_back({"dA dB tau sigma psi", "psi", ord_psi.log_mean(),
                        ord_psi.se_log()});

  // ---- xi* ordinate, remaining beta terms: the term for b is averaged over
  // the run clamping the edges of all b' < b.
  for (int beta = 1; beta < b.size(); ++beta) {
    sampler.set_xi(out.xi_star);
    sampler.clamp_xi_below(beta, out.xi_star);
    for (long i = 0; i < cfg.xi_burn; ++i) sampler.xi_sweep(rng);
    for (long i = 0; i < cfg.n_xi; ++i) {
      sampler.xi_sweep(rng);
      double h = sampler.xi_component_prob(beta, out.xi_star.a_of_b(beta));
      beta_terms[beta].add(h > 0.0 ? std::log(h) : kNegInf);
    }
  }

  double log_xi_ord = 0.0;
  double se2 = 0.0;
  for (int beta = 0; beta < b.size(); ++beta) {
    if (beta_terms[beta].all_zero())
      throw ChibDegenerateError(
          "xi* ordinate term for b index " + std::to_string(beta) +
          " estimated zero probability; increase n_xi");
    double lm = beta_terms[beta].log_mean();
    out.beta_log_terms.push_back(lm);
    log_xi_ord += lm;
    double se = beta_terms[beta].se_log();
    se2 += se * se;
  }
  out.log_xi_ordinate = log_xi_ord;

  for (const auto& s : out.stages) se2 += s.se_log * s.se_log;
  out.mc_se_log = std::sqrt(se2);

  // Chib identity, u-space convention for the sigma component: the prior
  // density in (dA, dB, tau, u, psi) coordinates is
  // pr(theta) |dsigma/du| = pr(theta) * u^(-3/2)/2.
  double log_prior_u = log_prior(star, fixed) - std::log(2.0) -
                       1.5 * std::log(u_star);
  out.log_numerator =
      log_joint_hp(a, b, out.xi_star, star, fixed) + log_prior_u;
  out.log_denominator = log_xi_ord;
  for (const auto& s : out.stages) out.log_denominator += s.log_ordinate;
  out.log_hp = out.log_numerator - out.log_denominator;

  out.mean_n_xi = nxi_stats.count ? nxi_stats.sum / nxi_stats.count : 0.0;
  out.min_n_xi = nxi_stats.count ? nxi_stats.mn : 0;
  out.max_n_xi = nxi_stats.mx;
  return out;
}

LrResult log10_lr(const MinutiaConfig& a, const MinutiaConfig& b,
                  const FixedParams& fixed, const ChibConfig& cfg) {
  LrResult r;
  r.a_id = a.id();
  r.b_id = b.id();
  r.seed = cfg.seed;
  r.hp = estimate_log_hp(a, b, fixed, cfg);
  r.log_hp = r.hp.log_hp;
  r.log_hd = log_marginal_hd(a, b, fixed);
  r.log10_lr = (r.log_hp - r.log_hd) / std::log(10.0);
  r.mc_se_log10 = r.hp.mc_se_log / std::log(10.0);
  return r;
}

std::string lr_result_to_json(const LrResult& r) {
  nlohmann::json j;
  j["schema"] = "lr-result/1";
  j["a_id"] = r.a_id;
  j["b_id"] = r.b_id;
  j["log10_lr"] = r.log10_lr;
  j["log_hp"] = r.log_hp;
  j["log_hd"] = r.log_hd;
  j["mc_se"] = r.mc_se_log10;
  j["seed"] = r.seed;
  nlohmann::json stages;
  for (const auto& s : r.hp.stages) {
    stages[s.ordinate] = {{"clamped", s.clamped},
                          {"log_ordinate", s.log_ordinate},
                          {"se_log", s.se_log}};
  }
  stages["xi"] = {{"log_ordinate", r.hp.log_xi_ordinate},
                  {"n_terms", r.hp.beta_log_terms.size()}};
  j["stages"] = stages;
  j["theta_star"] = {{"delta_a", r.hp.theta_star.delta_a},
                     {"delta_b", r.hp.theta_star.delta_b},
                     {"tau_a", {r.hp.theta_star.tau_a.real(),
                                r.hp.theta_star.tau_a.imag()}},
                     {"tau_b", {r.hp.theta_star.tau_b.real(),
                                r.hp.theta_star.tau_b.imag()}},
                     {"sigma", r.hp.theta_star.sigma},
                     {"psi_angle", std::arg(r.hp.theta_star.psi)}};
  j["n_xi"] = {{"mean", r.hp.mean_n_xi},
               {"min", r.hp.min_n_xi},
               {"max", r.hp.max_n_xi},
               {"star", r.hp.xi_star.size()}};
  return j.dump(2) + "\n";
}

}  // namespace fplr
