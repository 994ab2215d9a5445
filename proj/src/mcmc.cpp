#include "fplr/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "fplr/special.hpp"

namespace fplr {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

double d_logpdf(double delta, const DParams& p) {
  if (delta <= 0.0 || delta >= 1.0) return kNegInf;
  return (p.alpha - 1.0) * std::log(delta) +
         (p.beta - 1.0) * std::log1p(-delta) - p.lambda * delta -
         log_d_normalizer(p.alpha, p.beta, p.lambda);
}

std::pair<cplx, cplx> TauConditional::sample(Rng& rng) const {
  // Cholesky of the Hermitian covariance [[caa, cab],[conj(cab), cbb]].
  double l11 = std::sqrt(cov_aa);
  cplx l21 = std::conj(cov_ab) / l11;
  double l22sq = cov_bb - std::norm(l21);
  double l22 = std::sqrt(std::max(l22sq, 0.0));
  cplx z1 = sample_std_complex_normal(rng);
  cplx z2 = sample_std_complex_normal(rng);
  return {mean_a + l11 * z1, mean_b + l21 * z1 + l22 * z2};
}

double TauConditional::logpdf(cplx ta, cplx tb) const {
  // Invert the 2x2 Hermitian covariance.
  double det = cov_aa * cov_bb - std::norm(cov_ab);
  double paa = cov_bb / det;
  double pbb = cov_aa / det;
  cplx pab = -cov_ab / det;
  cplx da = ta - mean_a;
  cplx db = tb - mean_b;
  double quad = paa * std::norm(da) + pbb * std::norm(db) +
                2.0 * (pab * std::conj(da) * db).real();
  return -quad - 2.0 * std::log(M_PI) - log_det_cov;
}

double SigmaConditional::sample_sigma(Rng& rng) const {
  double u = sample_gamma(rng, shape, rate);
  return 1.0 / std::sqrt(u);
}

double SigmaConditional::logpdf_u(double u) const {
  if (!(u > 0.0)) return kNegInf;
  return shape * std::log(rate) - std::lgamma(shape) +
         (shape - 1.0) * std::log(u) - rate * u;
}

cplx PsiConditional::sample(Rng& rng) const {
  double mod = std::abs(nu0);
  if (mod < 1e-12) {
    double t = rng.uniform(-M_PI, M_PI);
    return {std::cos(t), std::sin(t)};
  }
  return sample_von_mises(rng, nu0 / mod, mod);
}

double PsiConditional::logpdf(cplx psi) const {
  double mod = std::abs(nu0);
  if (mod < 1e-12) return 0.0;
  return (psi * std::conj(nu0)).real() - log_bessel_i0(mod);
}

GibbsSampler::GibbsSampler(const MinutiaConfig& a, const MinutiaConfig& b,
                           const FixedParams& fixed)
    : a_(a), b_(b), fixed_(fixed) {
  fixed_.validate();
  na_ = a_.size();
  nb_ = b_.size();
  if (na_ < 1 || nb_ < 1)
    throw std::invalid_argument("GibbsSampler: need n_A, n_B >= 1");
  a_of_b_.assign(nb_, -1);
  b_of_a_.assign(na_, -1);
  free_b_.resize(nb_);
  for (int j = 0; j < nb_; ++j) free_b_[j] = j;
  weights_.assign(static_cast<size_t>(na_) * nb_, 0.0);
  exps_.assign(static_cast<size_t>(na_) * nb_, 0.0);
  col_max_.assign(nb_, 0.0);
  col_phi_.assign(nb_, 1.0);
  col_sum_.assign(nb_, 0.0);
  init_default();
}

void GibbsSampler::init_default() {
  theta_.delta_a = fixed_.alpha_delta / (fixed_.alpha_delta + fixed_.beta_delta);
  theta_.delta_b = 0.5;
  theta_.tau_a = a_.centroid();
  theta_.tau_b = b_.centroid();
  theta_.psi = cplx{1.0, 0.0};
  double s2 = (a_.scatter() + b_.scatter()) / (2.0 * (na_ + nb_));
  theta_.sigma = std::sqrt(std::max(s2, 1e-12));
  std::fill(a_of_b_.begin(), a_of_b_.end(), -1);
  std::fill(b_of_a_.begin(), b_of_a_.end(), -1);
  n_xi_ = 0;
  sweep_index_ = 0;
  tables_fresh_ = false;
}

void GibbsSampler::set_theta(const LatentParams& theta) {
  theta_ = theta;
  tables_fresh_ = false;
}

void GibbsSampler::set_xi(const Matching& xi) {
  if (xi.n_a() != na_ || xi.n_b() != nb_)
    throw std::invalid_argument("set_xi: matching sizes do not fit");
  std::fill(a_of_b_.begin(), a_of_b_.end(), -1);
  std::fill(b_of_a_.begin(), b_of_a_.end(), -1);
  n_xi_ = 0;
  for (auto [a, b] : xi.edges()) match(a, b);
}

void GibbsSampler::clamp_delta_a(double v) {
  theta_.delta_a = v;
  clamp_da_ = true;
  tables_fresh_ = false;
}
void GibbsSampler::clamp_delta_b(double v) {
  theta_.delta_b = v;
  clamp_db_ = true;
  tables_fresh_ = false;
}
void GibbsSampler::clamp_tau(cplx ta, cplx tb) {
  theta_.tau_a = ta;
  theta_.tau_b = tb;
  clamp_tau_ = true;
  tables_fresh_ = false;
}
void GibbsSampler::clamp_sigma(double v) {
  theta_.sigma = v;
  clamp_sigma_ = true;
  tables_fresh_ = false;
}
void GibbsSampler::clamp_psi(cplx v) {
  theta_.psi = v;
  clamp_psi_ = true;
  tables_fresh_ = false;
}

void GibbsSampler::clamp_xi_below(int b_limit, const Matching& reference) {
  if (b_limit < 0 || b_limit > nb_)
    throw std::invalid_argument("clamp_xi_below: limit out of range");
  if (reference.n_a() != na_ || reference.n_b() != nb_)
    throw std::invalid_argument("clamp_xi_below: reference sizes do not fit");
  for (int b = 0; b < b_limit; ++b) unmatch_b(b);
  for (int b = 0; b < b_limit; ++b) {
    int aref = reference.a_of_b(b);
    if (aref >= 0) {
      if (b_of_a_[aref] != -1) unmatch_b(b_of_a_[aref]);
      match(aref, b);
    }
  }
  xi_clamp_limit_ = b_limit;
  free_b_.clear();
  for (int b = b_limit; b < nb_; ++b) free_b_.push_back(b);
}

void GibbsSampler::clamp_xi_all() {
  xi_clamp_limit_ = nb_;
  free_b_.clear();
}

void GibbsSampler::unmatch_b(int b) {
  int a = a_of_b_[b];
  if (a >= 0) {
    a_of_b_[b] = -1;
    b_of_a_[a] = -1;
    --n_xi_;
  }
}

void GibbsSampler::match(int a, int b) {
  if (a_of_b_[b] != -1 || b_of_a_[a] != -1)
    throw std::logic_error("match: slot already taken");
  a_of_b_[b] = a;
  b_of_a_[a] = b;
  ++n_xi_;
}

DParams GibbsSampler::cond_delta_a_params() const {
  return {fixed_.alpha_delta + na_, fixed_.beta_delta + nb_ - n_xi_,
          fixed_.rho0 * (1.0 - theta_.delta_b)};
}

DParams GibbsSampler::cond_delta_b_params() const {
  // Exponents of the joint density: delta_B^nB (1-delta_B)^(nA-nxi)
  // e^{-rho0(1-delta_A)delta_B} with a flat prior.
  return {nb_ + 1.0, na_ - n_xi_ + 1.0,
          fixed_.rho0 * (1.0 - theta_.delta_a)};
}

TauConditional GibbsSampler::cond_tau_params() const {
  SigmaAB s(theta_.sigma, theta_.psi, fixed_.omega);
  cplx sa_u{0, 0}, sa_m{0, 0}, sb_u{0, 0}, sb_m{0, 0};
  for (int i = 0; i < na_; ++i) {
    if (b_of_a_[i] < 0)
      sa_u += a_[i].location;
    else
      sa_m += a_[i].location;
  }
  for (int j = 0; j < nb_; ++j) {
    if (a_of_b_[j] < 0)
      sb_u += b_[j].location;
    else
      sb_m += b_[j].location;
  }
  // Precision (in units of 1/sigma^2) and matching linear term.
  double paa = (na_ - n_xi_) + n_xi_ * s.x;
  double pbb = (nb_ - n_xi_) + n_xi_ * s.x;
  cplx pab = -static_cast<double>(n_xi_) * s.x * s.coupling;
  cplx va = sa_u + s.x * (sa_m - s.coupling * sb_m);
  cplx vb = sb_u + s.x * (sb_m - std::conj(s.coupling) * sa_m);
  double det = paa * pbb - std::norm(pab);
  TauConditional t;
  t.mean_a = (pbb * va - pab * vb) / det;
  t.mean_b = (paa * vb - std::conj(pab) * va) / det;
  t.cov_aa = s.sigma2 * pbb / det;
  t.cov_bb = s.sigma2 * paa / det;
  t.cov_ab = -s.sigma2 * pab / det;
  t.log_det_cov = 2.0 * std::log(s.sigma2) - std::log(det);
  return t;
}

SigmaConditional GibbsSampler::cond_sigma_params() const {
  SigmaAB s(1.0, theta_.psi, fixed_.omega);
  double q = 0.0;
  for (int i = 0; i < na_; ++i)
    if (b_of_a_[i] < 0) q += std::norm(a_[i].location - theta_.tau_a);
  for (int j = 0; j < nb_; ++j)
    if (a_of_b_[j] < 0) q += std::norm(b_[j].location - theta_.tau_b);
  for (int j = 0; j < nb_; ++j) {
    int i = a_of_b_[j];
    if (i < 0) continue;
    cplx da = a_[i].location - theta_.tau_a;
    cplx db = b_[j].location - theta_.tau_b;
    q += s.x * (std::norm(da) + std::norm(db)) -
         2.0 * s.y * (std::conj(theta_.psi) * da * std::conj(db)).real();
  }
  if (!(q > 0.0))
    throw std::runtime_error("sigma conditional: degenerate rate");
  return {static_cast<double>(na_ + nb_ + 2), q};
}

PsiConditional GibbsSampler::cond_psi_params() const {
  double s2 = theta_.sigma * theta_.sigma;
  double w2p1 = fixed_.omega * fixed_.omega + 1.0;
  double y = w2p1 / (w2p1 * w2p1 - 1.0);
  cplx nu0{0.0, 0.0};
  for (int j = 0; j < nb_; ++j) {
    int i = a_of_b_[j];
    if (i < 0) continue;
    nu0 += fixed_.kappa * a_[i].orientation * std::conj(b_[j].orientation);
    nu0 += 2.0 * y / s2 * (a_[i].location - theta_.tau_a) *
           std::conj(b_[j].location - theta_.tau_b);
  }
  return {nu0};
}

void GibbsSampler::refresh_tables() {
  const double s2 = theta_.sigma * theta_.sigma;
  const double w2p1 = fixed_.omega * fixed_.omega + 1.0;
  const double denom = w2p1 * w2p1 - 1.0;
  const double y = w2p1 / denom;
  const cplx psib = std::conj(theta_.psi);
  double lt[3][3];
  for (int ta = -1; ta <= 1; ++ta)
    for (int tb = -1; tb <= 1; ++tb)
      lt[ta + 1][tb + 1] = log_type_compat(ta, tb, fixed_.chi);
  const double constant = 2.0 * std::log(w2p1) - std::log(denom) -
                          std::log(fixed_.rho0) - log_bessel_i0(fixed_.kappa) -
                          std::log1p(-theta_.delta_a) -
                          std::log1p(-theta_.delta_b);

  std::vector<cplx> ca(na_), cda(na_), db(nb_);
  std::vector<double> nda(na_), ndb(nb_);
  for (int i = 0; i < na_; ++i) {
    ca[i] = fixed_.kappa * a_[i].orientation * psib;
    cplx d = a_[i].location - theta_.tau_a;
    cda[i] = 2.0 * y / s2 * psib * d;
    nda[i] = std::norm(d);
  }
  for (int j = 0; j < nb_; ++j) {
    db[j] = b_[j].location - theta_.tau_b;
    ndb[j] = std::norm(db[j]);
  }
  for (int j = 0; j < nb_; ++j) {
    double mx = 0.0;  // the phi candidate has weight 0
    for (int i = 0; i < na_; ++i) {
      double ltv = lt[a_[i].mtype + 1][b_[j].mtype + 1];
      double w =
          ltv == kNegInf
              ? kNegInf
              : (ca[i] * std::conj(b_[j].orientation)).real() +
                    (cda[i] * std::conj(db[j])).real() -
                    (nda[i] + ndb[j]) / (denom * s2) + constant;
      weights_[static_cast<size_t>(i) * nb_ + j] = w;
      mx = std::max(mx, w);
    }
    col_max_[j] = mx;
    col_phi_[j] = std::exp(-mx);
    double sum = col_phi_[j];
    for (int i = 0; i < na_; ++i) {
      double w = weights_[static_cast<size_t>(i) * nb_ + j];
      double e = w == kNegInf ? 0.0 : std::exp(w - mx);
      exps_[static_cast<size_t>(i) * nb_ + j] = e;
      sum += e;
    }
    col_sum_[j] = sum;
  }
  tables_fresh_ = true;
}

double GibbsSampler::column_normalizer(int b, int skip_current_of_b) const {
  // Z over the permitted support: phi + every a not matched to another b.
  double z = col_sum_[b];
  for (int j = 0; j < nb_; ++j) {
    int a2 = a_of_b_[j];
    if (a2 >= 0 && j != skip_current_of_b && j != b)
      z -= exps_[static_cast<size_t>(a2) * nb_ + b];
  }
  if (z < col_sum_[b] * 1e-12) {
    // Heavy cancellation: rebuild from the included entries.
    z = col_phi_[b];
    for (int i = 0; i < na_; ++i)
      if (b_of_a_[i] == -1 || b_of_a_[i] == b)
        z += exps_[static_cast<size_t>(i) * nb_ + b];
  }
  return z;
}

void GibbsSampler::xi_step(Rng& rng) {
  if (free_b_.empty()) return;
  if (!tables_fresh_) refresh_tables();
  int b = free_b_[rng.uniform_below(free_b_.size())];
  double z = column_normalizer(b, -1);
  double t = rng.uniform() * z;
  int chosen = -1;  // phi
  double acc = col_phi_[b];
  if (t >= acc) {
    bool found = false;
    int last_ok = -1;
    for (int i = 0; i < na_; ++i) {
      if (b_of_a_[i] != -1 && b_of_a_[i] != b) continue;
      double e = exps_[static_cast<size_t>(i) * nb_ + b];
      if (e <= 0.0) continue;
      last_ok = i;
      acc += e;
      if (t < acc) {
        chosen = i;
        found = true;
        break;
      }
    }
    if (!found) chosen = last_ok;  // rounding at the last boundary
  }
  int cur = a_of_b_[b];
  if (chosen == cur) return;
  unmatch_b(b);
  if (chosen >= 0) match(chosen, b);
}

void GibbsSampler::xi_sweep(Rng& rng) {
  if (free_b_.empty()) return;
  for (int k = 0; k < na_; ++k) xi_step(rng);
}

double GibbsSampler::xi_component_prob(int b, int a_star) {
  if (b < 0 || b >= nb_) throw std::invalid_argument("b out of range");
  if (!tables_fresh_) refresh_tables();
  double z = column_normalizer(b, -1);
  if (a_star < 0) return col_phi_[b] / z;
  if (a_star >= na_) throw std::invalid_argument("a index out of range");
  if (b_of_a_[a_star] != -1 && b_of_a_[a_star] != b) return 0.0;
  return exps_[static_cast<size_t>(a_star) * nb_ + b] / z;
}

void GibbsSampler::sweep(Rng& rng) {
  if (!clamp_da_) {
    DParams p = cond_delta_a_params();
    theta_.delta_a = sample_d_distribution(rng, p.alpha, p.beta, p.lambda);
  }
  if (!clamp_db_) {
    DParams p = cond_delta_b_params();
    theta_.delta_b = sample_d_distribution(rng, p.alpha, p.beta, p.lambda);
  }
  if (!clamp_tau_) {
    auto [ta, tb] = cond_tau_params().sample(rng);
    theta_.tau_a = ta;
    theta_.tau_b = tb;
  }
  if (!clamp_sigma_) theta_.sigma = cond_sigma_params().sample_sigma(rng);
  if (!clamp_psi_) theta_.psi = cond_psi_params().sample(rng);
  if (!(clamp_da_ && clamp_db_ && clamp_tau_ && clamp_sigma_ && clamp_psi_))
    tables_fresh_ = false;
  xi_sweep(rng);
  ++sweep_index_;
  if (trace_) {
    *trace_ << sweep_index_ << ',' << theta_.delta_a << ',' << theta_.delta_b
            << ',' << theta_.tau_a.real() << ',' << theta_.tau_a.imag() << ','
            << theta_.tau_b.real() << ',' << theta_.tau_b.imag() << ','
            << theta_.sigma << ',' << std::arg(theta_.psi) << ',' << n_xi_
            << '\n';
  }
}

const char* GibbsSampler::trace_header() {
  return "sweep,delta_a,delta_b,tau_a_re,tau_a_im,tau_b_re,tau_b_im,sigma,"
         "psi_angle,n_xi";
}

ChainState GibbsSampler::state() const {
  return ChainState{theta_, xi(), sweep_index_};
}

Matching GibbsSampler::xi() const {
  std::vector<std::pair<int, int>> edges;
  edges.reserve(n_xi_);
  for (int j = 0; j < nb_; ++j)
    if (a_of_b_[j] >= 0) edges.emplace_back(a_of_b_[j], j);
  return Matching(na_, nb_, std::move(edges));
}

Matching step_xi(Rng& rng, const MinutiaConfig& a, const MinutiaConfig& b,
                 const Matching& xi, const LatentParams& theta,
                 const FixedParams& fixed) {
  GibbsSampler s(a, b, fixed);
  s.set_theta(theta);
  s.set_xi(xi);
  s.xi_step(rng);
  return s.xi();
}

std::vector<int> max_weight_assignment(int n_rows, int n_cols,
                                       const std::vector<double>& weights) {
  if (static_cast<int>(weights.size()) != n_rows * n_cols)
    throw std::invalid_argument("max_weight_assignment: bad weight matrix");
  const int n = std::max(n_rows, n_cols);
  auto cost = [&](int i, int j) -> double {
    if (i >= n_rows || j >= n_cols) return 0.0;
    double w = weights[static_cast<size_t>(i) * n_cols + j];
    return w > 0.0 ? -w : 0.0;
  };
  // Jonker-Volgenant style shortest augmenting paths with potentials.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = 0;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n_rows, -1);
  for (int j = 1; j <= n; ++j) {
    int i = p[j];
    if (i >= 1 && i <= n_rows && j <= n_cols) row_to_col[i - 1] = j - 1;
  }
  return row_to_col;
}

Matching argmax_xi(const MinutiaConfig& a, const MinutiaConfig& b,
                   const LatentParams& theta, const FixedParams& fixed) {
  const int na = a.size(), nb = b.size();
  std::vector<double> w(static_cast<size_t>(na) * nb);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j)
      w[static_cast<size_t>(i) * nb + j] = edge_weight(a[i], b[j], theta, fixed);
  auto row_to_col = max_weight_assignment(na, nb, w);
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < na; ++i) {
    int j = row_to_col[i];
    if (j >= 0 && w[static_cast<size_t>(i) * nb + j] > 0.0)
      edges.emplace_back(i, j);
  }
  return Matching(na, nb, std::move(edges));
}

}  // namespace fplr
