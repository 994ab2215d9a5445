#include "fplr/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fplr/samplers.hpp"

namespace fplr {

int sample_poisson(Rng& rng, double mean) {
  if (!(mean >= 0.0)) throw std::invalid_argument("poisson mean must be >= 0");
  // Exponential inter-arrival times; exact for any mean.
  int n = 0;
  double t = 0.0;
  for (;;) {
    t += -std::log(rng.uniform());
    if (t > mean) return n;
    ++n;
  }
}

namespace {

struct LatentMinutia {
  cplx r;
  cplx s;
  int t;
};

std::vector<LatentMinutia> draw_latent(Rng& rng, const FixedParams& fixed) {
  int n = sample_poisson(rng, fixed.rho0);
  std::vector<LatentMinutia> m(n);
  for (auto& lm : m) {
    lm.r = sample_std_complex_normal(rng);
    double ang = rng.uniform(-M_PI, M_PI);
    lm.s = {std::cos(ang), std::sin(ang)};
    lm.t = rng.uniform() < fixed.chi ? 1 : -1;
  }
  return m;
}

/// Observation pipeline for one side: thinning indicators are supplied by
/// the caller (they couple the two sides under H_p).
MinutiaConfig observe(Rng& rng, const std::vector<LatentMinutia>& latent,
                      const std::vector<char>& keep, cplx psi_side,
                      const FixedParams& fixed, bool orientation_error,
                      const std::string& id) {
  std::vector<Minutia> out;
  for (size_t k = 0; k < latent.size(); ++k) {
    if (!keep[k]) continue;
    const auto& lm = latent[k];
    cplx e = fixed.omega * sample_std_complex_normal(rng);
    cplx s = lm.s;
    if (orientation_error) {
      // One von Mises multiplicative error carries the whole matched-pair
      // coupling: s_a conj(s_b psi) = eta ~ vM(1,kappa) by construction.
      cplx eta = sample_von_mises(rng, cplx{1.0, 0.0}, fixed.kappa);
      s *= std::conj(eta);
    }
    int t = rng.uniform() < fixed.epsilon ? 0 : lm.t;
    out.push_back(Minutia{psi_side * (lm.r + e), psi_side * s, t});
  }
  return MinutiaConfig(id, std::move(out));
}

}  // namespace

SimulatedPair sample_pair_hp(Rng& rng, const FixedParams& fixed,
                             const std::string& id_prefix) {
  fixed.validate();
  auto latent = draw_latent(rng, fixed);
  LatentParams theta;
  theta.delta_a = sample_beta(rng, fixed.alpha_delta, fixed.beta_delta);
  theta.delta_b = rng.uniform();
  double rot = rng.uniform(-M_PI, M_PI);
  cplx psi{std::cos(rot), std::sin(rot)};
  theta.psi = psi;
  theta.tau_a = {0.0, 0.0};
  theta.tau_b = {0.0, 0.0};
  theta.sigma = std::sqrt(1.0 + fixed.omega * fixed.omega);

  std::vector<char> in_a(latent.size()), in_b(latent.size());
  for (size_t k = 0; k < latent.size(); ++k) {
    in_a[k] = rng.uniform() < theta.delta_a;
    in_b[k] = rng.uniform() < theta.delta_b;
  }
  // psi = psi_A conj(psi_B); put the relative rotation on the A side.
  MinutiaConfig a =
      observe(rng, latent, in_a, psi, fixed, false, id_prefix + "-a");
  MinutiaConfig b = observe(rng, latent, in_b, cplx{1.0, 0.0}, fixed, true,
                            id_prefix + "-b");

  std::vector<std::pair<int, int>> edges;
  int ia = 0, ib = 0;
  for (size_t k = 0; k < latent.size(); ++k) {
    if (in_a[k] && in_b[k]) edges.emplace_back(ia, ib);
    if (in_a[k]) ++ia;
    if (in_b[k]) ++ib;
  }
  return SimulatedPair{std::move(a), std::move(b),
                       Matching(ia, ib, std::move(edges)), theta};
}

std::pair<MinutiaConfig, MinutiaConfig> sample_pair_hd(
    Rng& rng, const FixedParams& fixed, const std::string& id_prefix) {
  fixed.validate();
  auto make_one = [&](double delta, cplx psi_side, bool orient_err,
                      const std::string& id) {
    auto latent = draw_latent(rng, fixed);
    std::vector<char> keep(latent.size());
    for (auto& k : keep) k = rng.uniform() < delta;
    return observe(rng, latent, keep, psi_side, fixed, orient_err, id);
  };
  double da = sample_beta(rng, fixed.alpha_delta, fixed.beta_delta);
  double db = rng.uniform();
  double rot = rng.uniform(-M_PI, M_PI);
  MinutiaConfig a = make_one(da, cplx{std::cos(rot), std::sin(rot)}, false,
                             id_prefix + "-a");
  MinutiaConfig b = make_one(db, cplx{1.0, 0.0}, true, id_prefix + "-b");
  return {std::move(a), std::move(b)};
}

std::string subset_for_rank(int rank, int n) {
  // 88/85/85 proportions of the 258-pair protocol, by descending n_B rank.
  long n_good = std::lround(88.0 * n / 258.0);
  long n_bad = std::lround(85.0 * n / 258.0);
  if (rank < n_good) return "good";
  if (rank < n_good + n_bad) return "bad";
  return "ugly";
}

Manifest make_dataset(const SimConfig& cfg,
                      const std::filesystem::path& out_dir) {
  if (cfg.n_pairs < 1)
    throw std::invalid_argument("make_dataset: n_pairs must be >= 1");
  cfg.fixed.validate();
  std::filesystem::create_directories(out_dir);

  Rng base(cfg.seed);
  Manifest manifest;
  manifest.seed = cfg.seed;
  manifest.params = cfg.fixed;

  struct Entry {
    ManifestPair mp;
    int n_b;
    int index;
  };
  std::vector<Entry> entries;

  char name[64];
  for (int i = 0; i < cfg.n_pairs; ++i) {
    Rng rng = base.substream(static_cast<std::uint64_t>(i));
    std::snprintf(name, sizeof name, "pair-%04d", i);
    ManifestPair mp;
    int n_b = 0;
    if (cfg.hypothesis_hp) {
      SimulatedPair sp = sample_pair_hp(rng, cfg.fixed, name);
      mp.a_id = sp.a.id();
      mp.b_id = sp.b.id();
      mp.config_a = std::string(name) + "_a.json";
      mp.config_b = std::string(name) + "_b.json";
      mp.matching = std::string(name) + "_xi.json";
      write_config(out_dir / mp.config_a, sp.a);
      write_config(out_dir / mp.config_b, sp.b);
      write_matching(out_dir / mp.matching, sp.a.id(), sp.b.id(), sp.true_xi);
      n_b = sp.b.size();
    } else {
      auto [a, b] = sample_pair_hd(rng, cfg.fixed, name);
      mp.a_id = a.id();
      mp.b_id = b.id();
      mp.config_a = std::string(name) + "_a.json";
      mp.config_b = std::string(name) + "_b.json";
      write_config(out_dir / mp.config_a, a);
      write_config(out_dir / mp.config_b, b);
      n_b = b.size();
    }
    mp.n_b = n_b;
    entries.push_back(Entry{std::move(mp), n_b, i});
  }

  // Quality subsets are a function of n_B only (ties broken by index so the
  // partition is deterministic).
  std::vector<int> order(entries.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    if (entries[x].n_b != entries[y].n_b) return entries[x].n_b > entries[y].n_b;
    return entries[x].index < entries[y].index;
  });
  for (size_t rank = 0; rank < order.size(); ++rank)
    entries[order[rank]].mp.subset =
        subset_for_rank(static_cast<int>(rank), cfg.n_pairs);

  for (auto& e : entries) manifest.pairs.push_back(std::move(e.mp));
  write_manifest(out_dir / "manifest.json", manifest);
  return manifest;
}

}  // namespace fplr
