#ifndef FPLR_SIMULATE_HPP
#define FPLR_SIMULATE_HPP

#include <filesystem>
#include <string>

#include "fplr/io.hpp"
#include "fplr/model.hpp"
#include "fplr/rng.hpp"

namespace fplr {

struct SimulatedPair {
  MinutiaConfig a;
  MinutiaConfig b;
  Matching true_xi;
  LatentParams true_theta;
};

/// One fingerprint/fingermark pair from the generative model under H_p:
/// a latent Poisson(rho0) configuration with standard complex normal
/// locations, uniform orientations and types +-1 w.p. (chi, 1-chi);
/// Bernoulli thinning with delta_A ~ Beta(alpha_delta,beta_delta) and
/// delta_B ~ U(0,1); complex normal location errors of scale omega; types
/// kept w.p. 1-epsilon (else unobserved); orientation coupling such that
/// s_a conj(s_b psi) ~ vM(1,kappa) for matched pairs.  Canonical maps
/// tau = 0, |psi| = 1 with a uniform relative rotation (the scoring
/// pipeline is transform-invariant, so this choice is immaterial).
SimulatedPair sample_pair_hp(Rng& rng, const FixedParams& fixed,
                             const std::string& id_prefix);

/// Two configurations from independent latent configurations (H_d); each
/// side runs the same single-configuration pipeline as sample_pair_hp.
std::pair<MinutiaConfig, MinutiaConfig> sample_pair_hd(
    Rng& rng, const FixedParams& fixed, const std::string& id_prefix);

struct SimConfig {
  FixedParams fixed;
  int n_pairs = 258;
  bool hypothesis_hp = true;
  std::uint64_t seed = 0;
};

/// Writes n_pairs simulated pairs plus ground-truth matchings under
/// out_dir and returns the manifest (also written as manifest.json).
/// Pairs are partitioned into good/bad/ugly subsets by descending n_B
/// with the 88/85/85 proportions of the 258-pair protocol.
Manifest make_dataset(const SimConfig& cfg,
                      const std::filesystem::path& out_dir);

/// Subset labels by descending n_B rank: proportions 88:85:85.
std::string subset_for_rank(int rank, int n);

int sample_poisson(Rng& rng, double mean);

}  // namespace fplr

#endif
