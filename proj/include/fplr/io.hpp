#ifndef FPLR_IO_HPP
#define FPLR_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "fplr/minutia.hpp"
#include "fplr/model.hpp"

namespace fplr {

/// File formats (all JSON, with a versioned "schema" field):
///   configuration: {"schema":"minutia-config/1","id":...,
///                   "minutiae":[{"x","y","theta","type"},...]}
///   matching:      {"schema":"matching/1","a_id","b_id","edges":[[iA,iB],..]}
///   parameters:    {"schema":"params/1", rho0, chi, epsilon, omega, kappa,
///                   alpha_delta, beta_delta}
///   manifest:      {"schema":"manifest/1", seed, params, pairs:[{a, b,
///                   matching, subset, a_id, b_id, n_b}, ...]}

MinutiaConfig read_config(const std::filesystem::path& path);
void write_config(const std::filesystem::path& path, const MinutiaConfig& c);

std::string config_to_json(const MinutiaConfig& c);
MinutiaConfig config_from_json(const std::string& text);

/// Matching files carry the ids of the configurations they connect; sizes
/// are taken from the configs when the matching is attached.
struct MatchingFile {
  std::string a_id;
  std::string b_id;
  std::vector<std::pair<int, int>> edges;
};

MatchingFile read_matching(const std::filesystem::path& path);
void write_matching(const std::filesystem::path& path, const std::string& a_id,
                    const std::string& b_id, const Matching& m);

/// Binds a matching file to its configurations, validating ids and bounds.
Matching attach_matching(const MatchingFile& mf, const MinutiaConfig& a,
                         const MinutiaConfig& b);

FixedParams read_params(const std::filesystem::path& path);
void write_params(const std::filesystem::path& path, const FixedParams& p);
std::string params_to_json(const FixedParams& p);
FixedParams params_from_json(const std::string& text);

struct ManifestPair {
  std::string config_a;
  std::string config_b;
  std::string matching;  // empty if absent
  std::string subset;    // good | bad | ugly
  std::string a_id;
  std::string b_id;
  int n_b = 0;
};

struct Manifest {
  std::uint64_t seed = 0;
  FixedParams params;
  std::vector<ManifestPair> pairs;
};

Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const Manifest& m);

}  // namespace fplr

#endif
