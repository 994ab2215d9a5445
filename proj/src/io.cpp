#include "fplr/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace fplr {

using nlohmann::json;

namespace {

json load_json(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error(std::string("cannot open ") + what + " file: " +
                             path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed " + std::string(what) + " file " +
                             path.string() + ": " + e.what());
  }
  return j;
}

void save_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write file: " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void check_schema(const json& j, const std::string& want, const char* what) {
  std::string got = j.value("schema", "");
  if (got != want)
    throw std::runtime_error(std::string("unexpected ") + what +
                             " schema: \"" + got + "\" (want \"" + want +
                             "\")");
}

}  // namespace

std::string config_to_json(const MinutiaConfig& c) {
  json j;
  j["schema"] = "minutia-config/1";
  j["id"] = c.id();
  json arr = json::array();
  for (const auto& m : c.minutiae()) {
    arr.push_back({{"x", m.location.real()},
                   {"y", m.location.imag()},
                   {"theta", std::arg(m.orientation)},
                   {"type", m.mtype}});
  }
  j["minutiae"] = arr;
  return j.dump(2) + "\n";
}

MinutiaConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed configuration: ") +
                             e.what());
  }
  check_schema(j, "minutia-config/1", "configuration");
  std::vector<Minutia> ms;
  for (const auto& r : j.at("minutiae")) {
    double x = r.at("x").get<double>();
    double y = r.at("y").get<double>();
    double theta = r.at("theta").get<double>();
    int type = r.at("type").get<int>();
    if (type < -1 || type > 1)
      throw std::runtime_error("configuration record has type outside {-1,0,1}");
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(theta))
      throw std::runtime_error("configuration record has non-finite fields");
    ms.push_back(make_minutia(x, y, theta, type));
  }
  return MinutiaConfig(j.value("id", ""), std::move(ms));
}

MinutiaConfig read_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open configuration file: " +
                             path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

void write_config(const std::filesystem::path& path, const MinutiaConfig& c) {
  save_text(path, config_to_json(c));
}

MatchingFile read_matching(const std::filesystem::path& path) {
  json j = load_json(path, "matching");
  check_schema(j, "matching/1", "matching");
  MatchingFile mf;
  mf.a_id = j.at("a_id").get<std::string>();
  mf.b_id = j.at("b_id").get<std::string>();
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2)
      throw std::runtime_error("matching edge must be a pair of indices");
    mf.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  return mf;
}

void write_matching(const std::filesystem::path& path, const std::string& a_id,
                    const std::string& b_id, const Matching& m) {
  json j;
  j["schema"] = "matching/1";
  j["a_id"] = a_id;
  j["b_id"] = b_id;
  json arr = json::array();
  for (auto [a, b] : m.edges()) arr.push_back({a, b});
  j["edges"] = arr;
  save_text(path, j.dump(2) + "\n");
}

Matching attach_matching(const MatchingFile& mf, const MinutiaConfig& a,
                         const MinutiaConfig& b) {
  if (mf.a_id != a.id() || mf.b_id != b.id())
    throw std::runtime_error("matching file ids (" + mf.a_id + "," + mf.b_id +
                             ") do not name configurations (" + a.id() + "," +
                             b.id() + ")");
  return Matching(a.size(), b.size(), mf.edges);
}

std::string params_to_json(const FixedParams& p) {
  json j;
  j["schema"] = "params/1";
  j["rho0"] = p.rho0;
  j["chi"] = p.chi;
  j["epsilon"] = p.epsilon;
  j["omega"] = p.omega;
  j["kappa"] = p.kappa;
  j["alpha_delta"] = p.alpha_delta;
  j["beta_delta"] = p.beta_delta;
  return j.dump(2) + "\n";
}

FixedParams params_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed params: ") + e.what());
  }
  check_schema(j, "params/1", "params");
  FixedParams p;
  p.rho0 = j.at("rho0").get<double>();
  p.chi = j.at("chi").get<double>();
  p.epsilon = j.at("epsilon").get<double>();
  p.omega = j.at("omega").get<double>();
  p.kappa = j.at("kappa").get<double>();
  p.alpha_delta = j.at("alpha_delta").get<double>();
  p.beta_delta = j.at("beta_delta").get<double>();
  p.validate();
  return p;
}

FixedParams read_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open params file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return params_from_json(ss.str());
}

void write_params(const std::filesystem::path& path, const FixedParams& p) {
  save_text(path, params_to_json(p));
}

Manifest read_manifest(const std::filesystem::path& path) {
  json j = load_json(path, "manifest");
  check_schema(j, "manifest/1", "manifest");
  Manifest m;
  m.seed = j.value("seed", 0ull);
  m.params = params_from_json(j.at("params").dump());
  for (const auto& p : j.at("pairs")) {
    ManifestPair mp;
    mp.config_a = p.at("a").get<std::string>();
    mp.config_b = p.at("b").get<std::string>();
    mp.matching = p.value("matching", "");
    mp.subset = p.value("subset", "");
    mp.a_id = p.value("a_id", "");
    mp.b_id = p.value("b_id", "");
    mp.n_b = p.value("n_b", 0);
    m.pairs.push_back(std::move(mp));
  }
  return m;
}

void write_manifest(const std::filesystem::path& path, const Manifest& m) {
  json j;
  j["schema"] = "manifest/1";
  j["seed"] = m.seed;
  j["params"] = json::parse(params_to_json(m.params));
  json arr = json::array();
  for (const auto& p : m.pairs) {
    json e;
    e["a"] = p.config_a;
    e["b"] = p.config_b;
    if (!p.matching.empty()) e["matching"] = p.matching;
    e["subset"] = p.subset;
    e["a_id"] = p.a_id;
    e["b_id"] = p.b_id;
    e["n_b"] = p.n_b;
    arr.push_back(e);
  }
  j["pairs"] = arr;
  save_text(path, j.dump(2) + "\n");
}

}  // namespace fplr
