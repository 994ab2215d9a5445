#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"

#include "fplr/chib.hpp"
#include "fplr/estimation.hpp"
#include "fplr/evaluate.hpp"
#include "fplr/io.hpp"
#include "fplr/simulate.hpp"

namespace fs = std::filesystem;
using namespace fplr;

namespace {

int default_threads() {
  if (const char* env = std::getenv("FPLR_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

std::vector<TrainingPair> load_training_pairs(const Manifest& man,
                                              const fs::path& base) {
  std::vector<TrainingPair> corpus;
  for (const auto& p : man.pairs) {
    if (p.matching.empty())
      throw std::runtime_error("manifest pair (" + p.a_id + "," + p.b_id +
                               ") lacks a ground-truth matching");
    TrainingPair tp;
    tp.a = read_config(base / p.config_a);
    tp.b = read_config(base / p.config_b);
    tp.xi = attach_matching(read_matching(base / p.matching), tp.a, tp.b);
    corpus.push_back(std::move(tp));
  }
  return corpus;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Likelihood-ratio scoring of minutia configurations under a "
               "marked Poisson point process model"};
  app.require_subcommand(1);

  // ---- simulate ----
  auto* sim = app.add_subcommand("simulate", "Generate a synthetic dataset");
  int sim_n = 258;
  std::uint64_t sim_seed = 0;
  std::string sim_params, sim_out;
  bool sim_hd = false;
  sim->add_option("--n-pairs", sim_n, "Number of pairs")
      ->check(CLI::PositiveNumber);
  sim->add_option("--seed", sim_seed, "Master seed");
  sim->add_option("--params", sim_params, "Fixed-parameter JSON file");
  sim->add_option("--out", sim_out, "Output directory")->required();
  sim->add_flag("--hd", sim_hd,
                "Simulate independent (different-finger) pairs");

  // ---- fit ----
  auto* fit = app.add_subcommand("fit", "Estimate fixed parameters from a "
                                        "matching-augmented dataset");
  std::string fit_manifest, fit_out, fit_stage = "all";
  std::uint64_t fit_seed = 1;
  int fit_sem_iters = 3000;
  fit->add_option("--manifest", fit_manifest, "Dataset manifest")->required();
  fit->add_option("--out", fit_out, "Report JSON path")->required();
  fit->add_option("--stage", fit_stage, "all | chi | delta-rho | omega-kappa")
      ->check(CLI::IsMember({"all", "chi", "delta-rho", "omega-kappa"}));
  fit->add_option("--seed", fit_seed, "Seed for SEM draws and restarts");
  fit->add_option("--sem-max-iter", fit_sem_iters, "SEM iteration cap");

  // ---- compare ----
  auto* cmp = app.add_subcommand("compare", "Score one pair");
  std::string cmp_a, cmp_b, cmp_params, cmp_out, cmp_trace;
  std::uint64_t cmp_seed = 0;
  long cmp_burn = 5000, cmp_samples = 5000, cmp_nxi = 200;
  cmp->add_option("--a", cmp_a, "Fingerprint configuration")->required();
  cmp->add_option("--b", cmp_b, "Fingermark configuration")->required();
  cmp->add_option("--params", cmp_params, "Fixed-parameter JSON")->required();
  cmp->add_option("--seed", cmp_seed, "Seed");
  cmp->add_option("--burn", cmp_burn, "Burn-in sweeps")
      ->check(CLI::PositiveNumber);
  cmp->add_option("--samples", cmp_samples, "Samples per reduced run")
      ->check(CLI::PositiveNumber);
  cmp->add_option("--nxi", cmp_nxi, "Samples per xi-ordinate term")
      ->check(CLI::PositiveNumber);
  cmp->add_option("--out", cmp_out, "Result JSON path");
  cmp->add_option("--trace", cmp_trace, "Chain trace CSV path");

  // ---- batch ----
  auto* bat = app.add_subcommand("batch", "Score all n x n combinations of a "
                                          "dataset");
  std::string bat_manifest, bat_out;
  std::uint64_t bat_seed = 0;
  int bat_threads = default_threads();
  long bat_burn = 5000, bat_samples = 5000, bat_nxi = 200;
  double bat_width = 2.0;
  bat->add_option("--manifest", bat_manifest, "Dataset manifest")->required();
  bat->add_option("--out", bat_out, "Output directory")->required();
  bat->add_option("--threads", bat_threads, "Worker threads")
      ->check(CLI::PositiveNumber);
  bat->add_option("--seed", bat_seed, "Master seed");
  bat->add_option("--burn", bat_burn)->check(CLI::PositiveNumber);
  bat->add_option("--samples", bat_samples)->check(CLI::PositiveNumber);
  bat->add_option("--nxi", bat_nxi)->check(CLI::PositiveNumber);
  bat->add_option("--bin-width", bat_width, "Histogram bin width")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      SimConfig cfg;
      cfg.n_pairs = sim_n;
      cfg.seed = sim_seed;
      cfg.hypothesis_hp = !sim_hd;
      if (!sim_params.empty()) cfg.fixed = read_params(sim_params);
      Manifest man = make_dataset(cfg, sim_out);
      std::cout << "wrote " << man.pairs.size() << " pairs to " << sim_out
                << "\n";
    } else if (*fit) {
      fs::path mpath(fit_manifest);
      Manifest man = read_manifest(mpath);
      auto corpus = load_training_pairs(man, mpath.parent_path());
      SemConfig scfg;
      scfg.seed = fit_seed;
      scfg.max_iter = fit_sem_iters;
      std::ofstream out(fit_out);
      if (!out) throw std::runtime_error("cannot write " + fit_out);
      if (fit_stage == "chi") {
        double chi = fit_chi(corpus);
        out << "{\n  \"schema\": \"fit-report/1\",\n  \"chi\": " << chi
            << "\n}\n";
        std::cout << "chi = " << chi << "\n";
      } else if (fit_stage == "delta-rho") {
        DeltaRhoFit f = fit_delta_rho(corpus, fit_seed);
        out << "{\n  \"schema\": \"fit-report/1\",\n  \"alpha_delta\": "
            << f.alpha_delta << ",\n  \"beta_delta\": " << f.beta_delta
            << ",\n  \"rho0\": " << f.rho0 << "\n}\n";
        std::cout << "alpha_delta = " << f.alpha_delta
                  << ", beta_delta = " << f.beta_delta
                  << ", rho0 = " << f.rho0 << "\n";
      } else if (fit_stage == "omega-kappa") {
        FixedParams base = man.params;
        SemResult r = fit_omega_kappa(corpus, base, scfg);
        out << "{\n  \"schema\": \"fit-report/1\",\n  \"omega\": " << r.omega
            << ",\n  \"kappa\": " << r.kappa << "\n}\n";
        std::cout << "omega = " << r.omega << ", kappa = " << r.kappa << "\n";
      } else {
        FitReport rep = fit_all(corpus, man.params.epsilon, scfg, fit_seed);
        out << rep.to_json();
        std::cout << "rho0 = " << rep.fitted.rho0
                  << ", alpha_delta = " << rep.fitted.alpha_delta
                  << ", beta_delta = " << rep.fitted.beta_delta
                  << ", chi = " << rep.fitted.chi
                  << ", omega = " << rep.fitted.omega
                  << ", kappa = " << rep.fitted.kappa << "\n";
      }
    } else if (*cmp) {
      MinutiaConfig a = read_config(cmp_a);
      MinutiaConfig b = read_config(cmp_b);
      FixedParams params = read_params(cmp_params);
      ChibConfig cc;
      cc.seed = cmp_seed;
      cc.n_burn = cmp_burn;
      cc.n_samples = cmp_samples;
      cc.n_xi = cmp_nxi;
      LrResult r = log10_lr(a, b, params, cc);
      std::cout << "log10 LR = " << r.log10_lr << "  (mc se " << r.mc_se_log10
                << ")\n";
      if (!cmp_out.empty()) {
        std::ofstream out(cmp_out);
        if (!out) throw std::runtime_error("cannot write " + cmp_out);
        out << lr_result_to_json(r);
      }
      if (!cmp_trace.empty()) {
        // Diagnostic chain at the same seed, traced to CSV.
        std::ofstream tr(cmp_trace);
        if (!tr) throw std::runtime_error("cannot write " + cmp_trace);
        tr << GibbsSampler::trace_header() << "\n";
        GibbsSampler g(a, b, params);
        g.set_trace(&tr);
        Rng rng = Rng(cc.seed).substream("trace");
        for (long i = 0; i < cc.n_burn + cc.n_samples; ++i) g.sweep(rng);
      }
    } else if (*bat) {
      fs::path mpath(bat_manifest);
      Manifest man = read_manifest(mpath);
      BatchConfig bc;
      bc.chib.seed = bat_seed;
      bc.chib.n_burn = bat_burn;
      bc.chib.n_samples = bat_samples;
      bc.chib.n_xi = bat_nxi;
      bc.threads = bat_threads;
      bc.hist_width = bat_width;
      auto scores = run_batch(man, mpath.parent_path(), bc);

      fs::create_directories(bat_out);
      fs::path outdir(bat_out);
      write_scores_csv(outdir / "scores.csv", scores);
      auto subset_scores = [&](const std::string& subset) {
        std::vector<ScoreRecord> v;
        for (const auto& s : scores)
          if (subset == "full" || s.subset == subset) v.push_back(s);
        return v;
      };
      for (const std::string subset : {"full", "good", "bad", "ugly"}) {
        auto v = subset_scores(subset);
        if (v.empty()) continue;
        write_roc_csv(outdir / ("roc_" + subset + ".csv"), v);
        write_histogram_csv(outdir / ("hist_" + subset + ".csv"),
                            make_histogram(v, bc.hist_lo, bc.hist_hi,
                                           bc.hist_width));
      }
      long failures = 0;
      for (const auto& s : scores) failures += s.ok ? 0 : 1;
      std::cout << "scored " << scores.size() << " comparisons ("
                << failures << " failures), AUC = " << auc(scores) << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
