#ifndef FPLR_EVALUATE_HPP
#define FPLR_EVALUATE_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "fplr/chib.hpp"
#include "fplr/io.hpp"

namespace fplr {

struct ScoreRecord {
  std::string a_id;
  std::string b_id;
  std::string subset;  // quality subset of the fingermark B
  bool true_pair = false;
  bool ok = false;
  double log10_lr = 0.0;
  double mc_se = 0.0;
  std::string error;
};

/// Mann-Whitney AUC of true-pair scores against false-pair scores
/// (ties count 1/2); records with ok=false are skipped.
double auc(const std::vector<ScoreRecord>& scores);

/// ROC points (false positive rate, true positive rate), from (0,0) to
/// (1,1), monotone non-decreasing in both coordinates.
std::vector<std::pair<double, double>> roc_points(
    const std::vector<ScoreRecord>& scores);

struct Histogram {
  double lo = -63.0;
  double hi = 103.0;
  double width = 2.0;
  std::vector<long> true_counts;   // one per bin, plus under/overflow folded
  std::vector<long> false_counts;  // into the edge bins
};

Histogram make_histogram(const std::vector<ScoreRecord>& scores,
                         double lo = -63.0, double hi = 103.0,
                         double width = 2.0);

void write_scores_csv(const std::filesystem::path& path,
                      const std::vector<ScoreRecord>& scores);
void write_roc_csv(const std::filesystem::path& path,
                   const std::vector<ScoreRecord>& scores);
void write_histogram_csv(const std::filesystem::path& path,
                         const Histogram& h);

struct BatchConfig {
  ChibConfig chib;
  int threads = 1;
  double hist_lo = -63.0;
  double hist_hi = 103.0;
  double hist_width = 2.0;
};

/// Scores every fingerprint x fingermark combination of the manifest
/// (n x n for n pairs) on a worker pool.  Per-comparison seeds are derived
/// from (master seed, a_id, b_id), so results are independent of the
/// thread count.  Failures are recorded per pair and the batch continues.
std::vector<ScoreRecord> run_batch(const Manifest& manifest,
                                   const std::filesystem::path& base_dir,
                                   const BatchConfig& cfg);

/// Seed for one comparison, mixing the master seed with both ids.
std::uint64_t pair_seed(std::uint64_t master, const std::string& a_id,
                        const std::string& b_id);

}  // namespace fplr

#endif
