#include "fplr/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

namespace fplr {

double auc(const std::vector<ScoreRecord>& scores) {
  // Mann-Whitney statistic via ranks with midpoint ties.
  struct Item {
    double s;
    bool is_true;
  };
  std::vector<Item> v;
  long nt = 0, nf = 0;
  for (const auto& r : scores) {
    if (!r.ok) continue;
    v.push_back({r.log10_lr, r.true_pair});
    (r.true_pair ? nt : nf) += 1;
  }
  if (nt == 0 || nf == 0)
    throw std::invalid_argument("auc: need both true and false scores");
  std::sort(v.begin(), v.end(),
            [](const Item& a, const Item& b) { return a.s < b.s; });
  double rank_sum_true = 0.0;
  size_t i = 0;
  double rank = 1.0;
  while (i < v.size()) {
    size_t j = i;
    while (j < v.size() && v[j].s == v[i].s) ++j;
    double mid_rank = rank + (j - i - 1) * 0.5;
    for (size_t k = i; k < j; ++k)
      if (v[k].is_true) rank_sum_true += mid_rank;
    rank += static_cast<double>(j - i);
    i = j;
  }
  double u = rank_sum_true - nt * (nt + 1.0) / 2.0;
  return u / (static_cast<double>(nt) * nf);
}

std::vector<std::pair<double, double>> roc_points(
    const std::vector<ScoreRecord>& scores) {
  struct Item {
    double s;
    bool is_true;
  };
  std::vector<Item> v;
  long nt = 0, nf = 0;
  for (const auto& r : scores) {
    if (!r.ok) continue;
    v.push_back({r.log10_lr, r.true_pair});
    (r.true_pair ? nt : nf) += 1;
  }
  std::sort(v.begin(), v.end(),
            [](const Item& a, const Item& b) { return a.s > b.s; });
  std::vector<std::pair<double, double>> pts;
  pts.emplace_back(0.0, 0.0);
  long ct = 0, cf = 0;
  size_t i = 0;
  while (i < v.size()) {
    size_t j = i;
    while (j < v.size() && v[j].s == v[i].s) ++j;
    for (size_t k = i; k < j; ++k) (v[k].is_true ? ct : cf) += 1;
    pts.emplace_back(nf ? static_cast<double>(cf) / nf : 0.0,
                     nt ? static_cast<double>(ct) / nt : 0.0);
    i = j;
  }
  return pts;
}

Histogram make_histogram(const std::vector<ScoreRecord>& scores, double lo,
                         double hi, double width) {
  if (!(width > 0.0) || !(hi > lo))
    throw std::invalid_argument("make_histogram: bad bin parameters");
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  h.width = width;
  int nbins = static_cast<int>(std::ceil((hi - lo) / width));
  h.true_counts.assign(nbins, 0);
  h.false_counts.assign(nbins, 0);
  for (const auto& r : scores) {
    if (!r.ok) continue;
    int bin = static_cast<int>(std::floor((r.log10_lr - lo) / width));
    bin = std::max(0, std::min(nbins - 1, bin));
    (r.true_pair ? h.true_counts : h.false_counts)[bin] += 1;
  }
  return h;
}

void write_scores_csv(const std::filesystem::path& path,
                      const std::vector<ScoreRecord>& scores) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "a_id,b_id,subset,true_pair,ok,log10_lr,mc_se,error\n";
  out.precision(12);
  for (const auto& r : scores) {
    out << r.a_id << ',' << r.b_id << ',' << r.subset << ','
        << (r.true_pair ? 1 : 0) << ',' << (r.ok ? 1 : 0) << ',' << r.log10_lr
        << ',' << r.mc_se << ',' << r.error << '\n';
  }
}

void write_roc_csv(const std::filesystem::path& path,
                   const std::vector<ScoreRecord>& scores) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "fpr,tpr\n";
  out.precision(12);
  for (auto [fpr, tpr] : roc_points(scores))
    out << fpr << ',' << tpr << '\n';
}

void write_histogram_csv(const std::filesystem::path& path,
                         const Histogram& h) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "bin_lo,bin_hi,true_count,false_count\n";
  out.precision(12);
  for (size_t i = 0; i < h.true_counts.size(); ++i) {
    out << h.lo + i * h.width << ',' << h.lo + (i + 1) * h.width << ','
        << h.true_counts[i] << ',' << h.false_counts[i] << '\n';
  }
}

std::uint64_t pair_seed(std::uint64_t master, const std::string& a_id,
                        const std::string& b_id) {
  std::uint64_t h = master ^ 0x51f15eedbadc0ffeull;
  h = splitmix64(h);
  h ^= fnv1a64(a_id);
  h = splitmix64(h);
  h ^= fnv1a64(b_id);
  return splitmix64(h);
}

std::vector<ScoreRecord> run_batch(const Manifest& manifest,
                                   const std::filesystem::path& base_dir,
                                   const BatchConfig& cfg) {
  const int n = static_cast<int>(manifest.pairs.size());
  std::vector<MinutiaConfig> as(n), bs(n);
  for (int i = 0; i < n; ++i) {
    as[i] = read_config(base_dir / manifest.pairs[i].config_a);
    bs[i] = read_config(base_dir / manifest.pairs[i].config_b);
  }

  struct Task {
    int i, j;
  };
  std::vector<Task> tasks;
  tasks.reserve(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) tasks.push_back({i, j});

  std::vector<ScoreRecord> out(tasks.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      size_t t = next.fetch_add(1);
      if (t >= tasks.size()) return;
      auto [i, j] = tasks[t];
      ScoreRecord& r = out[t];
      r.a_id = as[i].id();
      r.b_id = bs[j].id();
      r.subset = manifest.pairs[j].subset;
      r.true_pair = (i == j);
      ChibConfig cc = cfg.chib;
      cc.seed = pair_seed(cfg.chib.seed, r.a_id, r.b_id);
      try {
        LrResult lr = log10_lr(as[i], bs[j], manifest.params, cc);
        r.log10_lr = lr.log10_lr;
        r.mc_se = lr.mc_se_log10;
        r.ok = true;
      } catch (const std::exception& e) {
        r.ok = false;
        r.error = e.what();
      }
    }
  };
  int nthreads = std::max(1, cfg.threads);
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (int k = 0; k < nthreads; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace fplr
