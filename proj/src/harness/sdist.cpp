#include "symsys/harness/sdist.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "symsys/harness/parallel.hpp"
#include "symsys/harness/stats.hpp"
#include "symsys/mathcore/text.hpp"
#include "symsys/networks/couple.hpp"

namespace symsys {

double s_dist(const RowMatrix& f1, const RowMatrix& f2) {
  if (f1.rows() != f2.rows() || f1.cols() != f2.cols())
    throw std::invalid_argument("s_dist: prediction shapes differ");
  if (f1.rows() == 0) throw std::invalid_argument("s_dist: empty test batch");
  return (f1 - f2).squaredNorm() / static_cast<double>(f1.rows());
}

RowMatrix mean_predictions(const std::vector<RowMatrix>& runs) {
  if (runs.empty()) throw std::invalid_argument("mean_predictions: no runs");
  RowMatrix m = runs.front();
  for (std::size_t i = 1; i < runs.size(); ++i) m += runs[i];
  return m / static_cast<double>(runs.size());
}

SdistEstimate s_dist_jackknife(const std::vector<RowMatrix>& a, const std::vector<int>& a_seeds,
                               const std::vector<RowMatrix>& b, const std::vector<int>& b_seeds) {
  SdistEstimate out;
  out.value = s_dist(mean_predictions(a), mean_predictions(b));
  std::set<int> ids;
  for (const int s : a_seeds)
    if (s >= 0) ids.insert(s);
  for (const int s : b_seeds)
    if (s >= 0) ids.insert(s);
  out.seeds = static_cast<int>(ids.size());
  auto without = [](const std::vector<RowMatrix>& v, const std::vector<int>& seeds, int drop) {
    std::vector<RowMatrix> keep;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (seeds[i] != drop) keep.push_back(v[i]);
    return keep;
  };
  std::vector<double> loo;
  for (const int s : ids) {
    const auto ra = without(a, a_seeds, s), rb = without(b, b_seeds, s);
    if (ra.empty() || rb.empty()) continue;
    loo.push_back(s_dist(mean_predictions(ra), mean_predictions(rb)));
  }
  if (loo.size() < 2) return out;
  const double n = static_cast<double>(loo.size());
  const double mu = mean(loo);
  double ss = 0.0;
  for (const double v : loo) ss += (v - mu) * (v - mu);
  out.se = std::sqrt((n - 1.0) / n * ss);
  return out;
}

namespace {

struct Run {
  RowMatrix predictions;
  double accuracy = 0.0;
  bool success = false;
};

}  // namespace

SdistResult sdist_path_sweep(const nlohmann::json& config, ResultSink* sink) {
  const CommonConfig common = common_config(config);
  const nlohmann::json& sd = config.at("sdist");
  const std::vector<int> widths = sd.at("widths").get<std::vector<int>>();
  const std::vector<double> ts = sd.at("t").get<std::vector<double>>();
  const double scale = sd.value("scale", 1.0);
  const std::string inference = sd.value("inference", std::string("NN+"));
  const int stride = sd.value("seed_stride", 1);
  for (const double t : ts)
    if (t < 0.0 || t > 1.0) throw UsageError("sdist.t values must lie in [0, 1]");

  // One dataset and one path shared by every learner: S-Dist needs a common test batch.
  const Dataset ds = build_dataset(common.data, common.seed, 0);
  const Rng path_rng(common.seed, kPathStream);
  std::vector<std::uint64_t> seeds;
  for (int s = 0; s < common.seeds; ++s) seeds.push_back(common.seed + static_cast<std::uint64_t>(s * stride));

  auto finite = [&](const std::string& model, int width, double t, std::uint64_t seed) {
    return [&, model, width, t, seed] {
      SystemSpec sys = make_system(common, model, inference);
      sys.network.width = width;
      const Dataset data = t > 0.0 ? apply_group(rotation_path(path_rng, ds.grid(), t, scale), ds) : ds;
      SystemOutcome o = run_system(sys, data, seed);
      if (o.record && sink) sink->write_record(*o.record);
      return Run{std::move(o.predictions), o.accuracy, o.success};
    };
  };
  std::vector<std::function<Run()>> tasks;
  for (const int n : widths) {
    for (const std::uint64_t s : seeds) tasks.push_back(finite("GAP", n, 0.0, s));
    for (const double t : ts)
      for (const std::uint64_t s : seeds) tasks.push_back(finite("VEC", n, t, s));
  }
  tasks.push_back([&] {
    SystemOutcome o = run_system(make_system(common, "VEC", "NTK"), ds, 0);
    return Run{std::move(o.predictions), o.accuracy, true};
  });
  const std::vector<Run> flat = run_tasks(tasks, common.threads);
  const Run& ref = flat.back();

  auto collect = [&](std::size_t first, std::vector<RowMatrix>& preds, std::vector<int>& ids,
                     std::vector<double>& acc) {
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      const Run& r = flat[first + i];
      if (!r.success) continue;
      preds.push_back(r.predictions);
      ids.push_back(static_cast<int>(i));
      acc.push_back(r.accuracy);
    }
  };
  SdistResult out;
  std::size_t k = 0;
  for (const int n : widths) {
    std::vector<RowMatrix> gap;
    std::vector<int> gap_ids;
    std::vector<double> unused;
    collect(k, gap, gap_ids, unused);
    k += seeds.size();
    for (const double t : ts) {
      std::vector<RowMatrix> vec;
      std::vector<int> vec_ids;
      std::vector<double> acc;
      collect(k, vec, vec_ids, acc);
      k += seeds.size();
      SdistRow row;
      row.width = n;
      row.t = t;
      row.seed_count = static_cast<int>(vec.size());
      row.acc = mean(acc);
      if (!vec.empty() && !gap.empty()) row.gap = s_dist_jackknife(vec, vec_ids, gap, gap_ids);
      if (!vec.empty()) row.vecinf = s_dist_jackknife(vec, vec_ids, {ref.predictions}, {-1});
      if (vec.empty() || gap.empty()) {
        row.gap.value = std::nan("");
        if (vec.empty()) row.vecinf.value = std::nan("");
      }
      out.rows.push_back(row);
    }
  }
  out.summary = sdist_trend_summary(out.rows);
  out.summary["vecinf_acc"] = ref.accuracy;
  return out;
}

nlohmann::json sdist_trend_summary(const std::vector<SdistRow>& rows) {
  std::vector<int> widths;
  for (const SdistRow& r : rows)
    if (std::find(widths.begin(), widths.end(), r.width) == widths.end()) widths.push_back(r.width);
  nlohmann::json per_width = nlohmann::json::array();
  bool all = true;
  for (const int n : widths) {
    std::vector<const SdistRow*> path;
    for (const SdistRow& r : rows)
      if (r.width == n && std::isfinite(r.gap.value) && std::isfinite(r.vecinf.value)) path.push_back(&r);
    bool gap_ok = true, vecinf_ok = true;
    nlohmann::json steps = nlohmann::json::array();
    for (std::size_t i = 1; i < path.size(); ++i) {
      const SdistRow &a = *path[i - 1], &b = *path[i];
      // Nondecreasing: -gap is nonincreasing.
      const bool g = within_noise_below(-a.gap.value, a.gap.se, -b.gap.value, b.gap.se);
      const bool v = within_noise_below(a.vecinf.value, a.vecinf.se, b.vecinf.value, b.vecinf.se);
      gap_ok = gap_ok && g;
      vecinf_ok = vecinf_ok && v;
      steps.push_back({{"t", {a.t, b.t}},
                       {"gap", {a.gap.value, b.gap.value}},
                       {"gap_se", {a.gap.se, b.gap.se}},
                       {"gap_ok", g},
                       {"vecinf", {a.vecinf.value, b.vecinf.value}},
                       {"vecinf_se", {a.vecinf.se, b.vecinf.se}},
                       {"vecinf_ok", v}});
    }
    all = all && gap_ok && vecinf_ok;
    per_width.push_back({{"width", n},
                         {"steps", steps},
                         {"gap_nondecreasing", gap_ok},
                         {"vecinf_nonincreasing", vecinf_ok}});
  }
  return {{"widths", per_width}, {"all_pass", all}};
}

double licensed_copy_sdist(const SystemSpec& system, const Dataset& ds, const GroupElement& g,
                           const std::vector<std::uint64_t>& seeds) {
  const Dataset moved = apply_group(g, ds);
  if (is_kernel_inference(system.inference))
    return s_dist(run_system(system, ds, 0).predictions, run_system(system, moved, 0).predictions);
  std::vector<RowMatrix> a, b;
  for (const std::uint64_t seed : seeds) {
    Rng init(seed, kInitStream);
    const ParamSet p0 = init_params(init, system.network);
    TrainConfig cfg = system.train;
    cfg.seed = seed;
    const TrainResult ra = train(system.network, p0, ds, cfg);
    a.push_back(predict(system.network, ra.params, ds.test.x));
    // Same η for both copies; an estimate on the moved batch differs in rounding.
    cfg.eta0 = ra.record.eta / cfg.lr_multiplier;
    const TrainResult rb = train(system.network, couple_params(system.network, p0, g), moved, cfg);
    b.push_back(predict(system.network, rb.params, moved.test.x));
  }
  return s_dist(mean_predictions(a), mean_predictions(b));
}

std::string sdist_csv(const std::vector<SdistRow>& rows) {
  std::ostringstream os;
  os << "width,t,acc,sdist_gap,sdist_vecinf\n";
  for (const SdistRow& r : rows)
    os << r.width << ',' << format_double(r.t) << ',' << format_double(r.acc) << ',' << format_double(r.gap.value)
       << ',' << format_double(r.vecinf.value) << '\n';
  return os.str();
}

}  // namespace symsys
