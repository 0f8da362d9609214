#include "symsys/harness/width_sweep.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "symsys/harness/parallel.hpp"
#include "symsys/harness/stats.hpp"
#include "symsys/harness/systems.hpp"
#include "symsys/mathcore/text.hpp"

namespace symsys {

nlohmann::json monotone_check(const WidthCurve& curve) {
  std::vector<double> y, w, se;
  std::vector<int> widths;
  for (const WidthPoint& p : curve.points) {
    if (p.cell.empty()) continue;
    widths.push_back(p.width);
    y.push_back(p.cell.acc_mean);
    se.push_back(p.cell.acc_se());
  }
  // Weights 1/se², with a floor so noiseless points do not dominate.
  const double floor = 1e-4;
  for (const double s : se) w.push_back(1.0 / std::max(s * s, floor * floor));
  const std::vector<double> fit = isotonic_increasing(y, w);
  bool ok = true;
  nlohmann::json residuals = nlohmann::json::array();
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = y[i] - fit[i];
    const bool within = std::abs(r) <= 2.0 * se[i];
    ok = ok && within;
    residuals.push_back({{"width", widths[i]}, {"residual", r}, {"se", se[i]}, {"ok", within}});
  }
  return {{"group", curve.group}, {"inference", curve.inference}, {"residuals", residuals}, {"monotone", ok}};
}

WidthSweepResult width_sweep(const nlohmann::json& config, ResultSink* sink) {
  const CommonConfig common = common_config(config);
  const nlohmann::json& ws = config.at("width_sweep");
  std::vector<int> widths = ws.at("widths").get<std::vector<int>>();
  std::sort(widths.begin(), widths.end());
  const std::vector<GroupTag> groups = parse_group_list(ws.at("groups"));
  const std::vector<std::string> inferences = string_list(ws.at("inferences"));
  const int quorum = ws.value("quorum", 4);
  WidthSweepResult out;
  out.model = ws.value("model", std::string("VEC"));
  for (const auto& inf : inferences) make_system(common, out.model, inf);

  auto dataset = [&common](int s) { return build_dataset(common.data, common.seed, static_cast<std::uint64_t>(s)); };
  std::vector<std::function<SeedResult()>> tasks;
  for (const GroupTag tag : groups)
    for (const auto& inf : inferences)
      for (const int width : widths)
        for (int s = 0; s < common.seeds; ++s)
          tasks.push_back([&, tag, inf, width, s] {
            const std::uint64_t run_seed = common.seed + static_cast<std::uint64_t>(s);
            const Dataset base = dataset(s);
            Rng rng(run_seed, kGroupStream);
            const Dataset ds = apply_group(sample_group(rng, tag, base.grid()), base);
            SystemSpec sys = make_system(common, out.model, inf);
            sys.network.width = width;
            SystemOutcome o = run_system(sys, ds, run_seed);
            SeedResult r{run_seed, o.accuracy, o.mse, o.success, "", 0.0};
            if (o.record) {
              r.digest = o.record->digest;
              if (sink) sink->write_record(*o.record);
            }
            return r;
          });
  // The kernel is invariant under both groups, so untransformed data suffices.
  for (int s = 0; s < common.seeds; ++s)
    tasks.push_back([&, s] {
      const SystemOutcome o = run_system(make_system(common, out.model, "NTK"), dataset(s), 0);
      return SeedResult{common.seed + static_cast<std::uint64_t>(s), o.accuracy, o.mse, true, "", o.jitter};
    });

  const std::vector<SeedResult> flat = run_tasks(tasks, common.threads);
  auto take = [&flat, n = static_cast<std::size_t>(common.seeds)](std::size_t& k) {
    std::vector<SeedResult> runs(flat.begin() + static_cast<std::ptrdiff_t>(k),
                                 flat.begin() + static_cast<std::ptrdiff_t>(k + n));
    k += n;
    return runs;
  };
  std::size_t k = 0;
  for (const GroupTag tag : groups)
    for (const auto& inf : inferences) {
      WidthCurve curve{std::string(to_string(tag)), inf, {}};
      for (const int width : widths)
        curve.points.push_back({width, aggregate_cell(curve.group, out.model + "_" + std::to_string(width), inf,
                                                      take(k), quorum)});
      out.curves.push_back(std::move(curve));
    }
  out.reference = aggregate_cell("ref", out.model + "_inf", "NTK", take(k), quorum);

  nlohmann::json curves = nlohmann::json::array();
  for (const WidthCurve& c : out.curves) {
    nlohmann::json j = monotone_check(c);
    // Gap to the infinite-width reference at the largest and smallest width.
    const auto& lo = c.points.front().cell;
    const auto& hi = c.points.back().cell;
    if (!lo.empty() && !hi.empty()) {
      j["gap_smallest"] = out.reference.acc_mean - lo.acc_mean;
      j["gap_largest"] = out.reference.acc_mean - hi.acc_mean;
      j["std_smallest"] = lo.acc_std;
    }
    curves.push_back(std::move(j));
  }
  out.summary = {{"model", out.model}, {"reference_acc", out.reference.acc_mean}, {"curves", curves}, {"quorum", quorum}};
  return out;
}

std::string width_sweep_csv(const WidthSweepResult& r) {
  std::ostringstream os;
  os << "group,inference,width,seed_count,acc_mean,acc_std\n";
  auto row = [&os](const std::string& g, const std::string& inf, const std::string& w, const CellResult& c) {
    os << g << ',' << inf << ',' << w << ',' << c.seed_count << ',';
    if (c.empty()) os << "nan,nan\n";
    else os << format_double(c.acc_mean) << ',' << format_double(c.acc_std) << '\n';
  };
  for (const WidthCurve& c : r.curves)
    for (const WidthPoint& p : c.points) row(c.group, c.inference, std::to_string(p.width), p.cell);
  row("ref", "NTK", "inf", r.reference);
  return os.str();
}

}  // namespace symsys
