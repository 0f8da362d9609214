#include "symsys/harness/learning_curve.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "symsys/harness/parallel.hpp"
#include "symsys/harness/stats.hpp"
#include "symsys/harness/systems.hpp"
#include "symsys/mathcore/text.hpp"

namespace symsys {

void from_json(const nlohmann::json& j, CurveSystem& s) {
  s.name = j.at("name");
  s.group = j.value("group", s.group);
  s.model = j.value("model", s.model);
  s.inference = j.value("inference", s.inference);
}

namespace {

nlohmann::json fit_json(const PowerLawFit& f) {
  nlohmann::json segs = nlohmann::json::array();
  for (const ScalingFit& s : f.segments) {
    nlohmann::json j = {{"exponent", s.exponent}, {"intercept", s.intercept}, {"residual", s.residual},
                        {"first", s.first},       {"count", s.count}};
    if (s.breakpoint) j["breakpoint"] = *s.breakpoint;
    segs.push_back(j);
  }
  return {{"segments", segs}, {"total_residual", f.total_residual}};
}

std::vector<PowerLawPoint> to_points(const std::vector<int>& sizes, const std::vector<double>& v) {
  std::vector<PowerLawPoint> pts;
  for (std::size_t i = 0; i < sizes.size(); ++i) pts.push_back({static_cast<double>(sizes[i]), v[i]});
  return pts;
}

}  // namespace

void to_json(nlohmann::json& j, const LearningCurve& c) {
  nlohmann::json pts = nlohmann::json::array();
  for (const CurvePoint& p : c.points)
    pts.push_back({{"m", p.m},
                   {"seed_count", p.acc.size()},
                   {"acc", p.acc},
                   {"mse", p.mse},
                   {"acc_mean", p.acc_mean},
                   {"acc_std", p.acc_std},
                   {"mse_mean", p.mse_mean},
                   {"mse_std", p.mse_std}});
  j = {{"system",
        {{"name", c.system.name}, {"group", c.system.group}, {"model", c.system.model}, {"inference", c.system.inference}}},
       {"points", pts}};
  if (c.one) j["one_segment"] = fit_json(*c.one);
  if (c.two) {
    j["two_segment"] = fit_json(*c.two);
    j["gain"] = c.gain;
    j["gain_std"] = c.gain_std;
    j["seed_gains"] = c.seed_gains;
    j["median_gain"] = c.median_gain;
  }
}

PowerLawOptions power_law_options(const nlohmann::json& lc) {
  PowerLawOptions o;
  const std::string split = lc.value("split", std::string("scan"));
  if (split == "scan") o.mode = SplitMode::Scan;
  else if (split == "fixed") o.mode = SplitMode::Fixed;
  else throw UsageError("learning_curve.split must be 'scan' or 'fixed'");
  o.fixed_split = lc.value("fixed_split", std::size_t{0});
  return o;
}

std::optional<double> dide_gain(const std::vector<int>& sizes, const std::vector<double>& mse,
                                const PowerLawOptions& options) {
  if (sizes.size() < 4) return std::nullopt;
  const auto pts = to_points(sizes, mse);
  return fit_power_law(pts, 2, options).exponent_gain();
}

void analyse_curve(LearningCurve& curve, const PowerLawOptions& options, int bootstrap, std::uint64_t seed) {
  std::vector<int> sizes;
  std::vector<double> means;
  for (const CurvePoint& p : curve.points) {
    if (p.mse.empty() || !(p.mse_mean > 0.0)) continue;
    sizes.push_back(p.m);
    means.push_back(p.mse_mean);
  }
  curve.one.reset();
  curve.two.reset();
  curve.seed_gains.clear();
  if (sizes.size() < 2) return;
  const auto pts = to_points(sizes, means);
  curve.one = fit_power_law(pts, 1, options);
  if (sizes.size() < 4) return;
  curve.two = fit_power_law(pts, 2, options);
  curve.gain = curve.two->exponent_gain();

  // Per-seed curves use seeds that succeeded at every size.
  std::vector<int> common_seeds = curve.points.front().seeds;
  for (const CurvePoint& p : curve.points) {
    std::vector<int> keep;
    std::set_intersection(common_seeds.begin(), common_seeds.end(), p.seeds.begin(), p.seeds.end(),
                          std::back_inserter(keep));
    common_seeds = keep;
  }
  std::vector<std::vector<double>> per_seed;  // [seed][size]
  for (const int s : common_seeds) {
    std::vector<double> v;
    std::vector<int> m;
    for (const CurvePoint& p : curve.points) {
      const auto it = std::find(p.seeds.begin(), p.seeds.end(), s);
      const double x = p.mse[static_cast<std::size_t>(it - p.seeds.begin())];
      if (!(x > 0.0)) break;
      v.push_back(x);
      m.push_back(p.m);
    }
    if (v.size() != curve.points.size()) continue;
    per_seed.push_back(v);
    if (const auto g = dide_gain(m, v, options)) curve.seed_gains.push_back(*g);
  }
  if (!curve.seed_gains.empty()) curve.median_gain = median(curve.seed_gains);

  if (per_seed.size() < 2 || bootstrap < 1) return;
  std::vector<int> all_sizes;
  for (const CurvePoint& p : curve.points) all_sizes.push_back(p.m);
  Rng rng(seed, 0xb007);
  std::vector<double> gains;
  const std::size_t n = per_seed.size();
  for (int b = 0; b < bootstrap; ++b) {
    std::vector<double> avg(all_sizes.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& row = per_seed[rng.below(n)];
      for (std::size_t j = 0; j < avg.size(); ++j) avg[j] += row[j] / static_cast<double>(n);
    }
    gains.push_back(*dide_gain(all_sizes, avg, options));
  }
  curve.gain_std = stddev(gains);
}

LearningCurve learning_curve(const nlohmann::json& config, const CurveSystem& system, ResultSink* sink) {
  const CommonConfig common = common_config(config);
  const nlohmann::json& lc = config.at("learning_curve");
  std::vector<int> sizes = lc.at("sizes").get<std::vector<int>>();
  std::sort(sizes.begin(), sizes.end());
  if (sizes.empty() || sizes.front() < 1) throw UsageError("learning_curve.sizes must be positive");
  const GroupTag tag = parse_group_tag(system.group);
  const SystemSpec sys = make_system(common, system.model, system.inference);

  DataSpec data = common.data;
  data.synthetic.m_train = std::max(data.synthetic.m_train, sizes.back());
  data.m_train = std::max(data.m_train, sizes.back());

  struct Out {
    double acc, mse;
    bool success;
  };
  std::vector<std::function<Out()>> tasks;
  for (int s = 0; s < common.seeds; ++s)
    for (const int m : sizes)
      tasks.push_back([&, s, m] {
        const std::uint64_t run_seed = common.seed + static_cast<std::uint64_t>(s);
        const Dataset full = build_dataset(data, common.seed, static_cast<std::uint64_t>(s));
        if (full.train.size() < m) throw UsageError("dataset has fewer training points than size " + std::to_string(m));
        Rng rng(run_seed, kGroupStream);
        const Dataset ds = apply_group(sample_group(rng, tag, full.grid()), full.head(m, full.test.size()));
        SystemOutcome o = run_system(sys, ds, run_seed);
        if (o.record && sink) sink->write_record(*o.record);
        return Out{o.accuracy, o.mse, o.success};
      });
  const std::vector<Out> flat = run_tasks(tasks, common.threads);

  LearningCurve curve;
  curve.system = system;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    CurvePoint p;
    p.m = sizes[i];
    for (int s = 0; s < common.seeds; ++s) {
      const Out& o = flat[static_cast<std::size_t>(s) * sizes.size() + i];
      if (!o.success) continue;
      p.acc.push_back(o.acc);
      p.mse.push_back(o.mse);
      p.seeds.push_back(s);
    }
    p.acc_mean = mean(p.acc);
    p.acc_std = stddev(p.acc);
    p.mse_mean = mean(p.mse);
    p.mse_std = stddev(p.mse);
    curve.points.push_back(std::move(p));
  }
  analyse_curve(curve, power_law_options(lc), lc.value("bootstrap", 200), common.seed);
  return curve;
}

std::vector<LearningCurve> dide_ablation(const nlohmann::json& config, ResultSink* sink) {
  std::vector<LearningCurve> out;
  for (const auto& j : config.at("learning_curve").at("systems"))
    out.push_back(learning_curve(config, j.get<CurveSystem>(), sink));
  return out;
}

nlohmann::json dide_summary(const std::vector<LearningCurve>& curves) {
  nlohmann::json systems = nlohmann::json::array();
  for (const LearningCurve& c : curves) {
    nlohmann::json j = {{"name", c.system.name}};
    if (c.one) j["exponent"] = c.one->segments.front().exponent;
    if (c.two) {
      j["gain"] = c.gain;
      j["gain_std"] = c.gain_std;
      j["median_gain"] = c.median_gain;
      j["seed_gains"] = c.seed_gains;
    }
    systems.push_back(j);
  }
  nlohmann::json out = {{"systems", systems}};
  if (!curves.empty() && curves.front().two && !curves.front().seed_gains.empty()) {
    const LearningCurve& base = curves.front();
    nlohmann::json cmp = nlohmann::json::array();
    bool all = true;
    for (std::size_t i = 1; i < curves.size(); ++i) {
      const bool ok = !curves[i].seed_gains.empty() && base.median_gain > curves[i].median_gain;
      all = all && ok;
      cmp.push_back({{"ablation", curves[i].system.name}, {"baseline_exceeds", ok}});
    }
    out["baseline"] = base.system.name;
    out["comparisons"] = cmp;
    out["baseline_exceeds_all"] = all;
  }
  out["reference_exponents"] = {
      {"values", {0.49, 0.38, 0.41}},
      {"note", "large-scale image-classification slopes, documentation only; not reproduced at desk scale"}};
  return out;
}

std::string learning_curve_csv(const LearningCurve& curve) {
  std::ostringstream os;
  os << "m,acc_mean,acc_std,mse_mean,mse_std,segment,alpha\n";
  const PowerLawFit* fit = curve.two ? &*curve.two : curve.one ? &*curve.one : nullptr;
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const CurvePoint& p = curve.points[i];
    os << p.m << ',';
    if (p.acc.empty()) {
      os << "nan,nan,nan,nan,";
    } else {
      os << format_double(p.acc_mean) << ',' << format_double(p.acc_std) << ',' << format_double(p.mse_mean) << ','
         << format_double(p.mse_std) << ',';
    }
    // The knot belongs to the first segment.
    std::size_t seg = 0;
    if (fit)
      while (seg + 1 < fit->segments.size() && i > fit->segments[seg].first + fit->segments[seg].count - 1) ++seg;
    if (fit) os << seg + 1 << ',' << format_double(fit->segments[seg].exponent) << '\n';
    else os << "0,nan\n";
  }
  return os.str();
}

}  // namespace symsys
