#include "symsys/harness/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "symsys/harness/parallel.hpp"
#include "symsys/harness/stats.hpp"
#include "symsys/harness/systems.hpp"
#include "symsys/mathcore/text.hpp"

namespace symsys {

void to_json(nlohmann::json& j, const SeedResult& s) {
  j = {{"seed", s.seed}, {"accuracy", s.accuracy}, {"mse", s.mse}, {"success", s.success}};
  if (!s.digest.empty()) j["digest"] = s.digest;
  else j["jitter"] = s.jitter;
}

double CellResult::acc_se() const { return seed_count < 2 ? 0.0 : acc_std / std::sqrt(static_cast<double>(seed_count)); }

void to_json(nlohmann::json& j, const CellResult& c) {
  j = {{"group", c.group},
       {"model", c.model},
       {"inference", c.inference},
       {"seed_count", c.seed_count},
       {"runs", c.runs},
       {"below_quorum", c.below_quorum}};
  if (c.empty()) {
    j["flag"] = "no successful runs";
  } else {
    j["acc_mean"] = c.acc_mean;
    j["acc_std"] = c.acc_std;
  }
}

CellResult aggregate_cell(std::string group, std::string model, std::string inference, std::vector<SeedResult> runs,
                          int quorum) {
  CellResult c{std::move(group), std::move(model), std::move(inference), std::move(runs)};
  std::vector<double> acc;
  for (const SeedResult& r : c.runs)
    if (r.success) acc.push_back(r.accuracy);
  c.seed_count = static_cast<int>(acc.size());
  c.acc_mean = mean(acc);
  c.acc_std = stddev(acc);
  c.below_quorum = c.seed_count < std::min<int>(quorum, static_cast<int>(c.runs.size()));
  return c;
}

SweepResult run_sweep(const nlohmann::json& config, ResultSink* sink) {
  const CommonConfig common = common_config(config);
  const nlohmann::json& sw = config.at("sweep");
  const std::vector<GroupTag> groups = parse_group_list(sw.at("groups"));
  const std::vector<std::string> models = string_list(sw.at("models"));
  const std::vector<std::string> inferences = string_list(sw.at("inferences"));
  const int quorum = sw.value("quorum", 4);

  // Validate every system before any work starts.
  for (const auto& m : models)
    for (const auto& inf : inferences) make_system(common, m, inf);

  std::vector<std::function<SeedResult()>> tasks;
  for (const GroupTag tag : groups)
    for (const auto& model : models)
      for (const auto& inf : inferences)
        for (int s = 0; s < common.seeds; ++s)
          tasks.push_back([&common, tag, model, inf, s, sink] {
            const std::uint64_t run_seed = common.seed + static_cast<std::uint64_t>(s);
            const Dataset base = build_dataset(common.data, common.seed, static_cast<std::uint64_t>(s));
            Rng rng(run_seed, kGroupStream);
            const Dataset ds = apply_group(sample_group(rng, tag, base.grid()), base);
            SystemOutcome o = run_system(make_system(common, model, inf), ds, run_seed);
            SeedResult r{run_seed, o.accuracy, o.mse, o.success, "", o.jitter};
            if (o.record) {
              r.digest = o.record->digest;
              if (sink) sink->write_record(*o.record);
            }
            return r;
          });

  std::vector<SeedResult> flat = run_tasks(tasks, common.threads);
  SweepResult out;
  std::size_t k = 0;
  for (const GroupTag tag : groups)
    for (const auto& model : models)
      for (const auto& inf : inferences) {
        std::vector<SeedResult> runs(flat.begin() + static_cast<std::ptrdiff_t>(k),
                                     flat.begin() + static_cast<std::ptrdiff_t>(k + static_cast<std::size_t>(common.seeds)));
        k += static_cast<std::size_t>(common.seeds);
        out.cells.push_back(aggregate_cell(std::string(to_string(tag)), model, inf, std::move(runs), quorum));
      }
  out.summary = degradation_summary(out.cells);
  out.summary["quorum"] = quorum;
  out.summary["below_quorum"] = nlohmann::json::array();
  for (const CellResult& c : out.cells)
    if (c.below_quorum) out.summary["below_quorum"].push_back({c.group, c.model, c.inference, c.seed_count});
  out.summary["notes"] = {
      {"P3d", "data transformation only: no finite-width model with Gaussian init is licensed for P(3d)"}};
  return out;
}

nlohmann::json degradation_summary(const std::vector<CellResult>& cells) {
  const std::vector<std::string> chain = {"I", "O3xI", "O3^d", "P3d", "O3d"};
  std::vector<std::pair<std::string, std::string>> systems;
  for (const CellResult& c : cells) {
    const std::pair<std::string, std::string> key{c.model, c.inference};
    if (std::find(systems.begin(), systems.end(), key) == systems.end()) systems.push_back(key);
  }
  nlohmann::json rows = nlohmann::json::array();
  bool all = true;
  for (const auto& [model, inf] : systems) {
    std::vector<const CellResult*> path;
    for (const auto& g : chain)
      for (const CellResult& c : cells)
        if (c.model == model && c.inference == inf && c.group == g && !c.empty()) path.push_back(&c);
    nlohmann::json steps = nlohmann::json::array();
    bool ok = true;
    for (std::size_t i = 1; i < path.size(); ++i) {
      const CellResult &a = *path[i - 1], &b = *path[i];
      const bool step_ok = within_noise_below(a.acc_mean, a.acc_se(), b.acc_mean, b.acc_se());
      ok = ok && step_ok;
      steps.push_back({{"from", a.group}, {"to", b.group}, {"drop", a.acc_mean - b.acc_mean}, {"ok", step_ok}});
    }
    all = all && ok;
    rows.push_back({{"model", model}, {"inference", inf}, {"steps", steps}, {"nonincreasing", ok}});
  }
  return {{"chain", chain}, {"systems", rows}, {"all_nonincreasing", all}};
}

std::string sweep_csv(const std::vector<CellResult>& cells) {
  std::ostringstream os;
  os << "group,model,inference,seed_count,acc_mean,acc_std\n";
  for (const CellResult& c : cells) {
    os << c.group << ',' << c.model << ',' << c.inference << ',' << c.seed_count << ',';
    if (c.empty()) os << "nan,nan\n";
    else os << format_double(c.acc_mean) << ',' << format_double(c.acc_std) << '\n';
  }
  return os.str();
}

}  // namespace symsys
