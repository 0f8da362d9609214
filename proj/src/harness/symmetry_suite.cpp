#include "symsys/harness/symmetry_suite.hpp"

#include <algorithm>
#include <functional>

#include "symsys/harness/parallel.hpp"
#include "symsys/harness/systems.hpp"
#include "symsys/kernels/invariance.hpp"
#include "symsys/training/learning_rate.hpp"

namespace symsys {

void to_json(nlohmann::json& j, const SuiteEntry& e) {
  j = {{"model", e.model},         {"width", e.width},         {"group", e.group},
       {"check", e.check},         {"licensed", e.licensed},   {"deviation", e.deviation},
       {"threshold", e.threshold}, {"pass", e.pass}};
}

bool SuiteReport::all_pass() const {
  return std::all_of(entries.begin(), entries.end(), [](const SuiteEntry& e) { return e.pass; });
}

void to_json(nlohmann::json& j, const SuiteReport& r) {
  const auto passed = std::count_if(r.entries.begin(), r.entries.end(), [](const SuiteEntry& e) { return e.pass; });
  j = {{"entries", r.entries},
       {"passed", passed},
       {"total", r.entries.size()},
       {"all_pass", r.all_pass()}};
}

CoupledRun coupled_trajectory(const NetworkSpec& spec, const Dataset& ds, const GroupElement& g, TrainConfig cfg,
                              std::uint64_t seed, bool couple, InitDist dist) {
  cfg.seed = seed;
  if (cfg.eta0 <= 0.0) {
    // One η for both runs; an estimate on the transformed batch would differ in rounding.
    Rng lr_rng(seed, 0x1e7a);
    BatchSchedule peek(seed, static_cast<int>(ds.train.size()), cfg.batch_size);
    cfg.eta0 = estimate_lr(spec, lr_rng, ds.train.x.rows(peek.batch(0)), cfg.lr_samples, dist).eta0;
  }
  Rng init(seed, kInitStream);
  const ParamSet params0 = init_params(init, spec, dist);
  const ParamSet params_tau = couple ? couple_params(spec, params0, g, dist) : params0;
  const Dataset ds_tau = apply_group(g, ds);

  std::vector<RowMatrix> reference;
  train(spec, params0, ds, cfg,
        [&](int, const ParamSet& p) { reference.push_back(predict(spec, p, ds.test.x)); });
  CoupledRun out;
  out.eta = cfg.lr_multiplier * cfg.eta0;
  std::size_t i = 0;
  train(spec, params_tau, ds_tau, cfg, [&](int, const ParamSet& p) {
    const RowMatrix f = predict(spec, p, ds_tau.test.x);
    if (i < reference.size())
      out.max_deviation = std::max(out.max_deviation, (f - reference[i]).cwiseAbs().maxCoeff());
    ++i;
  });
  out.checkpoints = static_cast<int>(std::min(i, reference.size()));
  return out;
}

double prediction_deviation(const NetworkSpec& spec, KernelFlavor flavor, const Dataset& ds, const GroupElement& g,
                            const GramOptions& gram) {
  const RowMatrix p = kernel_regression(spec, flavor, ds, gram).predictions;
  const RowMatrix q = kernel_regression(spec, flavor, apply_group(g, ds), gram).predictions;
  return (q - p).cwiseAbs().maxCoeff() / std::max(p.cwiseAbs().maxCoeff(), 1e-300);
}

SuiteReport verify_symmetry_suite(const nlohmann::json& config) {
  const CommonConfig common = common_config(config);
  const nlohmann::json suite = config.at("suite");
  const nlohmann::json th = suite.at("thresholds");
  const double t_finite = th.at("finite"), t_kernel = th.at("kernel"), t_pred = th.at("prediction");
  const double t_wfinite = th.at("witness_finite"), t_wkernel = th.at("witness_kernel");

  DataSpec data = common.data;
  data.synthetic.m_train = suite.at("m_train");
  data.synthetic.m_test = suite.at("m_test");
  data.m_train = data.synthetic.m_train;
  data.m_test = data.synthetic.m_test;
  const Dataset ds = build_dataset(data, common.seed, 0);
  const int n_kernel = suite.at("kernel_inputs");
  const Dataset ds_kernel = ds.head(std::min<Eigen::Index>(n_kernel, ds.train.size()),
                                    std::min<Eigen::Index>(n_kernel, ds.test.size()));
  const SpatialGrid grid = ds.grid();
  const InitDist dist = parse_init_dist(config.value("single", nlohmann::json::object()).value("dist", "gaussian"));

  auto group_for = [&](GroupTag tag) {
    Rng rng(common.seed, kGroupStream);
    return sample_group(rng, tag, grid);
  };

  // Each task fills its own entries; the report is assembled after the barrier.
  std::vector<std::function<std::vector<SuiteEntry>()>> tasks;
  for (const auto& t : suite.at("trainings")) {
    TrainConfig cfg = common.train;
    cfg.lr_multiplier = t.at("lr_multiplier");
    cfg.l2 = t.at("l2");
    cfg.max_steps = suite.at("steps");
    cfg.eval_interval = suite.at("eval_interval");
    cfg.early_stop_acc = 2.0;  // always run the full step budget
    cfg.batch_size = std::min<int>(cfg.batch_size, static_cast<int>(ds.train.size()));
    const std::string check = "coupled:" + t.at("name").get<std::string>();
    auto add = [&](const nlohmann::json& pair, bool licensed) {
      const std::string model = pair.at(0), group = pair.at(1);
      tasks.push_back([=, &ds, &common] {
        NetworkSpec spec = make_system(common, model, "NN").network;
        spec.width = suite.at("width");
        const GroupTag tag = parse_group_tag(group);
        const CoupledRun r = coupled_trajectory(spec, ds, group_for(tag), cfg, common.seed, licensed, dist);
        SuiteEntry e{spec.name(), "n", std::string(to_string(tag)), check, licensed, r.max_deviation,
                     licensed ? t_finite : t_wfinite, false};
        e.pass = licensed ? e.deviation <= e.threshold : e.deviation >= e.threshold;
        return std::vector<SuiteEntry>{e};
      });
    };
    for (const auto& p : suite.at("finite_pairs")) add(p, true);
    for (const auto& p : suite.at("finite_witnesses")) add(p, false);
  }

  for (const auto& m : suite.at("kernel_models")) {
    const std::string model = m;
    tasks.push_back([=, &ds_kernel, &common] {
      const NetworkSpec spec = make_system(common, model, "NTK").network;
      std::vector<SuiteEntry> out;
      for (const KernelFlavor flavor : {KernelFlavor::NNGP, KernelFlavor::NTK}) {
        Rng rng(common.seed, kGroupStream);
        const InvarianceReport r = kernel_invariance_check(spec, rng, ds_kernel.train.x, flavor, common.gram);
        const std::string f(to_string(flavor));
        SuiteEntry e{spec.name(), "inf", std::string(to_string(r.matched)), "kernel:" + f, true,
                     r.matched_deviation, t_kernel, r.matched_deviation <= t_kernel};
        out.push_back(e);
        if (r.mismatched) {
          out.push_back({spec.name(), "inf", std::string(to_string(*r.mismatched)), "kernel:" + f, false,
                         *r.mismatched_deviation, t_wkernel, *r.mismatched_deviation >= t_wkernel});
        }
        const double pd = prediction_deviation(spec, flavor, ds_kernel, group_for(r.matched), common.gram);
        out.push_back({spec.name(), "inf", std::string(to_string(r.matched)), "prediction:" + f, true, pd, t_pred,
                       pd <= t_pred});
      }
      return out;
    });
  }

  SuiteReport report;
  for (auto& r : run_tasks(tasks, common.threads)) report.entries.insert(report.entries.end(), r.begin(), r.end());
  return report;
}

}  // namespace symsys
