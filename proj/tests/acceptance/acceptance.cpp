// Acceptance checks C1..C11. Prints one PASS/FAIL line per criterion with the
// measured values; the exit status is nonzero when any requested check fails.
//
//   acceptance            all criteria
//   acceptance C3 C8      a subset

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "symsys/data/sources.hpp"
#include "symsys/harness/cli.hpp"
#include "symsys/harness/config.hpp"
#include "symsys/harness/learning_curve.hpp"
#include "symsys/harness/sdist.hpp"
#include "symsys/harness/stats.hpp"
#include "symsys/harness/sweep.hpp"
#include "symsys/harness/symmetry_suite.hpp"
#include "symsys/harness/systems.hpp"
#include "symsys/kernels/dual.hpp"
#include "symsys/kernels/invariance.hpp"
#include "symsys/networks/embed.hpp"

using namespace symsys;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string sci(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << std::scientific << v;
  return os.str();
}

std::string fixed(double v, int digits = 3) {
  std::ostringstream os;
  os << std::setprecision(digits) << std::fixed << v;
  return os.str();
}

struct Verdict {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    notes.push_back(std::string(ok ? "" : "!") + what);
  }
};

/// Records a runtime limit as one more requirement.
void within_budget(Verdict& v, Clock::time_point t0, double limit) {
  const double s = seconds_since(t0);
  v.require(s <= limit, "runtime " + fixed(s, 1) + "s <= " + fixed(limit, 0) + "s");
}

Dataset synthetic(std::uint64_t seed, int m_train, int m_test, SpatialGrid grid = {8, 8, 3}) {
  SyntheticConfig cfg;
  cfg.grid = grid;
  cfg.m_train = m_train;
  cfg.m_test = m_test;
  return gen_synthetic(seed, cfg);
}

NetworkSpec network_for(const CommonConfig& common, const std::string& model, const Dataset& ds) {
  NetworkSpec s = with_model_name(common.network, model);
  s.grid = ds.grid();
  s.outputs = ds.classes();
  s.validate();
  return s;
}

// C1: coupled SGD trajectories for every licensed finite-width pair.
Verdict c1() {
  Verdict v;
  const json base = preset_config("theorem2-desk");
  const double threshold = base.at("suite").at("thresholds").at("finite");
  for (const auto& pair : base.at("suite").at("finite_pairs")) {
    json cfg = base;
    cfg["suite"]["finite_pairs"] = json::array({pair});
    cfg["suite"]["finite_witnesses"] = json::array();
    cfg["suite"]["kernel_models"] = json::array();
    const auto t0 = Clock::now();
    const SuiteReport r = verify_symmetry_suite(cfg);
    double worst = 0.0;
    for (const SuiteEntry& e : r.entries) worst = std::max(worst, e.deviation);
    const double s = seconds_since(t0);
    const std::string name = pair.at(0).get<std::string>() + "/" + pair.at(1).get<std::string>();
    v.require(r.entries.size() == 2 && worst <= threshold,
              name + " NN,NN+ max dev " + sci(worst) + " <= " + sci(threshold));
    v.require(s <= 120.0, name + " " + fixed(s, 1) + "s <= 120s");
  }
  return v;
}

// C2: infinite-width Gram invariance and symmetry-breaking witnesses.
Verdict c2() {
  Verdict v;
  const auto t0 = Clock::now();
  const CommonConfig common = common_config(preset_config("default"));
  const Dataset ds = synthetic(0, 32, 8);
  for (const char* model : {"FCN", "VEC", "GAP"}) {
    const NetworkSpec spec = network_for(common, model, ds);
    for (const KernelFlavor flavor : {KernelFlavor::NNGP, KernelFlavor::NTK}) {
      Rng rng(0, kGroupStream);
      const InvarianceReport r = kernel_invariance_check(spec, rng, ds.train.x, flavor);
      const std::string tag = std::string(model) + " " + std::string(to_string(flavor));
      v.require(r.matched_deviation <= 1e-10,
                tag + " " + std::string(to_string(r.matched)) + " " + sci(r.matched_deviation) + " <= 1e-10");
      if (r.mismatched)
        v.require(*r.mismatched_deviation >= 1e-3, tag + " " + std::string(to_string(*r.mismatched)) + " " +
                                                       sci(*r.mismatched_deviation) + " >= 1e-3");
    }
  }
  within_budget(v, t0, 60.0);
  return v;
}

// C3: the four embeddings reproduce the source network's outputs.
Verdict c3() {
  Verdict v;
  const auto t0 = Clock::now();
  const SpatialGrid grid{4, 4, 3};
  Rng data(31);
  const ImageBatch x(grid, RowMatrix(gaussian_matrix(data, 100, grid.features())));
  const std::pair<ModelKind, ModelKind> routes[] = {{ModelKind::GAP, ModelKind::VEC},
                                                    {ModelKind::VEC, ModelKind::LCN},
                                                    {ModelKind::LCN, ModelKind::VEC},
                                                    {ModelKind::LCN, ModelKind::FCN}};
  for (const int n : {2, 4}) {
    double worst = 0.0;
    for (const auto& [from, to] : routes) {
      NetworkSpec src;
      src.kind = from;
      src.width = n;
      src.depth = 2;
      src.grid = grid;
      Rng rng(32 + static_cast<std::uint64_t>(n));
      const ParamSet p = init_params(rng, src);
      const auto [dst, q] = embed(src, p, to);
      const RowMatrix f = forward(src, p, x), g = forward(dst, q, x);
      worst = std::max(worst, (g - f).cwiseAbs().maxCoeff() / f.cwiseAbs().maxCoeff());
    }
    v.require(worst <= 1e-10, "n=" + std::to_string(n) + " worst rel " + sci(worst) + " <= 1e-10");
  }
  within_budget(v, t0, 30.0);
  return v;
}

// C4: backward against central finite differences.
Verdict c4() {
  Verdict v;
  const auto t0 = Clock::now();
  const SpatialGrid grid{4, 4, 3};
  for (const char* model : {"FCN", "LCN", "VEC", "GAP", "LAP(2)"}) {
    NetworkSpec spec;
    spec.width = 8;
    spec.depth = 2;
    spec.grid = grid;
    spec = with_model_name(spec, model);
    Rng rng(41);
    const ParamSet p = init_params(rng, spec);
    const ImageBatch x(grid, RowMatrix(gaussian_matrix(rng, 6, grid.features())));
    const RowMatrix cot = gaussian_matrix(rng, 6, spec.outputs);
    const oracle::GradientCheck c = oracle::gradient_check(spec, p, x, cot, rng, 100);
    v.require(c.checked >= 100 && c.worst <= 1e-6, std::string(model) + " " + std::to_string(c.checked) +
                                                        " coords worst " + sci(c.worst) + " <= 1e-6");
  }
  within_budget(v, t0, 60.0);
  return v;
}

// C5: a wide network trained by full-batch GD tracks NTK regression.
Verdict c5() {
  Verdict v;
  const auto t0 = Clock::now();
  const Dataset ds = synthetic(51, 16, 64);
  NetworkSpec spec;
  spec.kind = ModelKind::FCN;
  spec.width = 4096;
  spec.depth = 1;
  spec.grid = ds.grid();
  spec.outputs = ds.classes();

  TrainConfig cfg;
  cfg.batch_size = 16;
  cfg.momentum = 0.0;
  cfg.lr_multiplier = 0.2;
  cfg.centered = true;
  cfg.max_steps = 200000;
  cfg.loss_tolerance = 1e-10;
  cfg.early_stop_acc = 2.0;
  cfg.eval_interval = 100;
  Rng rng(52, kInitStream);
  const ParamSet p0 = init_params(rng, spec);
  const TrainResult r = train(spec, p0, ds, cfg);
  const RowMatrix nn = predict(spec, r.params, ds.test.x) - predict(spec, p0, ds.test.x);
  const RowMatrix ntk = kernel_regression(spec, KernelFlavor::NTK, ds).predictions;
  const double rel = (nn - ntk).norm() / ntk.norm();
  v.require(r.record.status == "converged",
            "status " + r.record.status + " at step " + std::to_string(r.record.final_step));
  v.require(rel <= 5e-2, "relative Frobenius " + sci(rel) + " <= 5e-2");
  within_budget(v, t0, 300.0);
  return v;
}

// C6: closed-form ReLU duals against Monte-Carlo expectations.
Verdict c6() {
  Verdict v;
  const auto t0 = Clock::now();
  Rng pick(61), mc(62);
  double worst_v = 0.0, worst_d = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double a = 0.5 + pick.uniform(), c = 0.5 + pick.uniform();
    const double rho = 2.0 * pick.uniform() - 1.0;
    const double b = rho * std::sqrt(a * c);
    const auto [mv, md] = oracle::relu_dual_mc(mc, a, b, c, 10'000'000);
    worst_v = std::max(worst_v, std::abs(ReluDual::value(a, b, c) - mv));
    worst_d = std::max(worst_d, std::abs(ReluDual::derivative(a, b, c) - md));
  }
  v.require(worst_v <= 1e-3, "V worst abs " + sci(worst_v) + " <= 1e-3");
  v.require(worst_d <= 1e-3, "Vdot worst abs " + sci(worst_d) + " <= 1e-3");
  within_budget(v, t0, 120.0);
  return v;
}

// C7: NTK regression ordering GAP > VEC > FCN, and GAP on O(3)^d data against VEC.
Verdict c7() {
  Verdict v;
  const auto t0 = Clock::now();
  json cfg = preset_config("fig2-desk");
  cfg["seeds"] = 5;
  cfg["sweep"]["groups"] = {"I", "O3^d"};
  cfg["sweep"]["models"] = {"FCN", "VEC", "GAP"};
  cfg["sweep"]["inferences"] = {"NTK"};
  const SweepResult r = run_sweep(cfg);
  std::map<std::string, double> med;
  for (const CellResult& c : r.cells) {
    std::vector<double> acc;
    for (const SeedResult& s : c.runs) acc.push_back(s.accuracy);
    med[c.model + "/" + c.group] = median(acc);
  }
  const double gap = med.at("GAP/I"), vec = med.at("VEC/I"), fcn = med.at("FCN/I"), rot = med.at("GAP/O3^d");
  v.require(gap - vec >= 0.02, "GAP " + fixed(gap) + " - VEC " + fixed(vec) + " >= 0.02");
  v.require(vec - fcn >= 0.02, "VEC " + fixed(vec) + " - FCN " + fixed(fcn) + " >= 0.02");
  v.require(std::abs(rot - vec) <= 0.02, "|GAP(O3^d) " + fixed(rot) + " - VEC " + fixed(vec) + "| <= 0.02");
  within_budget(v, t0, 600.0);
  return v;
}

// C8: kernel regression interpolates its own training labels.
Verdict c8() {
  Verdict v;
  const auto t0 = Clock::now();
  const CommonConfig common = common_config(preset_config("default"));
  const Dataset ds = synthetic(81, 64, 8);
  double worst = 0.0;
  int worst_rung = 0;
  for (const char* model : {"FCN", "LCN", "VEC", "GAP", "LAP(4)"}) {
    const KernelMatrices k = kernel_matrices(network_for(common, model, ds), ds.train.x, nullptr);
    for (const KernelFlavor flavor : {KernelFlavor::NNGP, KernelFlavor::NTK}) {
      const RegressionResult r = solve_regression(k.get(flavor), ds.train.y, k.get(flavor));
      worst = std::max(worst, (r.predictions - ds.train.y.values).cwiseAbs().maxCoeff() /
                                  ds.train.y.values.cwiseAbs().maxCoeff());
      worst_rung = std::max(worst_rung, r.rung);
    }
  }
  v.require(worst_rung == 0, "highest jitter rung " + std::to_string(worst_rung) + " == 0");
  v.require(worst <= 1e-6, "worst rel recovery " + sci(worst) + " <= 1e-6");
  within_budget(v, t0, 10.0);
  return v;
}

// C9: the baseline's two-segment exponent gain beats each ablation.
Verdict c9() {
  Verdict v;
  const auto t0 = Clock::now();
  const std::vector<LearningCurve> curves = dide_ablation(preset_config("dide-desk"));
  const LearningCurve& base = curves.front();
  for (std::size_t i = 1; i < curves.size(); ++i)
    v.require(base.median_gain > curves[i].median_gain, "baseline " + fixed(base.median_gain) + " > " +
                                                            curves[i].system.name + " " +
                                                            fixed(curves[i].median_gain));
  within_budget(v, t0, 1800.0);
  return v;
}

// C10: S-Dist vanishes between licensed copies; path trends toward GAP_n and away from VEC_inf.
Verdict c10() {
  Verdict v;
  const auto t0 = Clock::now();
  const json cfg = preset_config("sdist-desk");
  CommonConfig common = common_config(cfg);
  common.train.max_steps = 500;
  const Dataset ds = synthetic(101, 128, 64);
  const std::pair<const char*, const char*> licensed[] = {
      {"FCN", "O3d"}, {"FCN", "P3d"}, {"LCN", "O3^d"}, {"VEC", "O3xI"}, {"GAP", "O3xI"}, {"LAP(4)", "O3xI"}};
  for (const char* inference : {"NTK", "NNGP", "NN+"}) {
    double worst = 0.0;
    for (const auto& [model, group] : licensed) {
      SystemSpec sys = make_system(common, model, inference);
      sys.network = network_for(common, model, ds);
      Rng rng(102, kGroupStream);
      const GroupElement g = sample_group(rng, parse_group_tag(group), ds.grid());
      worst = std::max(worst, licensed_copy_sdist(sys, ds, g, {0, 1}));
    }
    v.require(worst <= 1e-8, std::string(inference) + " licensed copies worst S-Dist " + sci(worst) + " <= 1e-8");
  }
  const SdistResult path = sdist_path_sweep(cfg);
  for (const SdistRow& row : path.rows)
    v.notes.push_back("t=" + fixed(row.t, 2) + " gap " + sci(row.gap.value) + "±" + sci(row.gap.se) + " vecinf " +
                      sci(row.vecinf.value) + "±" + sci(row.vecinf.se));
  v.require(path.summary.at("all_pass").get<bool>(), "path trends within 2 SE per step");
  within_budget(v, t0, 1800.0);
  return v;
}

// C11: every CLI command re-run from its manifest reproduces its outputs byte for byte.
std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().filename() == "manifest.json") continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream bytes;
    bytes << in.rdbuf();
    files[fs::relative(e.path(), dir).string()] = bytes.str();
  }
  return files;
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "symsys");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

Verdict c11() {
  Verdict v;
  const fs::path root = fs::temp_directory_path() / "symsys_acceptance_c11";
  fs::remove_all(root);
  fs::create_directories(root);
  json cfg = merge_config(
      preset_config("default"),
      {{"seeds", 2},
       {"data", {{"synthetic", {{"m_train", 24}, {"m_test", 8}}}}},
       {"network", {{"width", 4}, {"depth", 1}}},
       {"train", {{"max_steps", 20}, {"batch_size", 8}, {"eval_interval", 10}}},
       {"suite",
        {{"m_train", 16}, {"m_test", 8}, {"width", 4}, {"steps", 10}, {"eval_interval", 5}, {"kernel_inputs", 8},
         {"finite_pairs", json::array({json::array({"GAP", "O3xI"})})},
         {"finite_witnesses", json::array()},
         {"kernel_models", {"VEC"}}}},
       {"sweep", {{"groups", {"I", "O3xI"}}, {"models", {"FCN", "GAP"}}, {"inferences", {"NTK", "NN"}}, {"quorum", 1}}},
       {"width_sweep", {{"widths", {2, 4}}, {"groups", {"O3xI"}}, {"inferences", {"NN"}}, {"quorum", 1}}},
       {"learning_curve", {{"sizes", {8, 12, 16, 24}}, {"bootstrap", 20}}},
       {"sdist", {{"widths", {4}}, {"t", {0.0, 0.5, 1.0}}}}});
  const fs::path cfg_path = root / "config.json";
  std::ofstream(cfg_path) << cfg.dump(2);
  const std::string data = (root / "gen-data_a" / "dataset.bin").string();

  const std::vector<std::pair<std::string, std::vector<std::string>>> runs = {
      {"gen-data", {"--seed", "3"}},
      {"transform", {"--data", data, "--group", "O3^d"}},
      {"train", {"--data", data, "--model", "VEC", "--inference", "NN+"}},
      {"kernel", {"--data", data, "--model", "GAP"}},
      {"regress", {"--data", data, "--model", "LAP(4)", "--inference", "NTK"}},
      {"verify-symmetry", {}},
      {"sweep", {}},
      {"width-sweep", {}},
      {"learning-curve", {}},
      {"sdist-path", {}},
      {"report", {"--input", (root / "sweep_a").string()}},
  };
  for (const auto& [command, extra] : runs) {
    const fs::path a = root / (command + "_a"), b = root / (command + "_b");
    std::vector<std::string> args{command, "--config", cfg_path.string(), "--out", a.string()};
    args.insert(args.end(), extra.begin(), extra.end());
    const int code_a = cli(args);
    const int code_b = cli({command, "--config", (a / "manifest.json").string(), "--out", b.string()});
    const auto fa = snapshot(a), fb = snapshot(b);
    const bool same = code_a == code_b && (code_a == kExitOk || code_a == kExitCheckFailed) && !fa.empty() && fa == fb;
    v.require(same, command + " exit " + std::to_string(code_a) + "/" + std::to_string(code_b) + ", " +
                        std::to_string(fa.size()) + " files " + (fa == fb ? "identical" : "differ"));
  }
  fs::remove_all(root);
  return v;
}

const std::vector<std::pair<std::string, std::pair<std::string, std::function<Verdict()>>>>& criteria() {
  static const std::vector<std::pair<std::string, std::pair<std::string, std::function<Verdict()>>>> table = {
      {"C1", {"coupled trajectories of licensed pairs", c1}},
      {"C2", {"infinite-width kernel invariance", c2}},
      {"C3", {"embeddings preserve outputs", c3}},
      {"C4", {"gradients match finite differences", c4}},
      {"C5", {"wide network matches NTK regression", c5}},
      {"C6", {"ReLU duals match Monte-Carlo", c6}},
      {"C7", {"spurious-symmetry accuracy ordering", c7}},
      {"C8", {"kernel regression interpolates", c8}},
      {"C9", {"DIDE ablation ordering", c9}},
      {"C10", {"S-Dist properties", c10}},
      {"C11", {"CLI determinism from manifests", c11}},
  };
  return table;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> wanted(argv + 1, argv + argc);
  bool all_pass = true;
  int ran = 0;
  for (const auto& [id, entry] : criteria()) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), id) == wanted.end()) continue;
    ++ran;
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = entry.second();
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    all_pass = all_pass && v.pass;
    std::cout << (v.pass ? "PASS " : "FAIL ") << id << " " << entry.first << " (" << fixed(seconds_since(t0), 1)
              << "s)";
    for (const auto& n : v.notes) std::cout << "\n    " << n;
    std::cout << std::endl;
  }
  if (ran == 0) {
    std::cerr << "unknown criterion; expected C1..C11\n";
    return 2;
  }
  return all_pass ? 0 : 1;
}
