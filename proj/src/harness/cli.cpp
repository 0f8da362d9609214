#include "symsys/harness/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "symsys/harness/learning_curve.hpp"
#include "symsys/harness/manifest.hpp"
#include "symsys/harness/sdist.hpp"
#include "symsys/harness/sweep.hpp"
#include "symsys/harness/symmetry_suite.hpp"
#include "symsys/harness/systems.hpp"
#include "symsys/harness/width_sweep.hpp"
#include "symsys/mathcore/text.hpp"
#include "symsys/training/loss.hpp"

namespace symsys {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Flags {
  std::string config_path;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<int> seeds;
  std::optional<int> threads;
  std::string out = "out";
  std::string data, group, model, inference, input;
  std::optional<int> width;
};

/// preset → config file → flags, with the subcommand and preset recorded inside.
json resolve_config(const std::string& command, const Flags& f) {
  json file = json::object();
  if (!f.config_path.empty()) file = read_config_file(f.config_path);
  std::string preset = f.preset;
  if (preset.empty()) preset = file.value("preset", std::string("default"));
  json c = merge_config(preset_config(preset), file);
  c["preset"] = preset;
  c["command"] = command;
  if (f.seed) c["seed"] = *f.seed;
  if (f.seeds) c["seeds"] = *f.seeds;
  if (f.threads) c["threads"] = *f.threads;
  if (!f.data.empty()) c["single"]["data"] = f.data;
  if (!f.group.empty()) c["single"]["group"] = f.group;
  if (!f.model.empty()) c["single"]["model"] = f.model;
  if (!f.inference.empty()) c["single"]["inference"] = f.inference;
  if (f.width) c["network"]["width"] = *f.width;
  return c;
}

struct Context {
  json config;
  CommonConfig common;
  ResultSink& sink;
  std::ostream& out;
};

/// The dataset named by single.data, or the configured source for seed index 0.
Dataset input_dataset(const Context& ctx) {
  const std::string path = ctx.config.at("single").value("data", std::string());
  if (!path.empty()) {
    if (!fs::exists(path)) throw UsageError("dataset file '" + path + "' does not exist");
    return read_dataset(path);
  }
  return build_dataset(ctx.common.data, ctx.common.seed, 0);
}

SystemSpec single_system(const Context& ctx, const Dataset& ds, const std::string& inference) {
  SystemSpec sys = make_system(ctx.common, ctx.config.at("single").at("model"), inference);
  sys.network.grid = ds.grid();
  sys.network.outputs = ds.classes();
  sys.network.validate();
  return sys;
}

json dataset_summary(const Dataset& ds) {
  return {{"grid", ds.grid()},
          {"classes", ds.classes()},
          {"m_train", ds.train.size()},
          {"m_test", ds.test.size()},
          {"provenance", ds.provenance}};
}

int cmd_gen_data(Context& ctx) {
  const Dataset ds = build_dataset(ctx.common.data, ctx.common.seed, 0);
  write_dataset((ctx.sink.dir() / "dataset.bin").string(), ds);
  ctx.sink.write_json("dataset.json", dataset_summary(ds));
  ctx.out << "wrote " << ds.train.size() << "+" << ds.test.size() << " examples\n";
  return kExitOk;
}

int cmd_transform(Context& ctx) {
  const Dataset ds = input_dataset(ctx);
  const GroupTag tag = parse_group_tag(ctx.config.at("single").at("group").get<std::string>());
  Rng rng(ctx.common.seed, kGroupStream);
  const GroupElement g = sample_group(rng, tag, ds.grid());
  const Dataset moved = apply_group(g, ds);
  write_dataset((ctx.sink.dir() / "dataset.bin").string(), moved);
  ctx.sink.write_json("dataset.json", dataset_summary(moved));
  ctx.out << "applied " << to_string(tag) << "\n";
  return kExitOk;
}

int cmd_train(Context& ctx) {
  const Dataset ds = input_dataset(ctx);
  const std::string inference = ctx.config.at("single").at("inference");
  if (is_kernel_inference(inference)) throw UsageError("train runs NN or NN+; use regress for " + inference);
  const SystemSpec sys = single_system(ctx, ds, inference);
  const SystemOutcome o = run_system(sys, ds, ctx.common.seed);
  ctx.sink.write_record(*o.record);
  ctx.sink.write_json("train.json", {{"digest", o.record->digest},
                                     {"status", o.record->status},
                                     {"success", o.success},
                                     {"best_test_acc", o.accuracy},
                                     {"final_test_mse", o.mse},
                                     {"final_step", o.record->final_step},
                                     {"eta", o.record->eta}});
  ctx.out << sys.network.name() << " " << inference << ": best test acc " << o.accuracy << " (" << o.record->status
          << ")\n";
  return kExitOk;
}

int cmd_kernel(Context& ctx) {
  const Dataset ds = input_dataset(ctx);
  const SystemSpec sys = single_system(ctx, ds, "NTK");
  const KernelMatrices k = kernel_matrices(sys.network, ds.train.x, nullptr, sys.gram);
  write_kernel((ctx.sink.dir() / "kernel_nngp.bin").string(), k.nngp);
  write_kernel((ctx.sink.dir() / "kernel_ntk.bin").string(), k.ntk);
  ctx.sink.write_json("kernel.json", {{"architecture", k.ntk.architecture},
                                      {"points", ds.train.size()},
                                      {"nngp_trace", k.nngp.values.trace()},
                                      {"ntk_trace", k.ntk.values.trace()}});
  ctx.out << "kernel " << k.ntk.architecture << " on " << ds.train.size() << " points\n";
  return kExitOk;
}

int cmd_regress(Context& ctx) {
  const Dataset ds = input_dataset(ctx);
  const std::string inference = ctx.config.at("single").at("inference");
  if (!is_kernel_inference(inference)) throw UsageError("regress runs NTK or NNGP; use train for " + inference);
  const SystemSpec sys = single_system(ctx, ds, inference);
  const KernelFlavor flavor = parse_kernel_flavor(inference);
  const KernelMatrices k_train = kernel_matrices(sys.network, ds.train.x, nullptr, sys.gram);
  const KernelMatrices k_cross = kernel_matrices(sys.network, ds.test.x, &ds.train.x, sys.gram);
  const RegressionResult r = solve_regression(k_train.get(flavor), ds.train.y, k_cross.get(flavor));
  const Evaluation ev = evaluate_logits(r.predictions, ds.test.y);
  // Interpolation: the regressor evaluated on its own training inputs.
  const RegressionResult self = solve_regression(k_train.get(flavor), ds.train.y, k_train.get(flavor));
  const double recovery = (self.predictions - ds.train.y.values).cwiseAbs().maxCoeff() /
                          ds.train.y.values.cwiseAbs().maxCoeff();

  std::ostringstream csv;
  csv << "index,label";
  for (int c = 0; c < ds.classes(); ++c) csv << ",logit" << c;
  csv << '\n';
  const std::vector<int> labels = ds.test.y.argmax();
  for (Eigen::Index i = 0; i < r.predictions.rows(); ++i) {
    csv << i << ',' << labels[static_cast<std::size_t>(i)];
    for (Eigen::Index c = 0; c < r.predictions.cols(); ++c) csv << ',' << format_double(r.predictions(i, c));
    csv << '\n';
  }
  ctx.sink.write_text("predictions.csv", csv.str());
  ctx.sink.write_json("regress.json", {{"architecture", k_train.get(flavor).architecture},
                                       {"flavor", inference},
                                       {"accuracy", ev.accuracy},
                                       {"mse", ev.mse},
                                       {"jitter", r.jitter},
                                       {"rung", r.rung},
                                       {"train_recovery", recovery}});
  ctx.out << k_train.get(flavor).architecture << " " << inference << ": test acc " << ev.accuracy << "\n";
  return kExitOk;
}

int cmd_verify(Context& ctx) {
  const SuiteReport report = verify_symmetry_suite(ctx.config);
  ctx.sink.write_json("verify_symmetry.json", report);
  for (const SuiteEntry& e : report.entries)
    ctx.out << (e.pass ? "PASS " : "FAIL ") << (e.licensed ? "licensed " : "witness  ") << e.model << "_" << e.width
            << " " << e.group << " " << e.check << " deviation " << format_double(e.deviation) << " threshold "
            << format_double(e.threshold) << "\n";
  return report.all_pass() ? kExitOk : kExitCheckFailed;
}

int cmd_sweep(Context& ctx) {
  const SweepResult r = run_sweep(ctx.config, &ctx.sink);
  ctx.sink.write_text("sweep.csv", sweep_csv(r.cells));
  ctx.sink.write_json("sweep.json", {{"cells", r.cells}, {"summary", r.summary}});
  ctx.out << r.cells.size() << " cells; degradation ordering "
          << (r.summary.at("all_nonincreasing").get<bool>() ? "holds" : "violated") << "\n";
  return kExitOk;
}

int cmd_width_sweep(Context& ctx) {
  const WidthSweepResult r = width_sweep(ctx.config, &ctx.sink);
  ctx.sink.write_text("width_sweep.csv", width_sweep_csv(r));
  json curves = json::array();
  for (const WidthCurve& c : r.curves) {
    json points = json::array();
    for (const WidthPoint& p : c.points) points.push_back({{"width", p.width}, {"cell", p.cell}});
    curves.push_back({{"group", c.group}, {"inference", c.inference}, {"points", points}});
  }
  ctx.sink.write_json("width_sweep.json", {{"curves", curves}, {"reference", r.reference}, {"summary", r.summary}});
  ctx.out << r.curves.size() << " curves; reference acc " << r.reference.acc_mean << "\n";
  return kExitOk;
}

int cmd_learning_curve(Context& ctx) {
  const std::vector<LearningCurve> curves = dide_ablation(ctx.config, &ctx.sink);
  for (const LearningCurve& c : curves) ctx.sink.write_text("learning_curve_" + c.system.name + ".csv", learning_curve_csv(c));
  const json summary = dide_summary(curves);
  ctx.sink.write_json("dide.json", {{"curves", curves}, {"summary", summary}});
  for (const LearningCurve& c : curves)
    ctx.out << c.system.name << ": gain " << c.gain << " ± " << c.gain_std << ", median seed gain " << c.median_gain
            << "\n";
  return kExitOk;
}

int cmd_sdist(Context& ctx) {
  const SdistResult r = sdist_path_sweep(ctx.config, &ctx.sink);
  ctx.sink.write_text("sdist.csv", sdist_csv(r.rows));
  json rows = json::array();
  for (const SdistRow& row : r.rows)
    rows.push_back({{"width", row.width},
                    {"t", row.t},
                    {"acc", row.acc},
                    {"seed_count", row.seed_count},
                    {"sdist_gap", row.gap.value},
                    {"sdist_gap_se", row.gap.se},
                    {"sdist_vecinf", row.vecinf.value},
                    {"sdist_vecinf_se", row.vecinf.se}});
  ctx.sink.write_json("sdist.json", {{"rows", rows}, {"summary", r.summary}});
  ctx.out << r.rows.size() << " rows; trends " << (r.summary.at("all_pass").get<bool>() ? "hold" : "violated") << "\n";
  return kExitOk;
}

std::optional<json> read_json_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) return std::nullopt;
  try {
    return json::parse(in);
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

int cmd_report(Context& ctx) {
  const std::string input = ctx.config.at("single").value("input", std::string());
  if (input.empty()) throw UsageError("report needs --input <run directory>");
  const fs::path dir(input);
  const auto manifest = read_json_file(dir / "manifest.json");
  if (!manifest) throw UsageError("'" + input + "' has no readable manifest.json");
  json rep = {{"command", manifest->at("config").value("command", std::string())},
              {"preset", manifest->value("preset", std::string())},
              {"seeds", manifest->value("seeds", json())},
              {"elapsed", manifest->value("elapsed", 0.0)}};
  // Key verdicts of whatever the run produced.
  std::map<std::string, std::function<json(const json&)>> verdicts = {
      {"verify_symmetry.json", [](const json& j) { return j.at("all_pass"); }},
      {"sweep.json", [](const json& j) { return j.at("summary").at("all_nonincreasing"); }},
      {"width_sweep.json", [](const json& j) { return j.at("summary").at("curves"); }},
      {"dide.json", [](const json& j) { return j.at("summary"); }},
      {"sdist.json", [](const json& j) { return j.at("summary").at("all_pass"); }},
      {"regress.json", [](const json& j) { return j; }},
      {"train.json", [](const json& j) { return j; }},
  };
  json found = json::object();
  for (const auto& [name, fn] : verdicts)
    if (const auto j = read_json_file(dir / name)) found[name] = fn(*j);
  rep["verdicts"] = found;
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().filename() != "manifest.json") files.push_back(entry.path().filename().string());
  std::sort(files.begin(), files.end());
  json digests = json::object();
  for (const auto& f : files) {
    std::ifstream in(dir / f, std::ios::binary);
    std::ostringstream bytes;
    bytes << in.rdbuf();
    digests[f] = digest_hex(bytes.str());
  }
  rep["files"] = digests;
  ctx.sink.write_json("report.json", rep);
  ctx.out << rep.dump(2) << "\n";
  return kExitOk;
}

const std::map<std::string, std::pair<std::string, int (*)(Context&)>>& commands() {
  static const std::map<std::string, std::pair<std::string, int (*)(Context&)>> table = {
      {"gen-data", {"Generate the configured dataset", cmd_gen_data}},
      {"transform", {"Apply a random group element to a dataset", cmd_transform}},
      {"train", {"Train one finite-width network (NN or NN+)", cmd_train}},
      {"kernel", {"Compute NNGP and NTK Gram matrices", cmd_kernel}},
      {"regress", {"Kernel regression with an infinite-width kernel", cmd_regress}},
      {"verify-symmetry", {"Run the symmetry verification suite", cmd_verify}},
      {"sweep", {"Groups x models x inferences accuracy sweep", cmd_sweep}},
      {"width-sweep", {"Accuracy versus width", cmd_width_sweep}},
      {"learning-curve", {"Learning curves and the data-efficiency ablation", cmd_learning_curve}},
      {"sdist-path", {"Prediction distances along a rotation path", cmd_sdist}},
      {"report", {"Summarize a run directory", cmd_report}},
  };
  return table;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Symmetry experiments for infinite- and finite-width networks", "symsys"};
  app.require_subcommand(1, 1);
  Flags f;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, entry] : commands()) {
    CLI::App* s = app.add_subcommand(name, entry.first);
    s->add_option("--config", f.config_path, "JSON config or a previous run's manifest.json");
    s->add_option("--preset", f.preset, "Named preset");
    s->add_option("--seed", f.seed, "Base seed");
    s->add_option("--seeds", f.seeds, "Seeds per cell");
    s->add_option("--threads", f.threads, "Worker threads (0 = OpenMP default)");
    s->add_option("--out", f.out, "Run directory")->capture_default_str();
    s->add_option("--data", f.data, "Dataset file (gen-data/transform output)");
    s->add_option("--group", f.group, "Group tag: I, O3xI, O3^d, P3d, O3d");
    s->add_option("--model", f.model, "Model: FCN, LCN, VEC, GAP, LAP(w)");
    s->add_option("--inference", f.inference, "NTK, NNGP, NN or NN+");
    s->add_option("--width", f.width, "Hidden width n");
    if (name == "report") s->add_option("--input", f.input, "Run directory to summarize");
    subs[name] = s;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "symsys: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }
  std::string command;
  for (const auto& [name, s] : subs)
    if (s->parsed()) command = name;

  try {
    json config = resolve_config(command, f);
    if (!f.input.empty()) config["single"]["input"] = f.input;
    ResultSink sink(f.out);
    Context ctx{config, common_config(config), sink, out};
    const RunManifest manifest(f.out, config, config.at("preset"));
    const int status = commands().at(command).second(ctx);
    manifest.finish();
    return status;
  } catch (const UsageError& e) {
    err << "symsys: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "symsys: " << e.what() << "\n";
    return kExitUsage;
  } catch (const json::exception& e) {
    err << "symsys: malformed config: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "symsys: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace symsys
