#include "symsys/harness/config.hpp"

#include <fstream>

#include "symsys/data/dataset.hpp"

namespace symsys {
namespace {

using nlohmann::json;

// Explicit arrays: a braced list of string pairs would otherwise become an object.
json pair(const char* model, const char* group) { return json::array({model, group}); }

json base_config() {
  NetworkSpec net;
  TrainConfig train;
  train.max_steps = 2000;
  json network = net;
  network.erase("kind");
  network.erase("grid");
  network.erase("outputs");
  return {
      {"seed", 0},
      {"seeds", 5},
      {"threads", 0},
      {"data", DataSpec{}},
      {"network", network},
      {"train", train},
      {"gram", {{"tile", 32}}},
      {"suite",
       {{"m_train", 256},
        {"m_test", 32},
        {"width", 32},
        {"steps", 500},
        {"eval_interval", 50},
        {"kernel_inputs", 32},
        {"finite_pairs", json::array({pair("FCN", "O3d"), pair("FCN", "P3d"), pair("LCN", "O3^d"),
                                      pair("VEC", "O3xI"), pair("GAP", "O3xI"), pair("LAP(4)", "O3xI")})},
        {"finite_witnesses", json::array({pair("VEC", "O3^d")})},
        {"kernel_models", {"FCN", "LCN", "VEC", "GAP", "LAP(4)"}},
        {"trainings", {{{"name", "NN"}, {"lr_multiplier", 1.0}, {"l2", 0.0}},
                       {{"name", "NN+"}, {"lr_multiplier", 8.0}, {"l2", 1e-7}}}},
        {"thresholds",
         {{"finite", 1e-6}, {"kernel", 1e-10}, {"prediction", 1e-8}, {"witness_finite", 1e-2}, {"witness_kernel", 1e-3}}}}},
      {"sweep",
       {{"groups", {"I", "O3xI", "O3^d", "P3d", "O3d"}},
        {"models", {"FCN", "LCN", "VEC", "GAP", "LAP(4)", "LAP(8)"}},
        {"inferences", {"NTK", "NN", "NN+"}},
        {"quorum", 4}}},
      {"width_sweep",
       {{"widths", {8, 16, 32, 64, 128}}, {"groups", {"O3xI", "O3^d"}}, {"inferences", {"NN", "NN+"}}, {"quorum", 4}}},
      {"learning_curve",
       {{"sizes", {64, 128, 256, 512, 1024}},
        {"systems",
         {{{"name", "baseline"}, {"group", "I"}, {"model", "VEC"}, {"inference", "NN+"}},
          {{"name", "ntk"}, {"group", "I"}, {"model", "VEC"}, {"inference", "NTK"}},
          {{"name", "lcn"}, {"group", "I"}, {"model", "LCN"}, {"inference", "NN+"}},
          {{"name", "rotated"}, {"group", "O3^d"}, {"model", "VEC"}, {"inference", "NN+"}}}},
        {"split", "scan"},
        {"fixed_split", 0},
        {"bootstrap", 200}}},
      {"sdist",
       {{"widths", {8}}, {"t", {0.0, 0.25, 0.5, 0.75, 1.0}}, {"scale", 1.0}, {"inference", "NN+"}, {"seed_stride", 1}}},
      {"single", {{"model", "GAP"}, {"inference", "NTK"}, {"group", "O3^d"}, {"data", ""}, {"dist", "gaussian"}}},
  };
}

}  // namespace

void to_json(json& j, const DataSpec& d) {
  j = {{"source", d.source}, {"synthetic", d.synthetic}, {"path", d.path}, {"cifar_grid", d.cifar_grid},
       {"m_train", d.m_train}, {"m_test", d.m_test},     {"flip", d.flip}, {"resample", d.resample}};
}

void from_json(const json& j, DataSpec& d) {
  const DataSpec def;
  d.source = j.value("source", def.source);
  d.synthetic = j.value("synthetic", def.synthetic);
  d.path = j.value("path", def.path);
  d.cifar_grid = j.value("cifar_grid", def.cifar_grid);
  d.m_train = j.value("m_train", def.m_train);
  d.m_test = j.value("m_test", def.m_test);
  d.flip = j.value("flip", def.flip);
  d.resample = j.value("resample", def.resample);
}

std::vector<std::string> preset_names() {
  return {"default", "theorem2-desk", "fig2-desk", "width-desk", "dide-desk", "sdist-desk", "paper-scale"};
}

json preset_config(std::string_view name) {
  json c = base_config();
  if (name == "default" || name == "theorem2-desk") return c;
  if (name == "fig2-desk") {
    c["train"]["max_steps"] = 3000;
    return c;
  }
  if (name == "width-desk") {
    c["train"]["max_steps"] = 3000;
    return c;
  }
  if (name == "dide-desk") {
    c["network"]["width"] = 8;
    c["train"]["max_steps"] = 3000;
    c["data"]["synthetic"]["m_train"] = 1024;
    return c;
  }
  if (name == "sdist-desk") {
    c["seeds"] = 10;
    c["train"]["max_steps"] = 3000;
    return c;
  }
  if (name == "paper-scale") {
    // Reference configuration only; far beyond desk budgets.
    c["data"] = DataSpec{"cifar10", {}, "cifar-10-batches-bin", SpatialGrid{32, 32, 3}, 45000, 10000, false, false};
    c["network"]["depth"] = 8;
    c["network"]["width"] = 256;
    c["train"]["max_steps"] = 1000000;
    c["width_sweep"]["widths"] = {16, 32, 64, 128, 256, 512, 1024};
    c["learning_curve"]["sizes"] = {1000, 2000, 4000, 8000, 16000, 32000, 45000};
    c["sdist"]["seed_stride"] = 1;
    c["sweep"]["models"] = {"FCN", "LCN", "VEC", "GAP", "LAP(4)", "LAP(8)"};
    return c;
  }
  throw UsageError("unknown preset '" + std::string(name) + "'");
}

json merge_config(json base, const json& overlay) {
  base.merge_patch(overlay);
  return base;
}

json read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw UsageError("malformed config '" + path + "': " + e.what());
  }
  if (!j.is_object()) throw UsageError("config '" + path + "' is not a JSON object");
  if (j.contains("versions") && j.contains("config")) return j.at("config");
  return j;
}

Dataset build_dataset(const DataSpec& spec, std::uint64_t seed, std::uint64_t run_seed) {
  Dataset ds;
  if (spec.source == "synthetic") {
    ds = gen_synthetic(spec.resample ? seed + run_seed : seed, spec.synthetic);
  } else if (spec.source == "cifar10") {
    CifarOptions options;
    options.grid_out = spec.cifar_grid;
    options.m_train = spec.m_train;
    options.m_test = spec.m_test;
    options.shuffle_seed = seed;
    ds = load_cifar10(spec.path, options);
  } else if (spec.source == "file") {
    ds = read_dataset(spec.path);
  } else {
    throw UsageError("unknown data source '" + spec.source + "'");
  }
  return spec.flip ? flip_augment(ds) : ds;
}

CommonConfig common_config(const json& config) {
  CommonConfig c;
  try {
    c.seed = config.value("seed", c.seed);
    c.seeds = config.value("seeds", c.seeds);
    c.threads = config.value("threads", c.threads);
    if (config.contains("data")) c.data = config.at("data").get<DataSpec>();
    json net = config.value("network", json::object());
    net["kind"] = "FCN";
    net["grid"] = c.data.source == "cifar10" ? c.data.cifar_grid : c.data.synthetic.grid;
    if (!net.contains("outputs")) net["outputs"] = c.data.source == "cifar10" ? 10 : c.data.synthetic.classes;
    c.network = net.get<NetworkSpec>();
    if (config.contains("train")) c.train = config.at("train").get<TrainConfig>();
    c.gram.tile = config.value("gram", json::object()).value("tile", c.gram.tile);
    c.gram.threads = c.threads;
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed config: ") + e.what());
  }
  if (c.seeds < 1) throw UsageError("seeds must be at least 1");
  return c;
}

std::vector<GroupTag> parse_group_list(const json& names) {
  std::vector<GroupTag> out;
  for (const auto& n : names) out.push_back(parse_group_tag(n.get<std::string>()));
  return out;
}

std::vector<std::string> string_list(const json& names) {
  std::vector<std::string> out;
  for (const auto& n : names) out.push_back(n.get<std::string>());
  return out;
}

}  // namespace symsys
