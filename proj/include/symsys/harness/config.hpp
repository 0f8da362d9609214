#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "symsys/data/groups.hpp"
#include "symsys/data/sources.hpp"
#include "symsys/kernels/gram.hpp"
#include "symsys/training/train.hpp"

namespace symsys {

/// Bad flags, unknown presets or malformed configuration (CLI exit status 2).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Names accepted by `preset_config`.
std::vector<std::string> preset_names();

/// Full configuration object of a named preset. Every preset carries the same
/// top-level sections; subcommands read the ones they need:
///   seed, seeds, threads, data, network, train, gram, suite, sweep,
///   width_sweep, learning_curve, sdist, single (model/inference/group/...).
nlohmann::json preset_config(std::string_view name);

/// RFC 7386 merge: objects merge recursively, everything else replaces.
nlohmann::json merge_config(nlohmann::json base, const nlohmann::json& overlay);

/// Reads a config file. A run manifest is accepted too; its "config" member
/// (the fully resolved configuration of that run) is returned.
nlohmann::json read_config_file(const std::string& path);

/// Where images come from.
struct DataSpec {
  std::string source = "synthetic";  ///< "synthetic", "cifar10" or "file"
  SyntheticConfig synthetic;
  std::string path;  ///< CIFAR-10 directory or dataset container
  SpatialGrid cifar_grid{8, 8, 3};
  int m_train = 512;  ///< CIFAR subset sizes
  int m_test = 256;
  bool flip = false;
  /// Synthetic only: run seed s draws its dataset from seed + s (otherwise
  /// every run shares the dataset of `seed`).
  bool resample = true;
};
void to_json(nlohmann::json& j, const DataSpec& d);
void from_json(const nlohmann::json& j, DataSpec& d);

/// Dataset for run seed `run_seed` given the configuration's base `seed`.
Dataset build_dataset(const DataSpec& spec, std::uint64_t seed, std::uint64_t run_seed);

/// Typed view of the common sections of a resolved configuration.
struct CommonConfig {
  std::uint64_t seed = 0;
  int seeds = 5;
  int threads = 0;
  DataSpec data;
  NetworkSpec network;  ///< kind and pool window are set per model
  TrainConfig train;
  GramOptions gram;
};
CommonConfig common_config(const nlohmann::json& config);

/// Stream ids of the per-run generators, shared by every experiment so the
/// same run seed always sees the same τ and initialization.
inline constexpr std::uint64_t kGroupStream = 0x6e0u;
inline constexpr std::uint64_t kInitStream = 0x1417u;
inline constexpr std::uint64_t kPathStream = 0x9a7u;

std::vector<GroupTag> parse_group_list(const nlohmann::json& names);
std::vector<std::string> string_list(const nlohmann::json& names);

}  // namespace symsys
