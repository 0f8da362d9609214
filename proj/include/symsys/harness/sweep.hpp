#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "symsys/harness/manifest.hpp"

namespace symsys {

/// Per-seed outcome inside a cell.
struct SeedResult {
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  double mse = 0.0;
  bool success = true;
  std::string digest;  ///< RunRecord digest (finite width)
  double jitter = 0.0;  ///< regression jitter (kernel inference)
};
void to_json(nlohmann::json& j, const SeedResult& s);

/// One (group, model, inference) cell. Aggregates cover successful seeds only.
struct CellResult {
  std::string group, model, inference;
  std::vector<SeedResult> runs;
  int seed_count = 0;  ///< successful runs
  double acc_mean = 0.0;
  double acc_std = 0.0;
  bool below_quorum = false;
  bool empty() const { return seed_count == 0; }
  double acc_se() const;
};
void to_json(nlohmann::json& j, const CellResult& c);

struct SweepResult {
  std::vector<CellResult> cells;  ///< group-major, then model, then inference
  nlohmann::json summary;
};

/// Runs every cell of config["sweep"] over config["seeds"] seeds. Run seed s
/// uses dataset s, τ drawn from (seed + s, kGroupStream) and initialization
/// from (seed + s, kInitStream). RunRecords go to `sink` when given.
SweepResult run_sweep(const nlohmann::json& config, ResultSink* sink = nullptr);

/// Aggregates per-seed results (only successful ones enter the mean and std).
CellResult aggregate_cell(std::string group, std::string model, std::string inference, std::vector<SeedResult> runs,
                          int quorum);

/// For each (model, inference): whether cell means are nonincreasing along
/// I → O3xI → O3^d → P3d → O3d up to two standard errors per step. Groups
/// absent from the sweep are skipped.
nlohmann::json degradation_summary(const std::vector<CellResult>& cells);

/// CSV: group,model,inference,seed_count,acc_mean,acc_std (nan for empty cells).
std::string sweep_csv(const std::vector<CellResult>& cells);

}  // namespace symsys
