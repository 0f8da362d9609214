#pragma once

#include <json.hpp>

#include "symsys/harness/sweep.hpp"

namespace symsys {

/// One point of an accuracy-vs-width curve; `cell.model` carries the width.
struct WidthPoint {
  int width = 0;
  CellResult cell;
};

struct WidthCurve {
  std::string group, inference;
  std::vector<WidthPoint> points;  ///< ascending width
};

struct WidthSweepResult {
  std::string model = "VEC";
  std::vector<WidthCurve> curves;
  CellResult reference;  ///< kernel accuracy of the model's infinite-width NTK on untransformed data
  nlohmann::json summary;
};

/// Runs config["width_sweep"]: widths × groups × inferences for the model
/// named there (default VEC), plus the infinite-width reference per seed.
WidthSweepResult width_sweep(const nlohmann::json& config, ResultSink* sink = nullptr);

/// Pool-adjacent-violators check: every width's mean lies within two standard
/// errors of the nondecreasing least-squares fit.
nlohmann::json monotone_check(const WidthCurve& curve);

/// CSV: group,inference,width,seed_count,acc_mean,acc_std; the reference row
/// has group "ref", inference "NTK" and width "inf".
std::string width_sweep_csv(const WidthSweepResult& r);

}  // namespace symsys
