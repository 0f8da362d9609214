#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "symsys/harness/manifest.hpp"
#include "symsys/mathcore/power_law.hpp"

namespace symsys {

/// A (dataset variant, model, inference) triple.
struct CurveSystem {
  std::string name;
  std::string group = "I";
  std::string model = "VEC";
  std::string inference = "NN+";
};
void from_json(const nlohmann::json& j, CurveSystem& s);

struct CurvePoint {
  int m = 0;
  std::vector<double> acc, mse;  ///< successful seeds, seed order
  std::vector<int> seeds;        ///< seed index of each entry
  double acc_mean = 0.0, acc_std = 0.0, mse_mean = 0.0, mse_std = 0.0;
};

struct LearningCurve {
  CurveSystem system;
  std::vector<CurvePoint> points;
  std::optional<PowerLawFit> one;  ///< one-segment fit of mean test MSE
  std::optional<PowerLawFit> two;  ///< two-segment fit (needs ≥ 4 sizes)
  /// DIDE verdict: second-segment minus first-segment exponent of the mean curve.
  double gain = 0.0;
  double gain_std = 0.0;             ///< bootstrap over seeds
  std::vector<double> seed_gains;    ///< per-seed two-segment gains
  double median_gain = 0.0;          ///< median of seed_gains
};
void to_json(nlohmann::json& j, const LearningCurve& c);

/// Two-segment gain of an MSE curve, or nullopt with fewer than 4 sizes.
std::optional<double> dide_gain(const std::vector<int>& sizes, const std::vector<double>& mse,
                                const PowerLawOptions& options);

/// Fits and DIDE statistics for a curve whose points are already filled in.
void analyse_curve(LearningCurve& curve, const PowerLawOptions& options, int bootstrap, std::uint64_t seed);

/// Runs one system over nested training sizes config["learning_curve"]["sizes"]:
/// seed s draws one dataset of the largest size and uses its leading rows.
LearningCurve learning_curve(const nlohmann::json& config, const CurveSystem& system, ResultSink* sink = nullptr);

/// Every system of config["learning_curve"]["systems"]; the first is the baseline.
std::vector<LearningCurve> dide_ablation(const nlohmann::json& config, ResultSink* sink = nullptr);

/// Baseline-vs-ablation comparison on median per-seed gains, plus the
/// reference exponents carried as documentation.
nlohmann::json dide_summary(const std::vector<LearningCurve>& curves);

/// CSV: m,acc_mean,acc_std,mse_mean,mse_std,segment,alpha.
std::string learning_curve_csv(const LearningCurve& curve);

PowerLawOptions power_law_options(const nlohmann::json& learning_curve_section);

}  // namespace symsys
