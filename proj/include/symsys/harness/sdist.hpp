#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "symsys/harness/manifest.hpp"
#include "symsys/harness/systems.hpp"

namespace symsys {

/// E_x ‖f̄₁(x) - f̄₂(x)‖² over the rows of two logit matrices.
double s_dist(const RowMatrix& f1, const RowMatrix& f2);

/// Seed-averaged predictions; an empty list throws.
RowMatrix mean_predictions(const std::vector<RowMatrix>& runs);

/// S-Dist between seed-averaged learners with a delete-one-seed jackknife
/// standard error. `a[i]`/`b[i]` belong to seed `a_seeds[i]`/`b_seeds[i]`;
/// the jackknife drops each seed index from both sides at once. A learner
/// with a single deterministic entry (kernel) is passed with seed -1.
struct SdistEstimate {
  double value = 0.0;
  double se = 0.0;
  int seeds = 0;
};
SdistEstimate s_dist_jackknife(const std::vector<RowMatrix>& a, const std::vector<int>& a_seeds,
                               const std::vector<RowMatrix>& b, const std::vector<int>& b_seeds);

struct SdistRow {
  int width = 0;
  double t = 0.0;
  double acc = 0.0;  ///< mean best test accuracy of VEC_n on τ_t D over successful seeds
  int seed_count = 0;
  SdistEstimate gap;     ///< to GAP_n on D
  SdistEstimate vecinf;  ///< to VEC_∞ (NTK) on D
};

struct SdistResult {
  std::vector<SdistRow> rows;
  nlohmann::json summary;
};

/// config["sdist"]: for every width n and path time t, trains VEC_n on τ_t D
/// (τ_t = rotation_path from (seed, kPathStream)) with the same seeds at every
/// t, and compares its seed-averaged test logits with GAP_n on D and VEC_∞ on D.
SdistResult sdist_path_sweep(const nlohmann::json& config, ResultSink* sink = nullptr);

/// For each width: S-Dist to GAP_n nondecreasing and to VEC_∞ nonincreasing in
/// t, each step allowed two combined standard errors of slack.
nlohmann::json sdist_trend_summary(const std::vector<SdistRow>& rows);

/// S-Dist between a learner on `ds` and on g·ds (test inputs transformed too).
/// Finite-width runs start g·ds from the coupled initialization.
double licensed_copy_sdist(const SystemSpec& system, const Dataset& ds, const GroupElement& g,
                           const std::vector<std::uint64_t>& seeds);

/// CSV: width,t,acc,sdist_gap,sdist_vecinf.
std::string sdist_csv(const std::vector<SdistRow>& rows);

}  // namespace symsys
