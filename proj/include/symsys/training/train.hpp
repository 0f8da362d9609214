#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "symsys/data/dataset.hpp"
#include "symsys/networks/forward.hpp"

namespace symsys {

struct TrainConfig {
  int batch_size = 40;
  double momentum = 0.9;
  double lr_multiplier = 1.0;  ///< c in η = c·η₀
  double l2 = 0.0;             ///< λ
  int max_steps = 20000;
  double early_stop_acc = 1.0;
  double success_acc = 0.95;
  std::uint64_t seed = 0;
  int eval_interval = 100;
  /// η₀; when ≤ 0 it is estimated on the first scheduled batch from
  /// `lr_samples` fresh initializations on a stream of `seed`.
  double eta0 = 0.0;
  int lr_samples = 1;
  /// Stop once the full training loss falls to this value (0 disables).
  double loss_tolerance = 0.0;
  /// Train f_θ - f_θ₀ instead of f_θ, removing the initial function.
  bool centered = false;
  double divergence_factor = 1e6;

  void validate(Eigen::Index m_train) const;
};

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

/// NN: (c = 1, λ = 0); NN+: (c = 8, λ = 1e-7).
TrainConfig inference_config(const std::string& inference, TrainConfig base = {});

struct MetricRow {
  int step = 0;
  double train_loss = 0.0;
  double train_acc = 0.0;
  double test_acc = 0.0;
  double test_mse = 0.0;
};

struct RunRecord {
  std::string digest;
  nlohmann::json config;
  Provenance provenance;
  std::vector<MetricRow> metrics;
  double eta = 0.0;
  double best_test_acc = 0.0;
  double best_train_acc = 0.0;
  double final_test_mse = 0.0;
  int final_step = 0;
  bool success = false;
  std::string status;  ///< "early_stop", "converged", "max_steps", "diverged"
};

void to_json(nlohmann::json& j, const RunRecord& r);

/// Writes <dir>/<digest>.json and <dir>/<digest>.metrics.csv.
void write_run_record(const std::string& directory, const RunRecord& r);

/// Concatenated per-epoch shuffles of [0, m) from one stream of `seed`;
/// batch t is the t-th run of `batch_size` entries. Full-batch training
/// (batch_size = m) therefore sees every example each step.
class BatchSchedule {
 public:
  BatchSchedule(std::uint64_t seed, int m, int batch_size);
  std::vector<int> batch(int step);

 private:
  Rng rng_;
  int m_;
  int batch_size_;
  std::vector<int> order_;
};

/// Called at every evaluation step with the current parameters.
using TrainObserver = std::function<void(int step, const ParamSet& params)>;

struct TrainResult {
  ParamSet params;
  RunRecord record;
};

TrainResult train(const NetworkSpec& spec, const ParamSet& params0, const Dataset& ds, const TrainConfig& cfg,
                  const TrainObserver& observer = {});

}  // namespace symsys
