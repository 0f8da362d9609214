#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "symsys/harness/config.hpp"
#include "symsys/kernels/regression.hpp"

namespace symsys {

/// One learning system (model, inference) applied to a dataset. Inference is
/// "NTK" or "NNGP" (kernel regression with the model's infinite-width kernel)
/// or "NN" / "NN+" (SGD training of the finite-width model).
struct SystemSpec {
  NetworkSpec network;
  std::string inference = "NTK";
  TrainConfig train;  ///< finite-width only; lr multiplier and λ follow `inference`
  GramOptions gram;
};

/// Builds a SystemSpec from the common configuration and a model name such as "LAP(4)".
SystemSpec make_system(const CommonConfig& common, const std::string& model, const std::string& inference);

bool is_kernel_inference(const std::string& inference);

struct SystemOutcome {
  double accuracy = 0.0;  ///< kernel: test accuracy; finite: best test accuracy along training
  double mse = 0.0;       ///< test MSE of the final predictor
  RowMatrix predictions;  ///< final test logits
  bool success = true;    ///< finite: best train accuracy reached the success threshold
  double jitter = 0.0;
  std::optional<RunRecord> record;
};

/// Runs the system on `ds`. `seed` drives initialization (stream kInitStream)
/// and the batch schedule; kernel inference ignores it.
SystemOutcome run_system(const SystemSpec& system, const Dataset& ds, std::uint64_t seed);

/// Kernel regression on `ds` with the infinite-width kernel of `spec`.
RegressionResult kernel_regression(const NetworkSpec& spec, KernelFlavor flavor, const Dataset& ds,
                                   const GramOptions& gram = {});

}  // namespace symsys
