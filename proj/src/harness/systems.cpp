#include "symsys/harness/systems.hpp"

#include "symsys/kernels/regression.hpp"
#include "symsys/training/loss.hpp"

namespace symsys {

bool is_kernel_inference(const std::string& inference) { return inference == "NTK" || inference == "NNGP"; }

SystemSpec make_system(const CommonConfig& common, const std::string& model, const std::string& inference) {
  SystemSpec s;
  s.network = with_model_name(common.network, model);
  s.network.validate();
  s.inference = inference;
  s.gram = common.gram;
  if (is_kernel_inference(inference)) {
    s.train = common.train;
  } else if (inference == "NN" || inference == "NN+") {
    s.train = inference_config(inference, common.train);
  } else {
    throw UsageError("unknown inference '" + inference + "' (expected NTK, NNGP, NN or NN+)");
  }
  return s;
}

RegressionResult kernel_regression(const NetworkSpec& spec, KernelFlavor flavor, const Dataset& ds,
                                   const GramOptions& gram) {
  const KernelMatrices k_train = kernel_matrices(spec, ds.train.x, nullptr, gram);
  const KernelMatrices k_cross = kernel_matrices(spec, ds.test.x, &ds.train.x, gram);
  return solve_regression(k_train.get(flavor), ds.train.y, k_cross.get(flavor));
}

SystemOutcome run_system(const SystemSpec& system, const Dataset& ds, std::uint64_t seed) {
  SystemOutcome out;
  if (is_kernel_inference(system.inference)) {
    RegressionResult r = kernel_regression(system.network, parse_kernel_flavor(system.inference), ds, system.gram);
    const Evaluation ev = evaluate_logits(r.predictions, ds.test.y);
    out.accuracy = ev.accuracy;
    out.mse = ev.mse;
    out.predictions = std::move(r.predictions);
    out.jitter = r.jitter;
    return out;
  }
  Rng init(seed, kInitStream);
  const ParamSet params0 = init_params(init, system.network);
  TrainConfig cfg = system.train;
  cfg.seed = seed;
  TrainResult tr = train(system.network, params0, ds, cfg);
  out.predictions = predict(system.network, tr.params, ds.test.x);
  if (cfg.centered) out.predictions -= predict(system.network, params0, ds.test.x);
  out.accuracy = tr.record.best_test_acc;
  out.mse = tr.record.final_test_mse;
  out.success = tr.record.success;
  out.record = std::move(tr.record);
  return out;
}

}  // namespace symsys
