#pragma once

#include "symsys/data/dataset.hpp"
#include "symsys/networks/forward.hpp"

namespace symsys {

struct LossValue {
  double loss = 0.0;
  RowMatrix cotangent;  ///< ∂loss/∂logits = (f - y)/(k·m)
};

/// L = |f - y|²/(2·k·m) + (λ/2)·|θ|². The λ term enters parameter gradients
/// directly as λ·θ, never through the cotangent.
LossValue mse_l2_loss(const RowMatrix& logits, const RowMatrix& labels, const ParamSet& params, double lambda);

struct Evaluation {
  double accuracy = 0.0;
  double mse = 0.0;  ///< |f - y|²/(2·k·m)
};

/// Accuracy uses row argmax with ties going to the lowest class index.
Evaluation evaluate_logits(const RowMatrix& logits, const LabelBatch& labels);
Evaluation evaluate(const NetworkSpec& spec, const ParamSet& params, const ImageBatch& batch, const LabelBatch& labels);

}  // namespace symsys
