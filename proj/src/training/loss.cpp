#include "symsys/training/loss.hpp"

#include <stdexcept>

namespace symsys {

LossValue mse_l2_loss(const RowMatrix& logits, const RowMatrix& labels, const ParamSet& params, double lambda) {
  if (logits.rows() != labels.rows() || logits.cols() != labels.cols())
    throw std::invalid_argument("mse_l2_loss: logits and labels differ in shape");
  const double norm = static_cast<double>(logits.rows() * logits.cols());
  LossValue out;
  out.cotangent = (logits - labels) / norm;
  out.loss = (logits - labels).squaredNorm() / (2.0 * norm);
  if (lambda != 0.0) out.loss += 0.5 * lambda * params.squared_norm();
  return out;
}

Evaluation evaluate_logits(const RowMatrix& logits, const LabelBatch& labels) {
  if (logits.rows() != labels.size() || logits.cols() != labels.classes())
    throw std::invalid_argument("evaluate: logits and labels differ in shape");
  const LabelBatch predicted{logits};
  const auto p = predicted.argmax();
  const auto y = labels.argmax();
  Eigen::Index hits = 0;
  for (std::size_t i = 0; i < p.size(); ++i) hits += p[i] == y[i];
  const double m = static_cast<double>(logits.rows());
  return {static_cast<double>(hits) / m, (logits - labels.values).squaredNorm() / (2.0 * m * static_cast<double>(logits.cols()))};
}

Evaluation evaluate(const NetworkSpec& spec, const ParamSet& params, const ImageBatch& batch, const LabelBatch& labels) {
  return evaluate_logits(predict(spec, params, batch), labels);
}

}  // namespace symsys
