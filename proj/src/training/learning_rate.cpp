#include "symsys/training/learning_rate.hpp"

#include <stdexcept>

namespace symsys {

RowMatrix logit_jacobian(const NetworkSpec& spec, const ParamSet& params, const ImageBatch& batch) {
  RowMatrix jac(batch.size(), static_cast<Eigen::Index>(params.size()));
  RowMatrix cot = RowMatrix::Zero(1, spec.outputs);
  cot(0, 0) = 1.0;
  for (Eigen::Index i = 0; i < batch.size(); ++i) {
    const std::vector<int> one{static_cast<int>(i)};
    ForwardTrace trace;
    forward(spec, params, batch.rows(one), &trace);
    jac.row(i) = backward(spec, params, trace, cot).flatten().transpose();
  }
  return jac;
}

Matrix empirical_ntk(const NetworkSpec& spec, Rng& rng, const ImageBatch& batch, int samples, InitDist dist) {
  if (batch.size() < 1) throw std::invalid_argument("empirical_ntk: empty batch");
  if (samples < 1) throw std::invalid_argument("empirical_ntk: need at least one sample");
  Matrix gram = Matrix::Zero(batch.size(), batch.size());
  for (int s = 0; s < samples; ++s) {
    const ParamSet params = init_params(rng, spec, dist);
    const RowMatrix jac = logit_jacobian(spec, params, batch);
    gram.noalias() += jac * jac.transpose();
  }
  return gram / samples;
}

LrEstimate learning_rate_from_gram(const Matrix& gram) {
  if (gram.size() == 0 || gram.cwiseAbs().maxCoeff() == 0.0)
    throw std::invalid_argument("learning rate: empirical NTK Gram is zero");
  const double top = top_eigenvalue(gram);
  return {2.0 / top, top};
}

LrEstimate estimate_lr(const NetworkSpec& spec, Rng& rng, const ImageBatch& batch, int samples, InitDist dist) {
  return learning_rate_from_gram(empirical_ntk(spec, rng, batch, samples, dist));
}

}  // namespace symsys
