#pragma once

#include "symsys/networks/forward.hpp"

namespace symsys {

/// Rows are per-example gradients of logit class 0, one row per image.
RowMatrix logit_jacobian(const NetworkSpec& spec, const ParamSet& params, const ImageBatch& batch);

/// (1/S) Σ_s J_s J_sᵀ over S fresh initializations drawn from `rng`.
Matrix empirical_ntk(const NetworkSpec& spec, Rng& rng, const ImageBatch& batch, int samples,
                     InitDist dist = InitDist::Gaussian);

struct LrEstimate {
  double eta0 = 0.0;
  double lambda_max = 0.0;
};

/// η₀ = 2/λ_max(G). Throws on a zero Gram.
LrEstimate learning_rate_from_gram(const Matrix& gram);
LrEstimate estimate_lr(const NetworkSpec& spec, Rng& rng, const ImageBatch& batch, int samples,
                       InitDist dist = InitDist::Gaussian);

}  // namespace symsys
