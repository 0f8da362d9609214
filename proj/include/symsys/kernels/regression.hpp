#pragma once

#include "symsys/data/dataset.hpp"
#include "symsys/kernels/gram.hpp"

namespace symsys {

struct RegressionResult {
  RowMatrix predictions;  ///< rows follow K_cross rows
  double jitter = 0.0;    ///< ε added to K_train's diagonal
  int rung = 0;           ///< jitter-ladder rung (0 = minimum)
};

/// Infinite-time gradient-flow (NTK) or posterior-mean (NNGP) prediction
/// K_cross · K_train⁻¹ · Y_train.
RegressionResult solve_regression(const KernelMatrix& k_train, const LabelBatch& y_train, const KernelMatrix& k_cross);

}  // namespace symsys
