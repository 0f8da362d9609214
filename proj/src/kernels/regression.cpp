#include "symsys/kernels/regression.hpp"

#include <stdexcept>

namespace symsys {

RegressionResult solve_regression(const KernelMatrix& k_train, const LabelBatch& y_train, const KernelMatrix& k_cross) {
  if (k_train.values.rows() != k_train.values.cols()) throw std::invalid_argument("solve_regression: K_train is not square");
  if (k_train.flavor != k_cross.flavor) throw std::invalid_argument("solve_regression: NNGP and NTK matrices mixed");
  if (k_cross.values.cols() != k_train.values.rows() || y_train.size() != k_train.values.rows())
    throw std::invalid_argument("solve_regression: K_train, Y_train and K_cross sizes disagree");
  const PsdSolution sol = psd_solve(k_train.values, y_train.values);
  RegressionResult out;
  out.predictions = k_cross.values * sol.x;
  out.jitter = sol.jitter;
  out.rung = sol.rung;
  return out;
}

}  // namespace symsys
