#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "symsys/mathcore/rng.hpp"

namespace symsys {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Square matrix with orthonormal columns. Only the factories below and
/// `from_matrix` (which checks) can produce one.
class OrthoMatrix {
 public:
  static OrthoMatrix identity(int dim);
  /// Throws std::invalid_argument when max |QᵀQ - I| exceeds `tol`.
  static OrthoMatrix from_matrix(Matrix q, double tol = 1e-10);

  int dim() const { return static_cast<int>(q_.rows()); }
  const Matrix& matrix() const { return q_; }
  OrthoMatrix transpose() const { return OrthoMatrix(q_.transpose()); }
  /// max |QᵀQ - I|
  double orthogonality_error() const;

 private:
  explicit OrthoMatrix(Matrix q) : q_(std::move(q)) {}
  friend OrthoMatrix haar_orthogonal(Rng& rng, int dim);
  friend class SkewMatrix3;

  Matrix q_;
};

/// 3×3 skew-symmetric matrix built from its three free parameters:
/// [[0, -a2, a1], [a2, 0, -a0], [-a1, a0, 0]], i.e. the cross-product matrix of `axis`.
class SkewMatrix3 {
 public:
  explicit SkewMatrix3(std::array<double, 3> axis) : axis_(axis) {}
  static SkewMatrix3 random(Rng& rng, double scale);

  const std::array<double, 3>& axis() const { return axis_; }
  Eigen::Matrix3d matrix() const;

  /// exp(-t·A) via Rodrigues' formula; a rotation with determinant +1.
  OrthoMatrix exp_neg(double t) const;

 private:
  std::array<double, 3> axis_;
};

/// Haar-distributed element of O(dim): QR of a Gaussian matrix with the signs
/// of diag(R) folded into the columns of Q.
OrthoMatrix haar_orthogonal(Rng& rng, int dim);

/// Uniform permutation of [0, dim) by Fisher-Yates.
std::vector<int> random_permutation(Rng& rng, int dim);

inline OrthoMatrix skew_exp(const SkewMatrix3& a, double t) { return a.exp_neg(t); }

class SolverError : public std::runtime_error {
 public:
  SolverError(Eigen::Index dim, double jitter)
      : std::runtime_error("psd_solve: Cholesky failed for dimension " + std::to_string(dim) +
                           " at jitter " + std::to_string(jitter)),
        dim_(dim),
        jitter_(jitter) {}
  Eigen::Index dim() const { return dim_; }
  double jitter() const { return jitter_; }

 private:
  Eigen::Index dim_;
  double jitter_;
};

struct PsdSolution {
  Matrix x;
  double jitter = 0.0;
  int rung = 0;  ///< 0 is the ladder minimum
};

struct JitterLadder {
  double first = 1e-12;  ///< relative to trace(G)/dim
  double last = 1e-4;
  double factor = 10.0;
};

/// Solves (G + εI)X = B by Cholesky, escalating ε along the ladder until the
/// factorization succeeds and the relative residual is at most 1e-10.
PsdSolution psd_solve(const Matrix& g, const Matrix& b, const JitterLadder& ladder = {});

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last) : std::runtime_error(what), last_(last) {}
  double last_iterate() const { return last_; }

 private:
  double last_;
};

/// Power iteration from a fixed seeded start vector. Stops once the eigen-residual
/// ‖Gv - λv‖ falls below tol·λ.
double top_eigenvalue(const Matrix& g, double tol = 1e-6, int max_iterations = 200000);

}  // namespace symsys
