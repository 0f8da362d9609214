#include "symsys/mathcore/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace symsys {

OrthoMatrix OrthoMatrix::identity(int dim) {
  if (dim < 1) throw std::invalid_argument("OrthoMatrix::identity: dim must be positive");
  return OrthoMatrix(Matrix::Identity(dim, dim));
}

OrthoMatrix OrthoMatrix::from_matrix(Matrix q, double tol) {
  if (q.rows() != q.cols() || q.rows() == 0) throw std::invalid_argument("OrthoMatrix: matrix must be square");
  OrthoMatrix out(std::move(q));
  if (out.orthogonality_error() > tol) throw std::invalid_argument("OrthoMatrix: matrix is not orthogonal");
  return out;
}

double OrthoMatrix::orthogonality_error() const {
  const Matrix gram = q_.transpose() * q_;
  return (gram - Matrix::Identity(q_.rows(), q_.cols())).cwiseAbs().maxCoeff();
}

SkewMatrix3 SkewMatrix3::random(Rng& rng, double scale) {
  std::array<double, 3> axis{};
  for (double& a : axis) a = scale * rng.normal();
  return SkewMatrix3(axis);
}

Eigen::Matrix3d SkewMatrix3::matrix() const {
  Eigen::Matrix3d a;
  a << 0.0, -axis_[2], axis_[1],
       axis_[2], 0.0, -axis_[0],
       -axis_[1], axis_[0], 0.0;
  return a;
}

OrthoMatrix SkewMatrix3::exp_neg(double t) const {
  const Eigen::Matrix3d b = -t * matrix();
  const double theta = std::abs(t) * std::sqrt(axis_[0] * axis_[0] + axis_[1] * axis_[1] + axis_[2] * axis_[2]);
  double sinc, cosc;
  if (theta < 1e-4) {
    const double t2 = theta * theta;
    sinc = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
    cosc = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
  } else {
    sinc = std::sin(theta) / theta;
    cosc = (1.0 - std::cos(theta)) / (theta * theta);
  }
  Eigen::Matrix3d r = Eigen::Matrix3d::Identity() + sinc * b + cosc * (b * b);
  return OrthoMatrix(Matrix(r));
}

OrthoMatrix haar_orthogonal(Rng& rng, int dim) {
  if (dim < 1) throw std::invalid_argument("haar_orthogonal: dim must be positive");
  const Matrix z = gaussian_matrix(rng, dim, dim);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
  const Matrix& r = qr.matrixQR();
  for (int i = 0; i < dim; ++i)
    if (r(i, i) < 0.0) q.col(i) = -q.col(i);
  return OrthoMatrix(std::move(q));
}

std::vector<int> random_permutation(Rng& rng, int dim) {
  if (dim < 1) throw std::invalid_argument("random_permutation: dim must be positive");
  std::vector<int> perm(dim);
  for (int i = 0; i < dim; ++i) perm[i] = i;
  for (int i = dim - 1; i > 0; --i) {
    const auto j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

namespace {

double relative_residual(const Matrix& g, double jitter, const Matrix& x, const Matrix& b) {
  const Matrix r = g * x + jitter * x - b;
  const double scale = b.cwiseAbs().maxCoeff();
  return scale > 0.0 ? r.cwiseAbs().maxCoeff() / scale : r.cwiseAbs().maxCoeff();
}

}  // namespace

PsdSolution psd_solve(const Matrix& g, const Matrix& b, const JitterLadder& ladder) {
  if (g.rows() != g.cols()) throw std::invalid_argument("psd_solve: G must be square");
  if (b.rows() != g.rows()) throw std::invalid_argument("psd_solve: row count of B must equal dim(G)");
  const Eigen::Index n = g.rows();
  double base = g.trace() / static_cast<double>(n);
  if (!(base > 0.0)) base = 1.0;

  double jitter = ladder.first * base;
  const double stop = ladder.last * base * (1.0 + 1e-9);
  for (int rung = 0; jitter <= stop; ++rung, jitter *= ladder.factor) {
    Matrix shifted = g;
    shifted.diagonal().array() += jitter;
    Eigen::LLT<Matrix> llt(shifted);
    if (llt.info() != Eigen::Success) continue;
    Matrix x = llt.solve(b);
    // One step of iterative refinement.
    x += llt.solve(b - shifted * x);
    if (!x.allFinite()) continue;
    if (relative_residual(g, jitter, x, b) <= 1e-10) return {std::move(x), jitter, rung};
  }
  throw SolverError(n, jitter / ladder.factor);
}

double top_eigenvalue(const Matrix& g, double tol, int max_iterations) {
  if (g.rows() != g.cols() || g.rows() == 0) throw std::invalid_argument("top_eigenvalue: G must be square");
  Rng rng(0x70e16e5eedULL);
  Vector v = gaussian_matrix(rng, g.rows(), 1).col(0);
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    Vector gv = g * v;
    lambda = v.dot(gv);
    const double residual = (gv - lambda * v).norm();
    if (lambda > 0.0 && residual <= tol * lambda) return lambda;
    const double norm = gv.norm();
    if (!(norm > 0.0)) throw ConvergenceError("top_eigenvalue: matrix annihilates the iterate", lambda);
    v = gv / norm;
  }
  throw ConvergenceError("top_eigenvalue: no convergence within iteration cap", lambda);
}

}  // namespace symsys
