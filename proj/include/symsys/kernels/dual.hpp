#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace symsys {

/// ReLU arc-cosine duals on a covariance triple (a, b, c) = (Var u, Cov(u, v), Var v):
///   V(a, b, c) = E[φ(u)φ(v)]  = √(ac)/(2π)·(sin θ + (π - θ)cos θ)
///   V̇(a, b, c) = E[φ'(u)φ'(v)] = (π - θ)/(2π)
/// with cos θ = clamp(b/√(ac), -1, 1).
struct ReluDual {
  static double value(double a, double b, double c);
  static double derivative(double a, double b, double c);
};

/// Elementwise duals for covariances `k` given norms √(a·c) and their
/// reciprocals (0 where the norm vanishes, which reads as cos θ = 0). Uses a
/// rational arcsine accurate to a few ulps so the loop vectorizes; `ReluDual`
/// is the std::acos reference. `vdot` may be null.
void relu_dual(const double* k, const double* norm, const double* inv_norm, double* v, double* vdot, std::size_t n);

/// arccos on [-1, 1], same rational approximation as `relu_dual`.
Eigen::ArrayXd fast_acos(const Eigen::ArrayXd& x);

}  // namespace symsys
