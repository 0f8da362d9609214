#include "symsys/kernels/dual.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace symsys {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInv2Pi = 1.0 / (2.0 * std::numbers::pi);

double cos_theta(double a, double b, double c) {
  const double norm = std::sqrt(a * c);
  if (norm == 0.0) return 0.0;
  return std::clamp(b / norm, -1.0, 1.0);
}

// asin(s) = s + s·z·P(z)/Q(z) with z = s², for 0 ≤ s ≤ 0.5 (Cephes asin.c).
inline double asin_core(double s, double z) {
  const double p = ((((4.253011369004428248960e-3 * z - 6.019598008014123785661e-1) * z + 5.444622390564711410273e0) * z -
                     1.626247967210700244449e1) * z + 1.956261983317594739197e1) * z - 8.198089802484824371615e0;
  const double q = ((((z - 1.474091372988853791896e1) * z + 7.049610280856842141659e1) * z - 1.471791292232726029859e2) * z +
                    1.395105614657485689735e2) * z - 4.918853881490881290097e1;
  return s + s * z * p / q;
}

// Branch-free so the callers' loops vectorize: both arms are computed, then blended.
inline double acos_inline(double x) {
  const double ax = std::fabs(x);
  const bool big = ax > 0.5;
  // |x| > 0.5: acos(|x|) = 2·asin(√((1 - |x|)/2)); otherwise acos(x) = π/2 - asin(x).
  const double zb = 0.5 * (1.0 - ax);
  const double sb = std::sqrt(zb);
  const double z = big ? zb : ax * ax;
  const double s = big ? sb : ax;
  const double r = asin_core(s, z);
  const double sr = x < 0.0 ? -r : r;
  const double wide = x < 0.0 ? kPi - 2.0 * r : 2.0 * r;
  return big ? wide : 0.5 * kPi - sr;
}

}  // namespace

double ReluDual::value(double a, double b, double c) {
  const double ct = cos_theta(a, b, c);
  const double theta = std::acos(ct);
  return std::sqrt(a * c) * kInv2Pi * (std::sin(theta) + (kPi - theta) * ct);
}

double ReluDual::derivative(double a, double b, double c) {
  return (kPi - std::acos(cos_theta(a, b, c))) * kInv2Pi;
}

Eigen::ArrayXd fast_acos(const Eigen::ArrayXd& x) {
  Eigen::ArrayXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = acos_inline(x[i]);
  return out;
}

namespace {

template <bool WithDerivative>
void relu_dual_loop(const double* k, const double* norm, const double* inv_norm, double* v, double* vdot,
                    std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ct = std::min(1.0, std::max(-1.0, k[i] * inv_norm[i]));
    const double rest = kPi - acos_inline(ct);
    v[i] = norm[i] * kInv2Pi * (std::sqrt(std::max(0.0, 1.0 - ct * ct)) + rest * ct);
    if constexpr (WithDerivative) vdot[i] = rest * kInv2Pi;
  }
}

}  // namespace

void relu_dual(const double* k, const double* norm, const double* inv_norm, double* v, double* vdot, std::size_t n) {
  if (vdot)
    relu_dual_loop<true>(k, norm, inv_norm, v, vdot, n);
  else
    relu_dual_loop<false>(k, norm, inv_norm, v, nullptr, n);
}

}  // namespace symsys
