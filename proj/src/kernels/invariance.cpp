#include "symsys/kernels/invariance.hpp"

#include <stdexcept>

namespace symsys {

GroupTag licensed_kernel_group(ModelKind kind) {
  switch (kind) {
    case ModelKind::FCN: return GroupTag::GlobalRotation;
    case ModelKind::LCN:
    case ModelKind::VEC: return GroupTag::PixelwiseRotation;
    default: return GroupTag::SharedPixelRotation;
  }
}

std::optional<GroupTag> next_larger_group(GroupTag tag) {
  switch (tag) {
    case GroupTag::Identity: return GroupTag::SharedPixelRotation;
    case GroupTag::SharedPixelRotation: return GroupTag::PixelwiseRotation;
    case GroupTag::PixelwiseRotation: return GroupTag::GlobalRotation;
    default: return std::nullopt;
  }
}

double relative_frobenius(const Matrix& a, const Matrix& reference) {
  const double norm = reference.norm();
  if (norm == 0.0) throw std::invalid_argument("relative_frobenius: zero reference");
  return (a - reference).norm() / norm;
}

InvarianceReport kernel_invariance_check(const NetworkSpec& spec, Rng& rng, const ImageBatch& x, KernelFlavor flavor,
                                         const GramOptions& options) {
  if (x.size() < 8) throw std::invalid_argument("kernel_invariance_check: need at least 8 inputs");
  const Matrix base = kernel_matrices(spec, x, nullptr, options).get(flavor).values;
  auto deviation = [&](GroupTag tag) {
    const GroupElement g = sample_group(rng, tag, spec.grid);
    const ImageBatch moved = apply_group(g, x);
    return relative_frobenius(kernel_matrices(spec, moved, nullptr, options).get(flavor).values, base);
  };
  InvarianceReport r;
  r.matched = licensed_kernel_group(spec.kind);
  r.matched_deviation = deviation(r.matched);
  r.mismatched = next_larger_group(r.matched);
  if (r.mismatched) r.mismatched_deviation = deviation(*r.mismatched);
  return r;
}

}  // namespace symsys
