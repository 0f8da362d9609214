#pragma once

#include <optional>

#include "symsys/data/groups.hpp"
#include "symsys/kernels/gram.hpp"

namespace symsys {

/// Largest group of the rotation chain I ≤ O(3)⊗I_d ≤ O(3)^d ≤ O(3d) under
/// which the infinite-width kernel of `kind` is invariant.
GroupTag licensed_kernel_group(ModelKind kind);
/// Next group up the chain, if any.
std::optional<GroupTag> next_larger_group(GroupTag tag);

struct InvarianceReport {
  GroupTag matched = GroupTag::Identity;
  double matched_deviation = 0.0;
  std::optional<GroupTag> mismatched;         ///< empty for FCN
  std::optional<double> mismatched_deviation;
};

/// Relative Frobenius deviation ‖K(τX, τX) - K(X, X)‖/‖K(X, X)‖ for one τ drawn
/// from the licensed group and one from the next larger group.
InvarianceReport kernel_invariance_check(const NetworkSpec& spec, Rng& rng, const ImageBatch& x, KernelFlavor flavor,
                                         const GramOptions& options = {});

double relative_frobenius(const Matrix& a, const Matrix& reference);

}  // namespace symsys
