#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "symsys/data/dataset.hpp"

namespace symsys {

/// The five transformation families, ordered by inclusion of the rotation chain
/// I ≤ O(3)⊗I_d ≤ O(3)^d ≤ O(3d); P(3d) sits beside O(3d).
enum class GroupTag {
  Identity,             ///< I
  SharedPixelRotation,  ///< O(3)⊗I_d: one 3×3 Q for every site
  PixelwiseRotation,    ///< O(3)^d: an independent Q_α per site
  GlobalRotation,       ///< O(3d): one Q on the flattened image
  GlobalPermutation,    ///< P(3d): permutation of the flattened coordinates
};

inline constexpr GroupTag kAllGroupTags[] = {GroupTag::Identity, GroupTag::SharedPixelRotation,
                                             GroupTag::PixelwiseRotation, GroupTag::GlobalPermutation,
                                             GroupTag::GlobalRotation};

std::string_view to_string(GroupTag tag);
/// Accepts the short names ("I", "O3xI", "O3^d", "P3d", "O3d") and the enum spellings.
GroupTag parse_group_tag(std::string_view name);

struct GroupElement {
  GroupTag tag = GroupTag::Identity;
  /// monostate for Identity; one OrthoMatrix(3) for shared; d of them for
  /// pixelwise; OrthoMatrix(C·d) for global; perm for permutation, where the
  /// permuted image has entry i equal to entry perm[i] of the input.
  std::variant<std::monostate, OrthoMatrix, std::vector<OrthoMatrix>, std::vector<int>> payload;

  static GroupElement identity() { return {}; }
  GroupElement inverse() const;
  std::string descriptor() const;
  /// Throws when the payload does not fit `grid`.
  void check(const SpatialGrid& grid) const;
};

GroupElement sample_group(Rng& rng, GroupTag tag, const SpatialGrid& grid);

ImageBatch apply_group(const GroupElement& g, const ImageBatch& batch);
/// Transforms the inputs of both splits; labels are copied unchanged.
Dataset apply_group(const GroupElement& g, const Dataset& ds);

/// Re-expresses a shared rotation as a pixelwise one with equal blocks.
GroupElement as_pixelwise(const GroupElement& g, const SpatialGrid& grid);
/// Re-expresses any rotation or permutation as a dense O(C·d) element.
GroupElement as_global(const GroupElement& g, const SpatialGrid& grid);

/// Point τ_t = exp(-tA) on a path in O(3)^d from the identity (t = 0) to τ_1.
/// The d skew matrices come from a copy of `rng`, so a fixed rng traces one path.
GroupElement rotation_path(const Rng& rng, const SpatialGrid& grid, double t, double scale = 1.0);

}  // namespace symsys
