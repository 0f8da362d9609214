#include "symsys/data/groups.hpp"

#include <stdexcept>

namespace symsys {

std::string_view to_string(GroupTag tag) {
  switch (tag) {
    case GroupTag::Identity: return "I";
    case GroupTag::SharedPixelRotation: return "O3xI";
    case GroupTag::PixelwiseRotation: return "O3^d";
    case GroupTag::GlobalRotation: return "O3d";
    case GroupTag::GlobalPermutation: return "P3d";
  }
  return "?";
}

GroupTag parse_group_tag(std::string_view name) {
  if (name == "I" || name == "Identity" || name == "identity") return GroupTag::Identity;
  if (name == "O3xI" || name == "SharedPixelRotation") return GroupTag::SharedPixelRotation;
  if (name == "O3^d" || name == "PixelwiseRotation") return GroupTag::PixelwiseRotation;
  if (name == "O3d" || name == "GlobalRotation") return GroupTag::GlobalRotation;
  if (name == "P3d" || name == "GlobalPermutation") return GroupTag::GlobalPermutation;
  throw std::invalid_argument("unknown group tag '" + std::string(name) + "'");
}

GroupElement GroupElement::inverse() const {
  GroupElement out{tag, {}};
  switch (tag) {
    case GroupTag::Identity: break;
    case GroupTag::SharedPixelRotation:
    case GroupTag::GlobalRotation: out.payload = std::get<OrthoMatrix>(payload).transpose(); break;
    case GroupTag::PixelwiseRotation: {
      std::vector<OrthoMatrix> blocks;
      for (const auto& q : std::get<std::vector<OrthoMatrix>>(payload)) blocks.push_back(q.transpose());
      out.payload = std::move(blocks);
      break;
    }
    case GroupTag::GlobalPermutation: {
      const auto& perm = std::get<std::vector<int>>(payload);
      std::vector<int> inv(perm.size());
      for (std::size_t i = 0; i < perm.size(); ++i) inv[static_cast<std::size_t>(perm[i])] = static_cast<int>(i);
      out.payload = std::move(inv);
      break;
    }
  }
  return out;
}

std::string GroupElement::descriptor() const { return std::string(to_string(tag)); }

void GroupElement::check(const SpatialGrid& grid) const {
  auto fail = [&](const std::string& why) {
    throw std::invalid_argument("group element " + descriptor() + " does not fit grid: " + why);
  };
  switch (tag) {
    case GroupTag::Identity:
      if (!std::holds_alternative<std::monostate>(payload)) fail("identity carries a payload");
      break;
    case GroupTag::SharedPixelRotation:
      if (!std::holds_alternative<OrthoMatrix>(payload) || std::get<OrthoMatrix>(payload).dim() != grid.channels)
        fail("expected one channel-sized rotation");
      break;
    case GroupTag::PixelwiseRotation: {
      if (!std::holds_alternative<std::vector<OrthoMatrix>>(payload)) fail("expected per-site rotations");
      const auto& blocks = std::get<std::vector<OrthoMatrix>>(payload);
      if (static_cast<int>(blocks.size()) != grid.sites()) fail("block count differs from site count");
      for (const auto& q : blocks)
        if (q.dim() != grid.channels) fail("block size differs from channel count");
      break;
    }
    case GroupTag::GlobalRotation:
      if (!std::holds_alternative<OrthoMatrix>(payload) || std::get<OrthoMatrix>(payload).dim() != grid.features())
        fail("expected a rotation of the flattened image");
      break;
    case GroupTag::GlobalPermutation:
      if (!std::holds_alternative<std::vector<int>>(payload) ||
          static_cast<int>(std::get<std::vector<int>>(payload).size()) != grid.features())
        fail("expected a permutation of the flattened image");
      break;
  }
}

GroupElement sample_group(Rng& rng, GroupTag tag, const SpatialGrid& grid) {
  grid.validate();
  const bool rotation = tag == GroupTag::SharedPixelRotation || tag == GroupTag::PixelwiseRotation ||
                        tag == GroupTag::GlobalRotation;
  if (rotation && grid.channels != 3)
    throw std::invalid_argument("sample_group: rotation groups act on 3-channel pixels, grid has " +
                                std::to_string(grid.channels));
  GroupElement g{tag, {}};
  switch (tag) {
    case GroupTag::Identity: break;
    case GroupTag::SharedPixelRotation: g.payload = haar_orthogonal(rng, 3); break;
    case GroupTag::PixelwiseRotation: {
      std::vector<OrthoMatrix> blocks;
      blocks.reserve(static_cast<std::size_t>(grid.sites()));
      for (int s = 0; s < grid.sites(); ++s) blocks.push_back(haar_orthogonal(rng, 3));
      g.payload = std::move(blocks);
      break;
    }
    case GroupTag::GlobalRotation: g.payload = haar_orthogonal(rng, grid.features()); break;
    case GroupTag::GlobalPermutation: g.payload = random_permutation(rng, grid.features()); break;
  }
  return g;
}

ImageBatch apply_group(const GroupElement& g, const ImageBatch& batch) {
  g.check(batch.grid);
  const SpatialGrid& grid = batch.grid;
  const int c = grid.channels;
  const Eigen::Index m = batch.size();
  switch (g.tag) {
    case GroupTag::Identity: return batch;
    case GroupTag::SharedPixelRotation: {
      // Rows of the (m·d)×C view are pixel vectors; x ↦ Qx is row ↦ row·Qᵀ.
      RowMatrix out(m, batch.values.cols());
      Eigen::Map<const RowMatrix> in_px(batch.values.data(), m * grid.sites(), c);
      Eigen::Map<RowMatrix> out_px(out.data(), m * grid.sites(), c);
      out_px.noalias() = in_px * std::get<OrthoMatrix>(g.payload).matrix().transpose();
      return ImageBatch(grid, std::move(out));
    }
    case GroupTag::PixelwiseRotation: {
      RowMatrix out(m, batch.values.cols());
      const auto& blocks = std::get<std::vector<OrthoMatrix>>(g.payload);
      for (int s = 0; s < grid.sites(); ++s)
        out.middleCols(s * c, c).noalias() = batch.values.middleCols(s * c, c) * blocks[static_cast<std::size_t>(s)].matrix().transpose();
      return ImageBatch(grid, std::move(out));
    }
    case GroupTag::GlobalRotation: {
      RowMatrix out = batch.values * std::get<OrthoMatrix>(g.payload).matrix().transpose();
      return ImageBatch(grid, std::move(out));
    }
    case GroupTag::GlobalPermutation: {
      const auto& perm = std::get<std::vector<int>>(g.payload);
      RowMatrix out(m, batch.values.cols());
      for (std::size_t i = 0; i < perm.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = batch.values.col(perm[i]);
      return ImageBatch(grid, std::move(out));
    }
  }
  throw std::logic_error("apply_group: unhandled tag");
}

Dataset apply_group(const GroupElement& g, const Dataset& ds) {
  Dataset out = ds;
  out.train.x = apply_group(g, ds.train.x);
  out.test.x = apply_group(g, ds.test.x);
  out.provenance.group = g.descriptor();
  return out;
}

GroupElement as_pixelwise(const GroupElement& g, const SpatialGrid& grid) {
  g.check(grid);
  if (g.tag == GroupTag::PixelwiseRotation) return g;
  if (g.tag != GroupTag::SharedPixelRotation) throw std::invalid_argument("as_pixelwise: only shared rotations embed in O(3)^d");
  std::vector<OrthoMatrix> blocks(static_cast<std::size_t>(grid.sites()), std::get<OrthoMatrix>(g.payload));
  return {GroupTag::PixelwiseRotation, std::move(blocks)};
}

GroupElement as_global(const GroupElement& g, const SpatialGrid& grid) {
  g.check(grid);
  const int c = grid.channels;
  const int n = grid.features();
  Matrix q = Matrix::Zero(n, n);
  switch (g.tag) {
    case GroupTag::GlobalRotation: return g;
    case GroupTag::Identity: q.setIdentity(); break;
    case GroupTag::SharedPixelRotation:
      for (int s = 0; s < grid.sites(); ++s) q.block(s * c, s * c, c, c) = std::get<OrthoMatrix>(g.payload).matrix();
      break;
    case GroupTag::PixelwiseRotation:
      for (int s = 0; s < grid.sites(); ++s)
        q.block(s * c, s * c, c, c) = std::get<std::vector<OrthoMatrix>>(g.payload)[static_cast<std::size_t>(s)].matrix();
      break;
    case GroupTag::GlobalPermutation: {
      const auto& perm = std::get<std::vector<int>>(g.payload);
      for (int i = 0; i < n; ++i) q(i, perm[static_cast<std::size_t>(i)]) = 1.0;
      break;
    }
  }
  return {GroupTag::GlobalRotation, OrthoMatrix::from_matrix(std::move(q))};
}

GroupElement rotation_path(const Rng& rng, const SpatialGrid& grid, double t, double scale) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("rotation_path: t must lie in [0, 1]");
  if (grid.channels != 3) throw std::invalid_argument("rotation_path: grid must have 3 channels");
  Rng local = rng;
  std::vector<OrthoMatrix> blocks;
  blocks.reserve(static_cast<std::size_t>(grid.sites()));
  for (int s = 0; s < grid.sites(); ++s) blocks.push_back(SkewMatrix3::random(local, scale).exp_neg(t));
  return {GroupTag::PixelwiseRotation, std::move(blocks)};
}

}  // namespace symsys
