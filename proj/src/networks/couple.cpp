#include "symsys/networks/couple.hpp"

#include <stdexcept>

namespace symsys {

std::optional<std::string> coupling_violation(ModelKind kind, GroupTag tag, InitDist dist) {
  if (tag == GroupTag::Identity) return std::nullopt;
  const std::string pair = "(" + std::string(to_string(kind)) + ", " + std::string(to_string(tag)) + ")";
  if (tag == GroupTag::GlobalPermutation) {
    if (kind == ModelKind::FCN) return std::nullopt;
    return pair + ": permuting coordinates across sites breaks local connectivity";
  }
  if (dist != InitDist::Gaussian)
    return pair + ": rotation invariance of the first layer needs Gaussian (rotation-invariant) initialization";
  switch (kind) {
    case ModelKind::FCN: return std::nullopt;
    case ModelKind::LCN:
      if (tag == GroupTag::GlobalRotation) return pair + ": O(3d) mixes sites that a local layer keeps apart";
      return std::nullopt;
    default:
      if (tag == GroupTag::SharedPixelRotation) return std::nullopt;
      return pair + ": weight sharing across sites admits only one rotation for all pixels";
  }
}

ParamSet couple_params(const NetworkSpec& spec, const ParamSet& params, const GroupElement& g, InitDist dist) {
  check_params(spec, params);
  g.check(spec.grid);
  if (auto why = coupling_violation(spec.kind, g.tag, dist)) throw std::invalid_argument("couple_params: " + *why);
  ParamSet out = params;
  if (g.tag == GroupTag::Identity) return out;

  LayerParams& first = out.layers.front();
  const Eigen::Index c = spec.grid.channels;
  const Eigen::Index n = first.shape.back();

  if (spec.kind == ModelKind::FCN) {
    // Columns of the C·d × n weight are images; W ← G·W.
    const Eigen::Map<const RowMatrix> w(params.layers.front().weight.data(), spec.grid.features(), n);
    const ImageBatch filters(spec.grid, w.transpose());
    const RowMatrix moved = apply_group(g, filters).values.transpose();
    Eigen::Map<RowMatrix>(first.weight.data(), spec.grid.features(), n) = moved;
    return out;
  }

  // Conv kinds: every C×n block W_β (per site for LCN) becomes Q·W_β, where Q
  // is the rotation of the pixel the block reads.
  const auto src = spec.offset_sources();
  const auto taps = static_cast<Eigen::Index>(src.size());
  auto rotate = [&](Eigen::Index block, const Eigen::Matrix3d& q) {
    Eigen::Map<RowMatrix> w(first.weight.data() + block * c * n, c, n);
    const RowMatrix moved = q * w;
    w = moved;
  };
  if (g.tag == GroupTag::SharedPixelRotation) {
    const Eigen::Matrix3d q = std::get<OrthoMatrix>(g.payload).matrix();
    const Eigen::Index blocks = spec.kind == ModelKind::LCN ? spec.grid.sites() * taps : taps;
    for (Eigen::Index b = 0; b < blocks; ++b) rotate(b, q);
  } else {
    const auto& qs = std::get<std::vector<OrthoMatrix>>(g.payload);
    for (int a = 0; a < spec.grid.sites(); ++a)
      for (Eigen::Index b = 0; b < taps; ++b)
        rotate(a * taps + b, qs[static_cast<std::size_t>(src[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)])].matrix());
  }
  return out;
}

}  // namespace symsys
