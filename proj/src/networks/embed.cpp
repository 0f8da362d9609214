#include "symsys/networks/embed.hpp"

#include <cmath>
#include <stdexcept>

namespace symsys {
namespace {

using Index = Eigen::Index;

ParamSet gap_to_vec(const NetworkSpec& src, const ParamSet& p, const NetworkSpec& dst) {
  ParamSet out = zero_params(dst);
  for (int l = 0; l < src.depth; ++l) out.layers[static_cast<std::size_t>(l)] = p.layers[static_cast<std::size_t>(l)];
  const Index d = src.grid.sites(), n = src.width, k = src.outputs;
  const double inv = 1.0 / std::sqrt(static_cast<double>(d));
  for (Index a = 0; a < d; ++a) out.layers.back().weight.segment(a * n * k, n * k) = inv * p.layers.back().weight;
  out.layers.back().bias = p.layers.back().bias;
  return out;
}

ParamSet vec_to_lcn(const NetworkSpec& src, const ParamSet& p, const NetworkSpec& dst) {
  ParamSet out = zero_params(dst);
  const Index d = src.grid.sites(), n = src.width;
  for (int l = 0; l < src.depth; ++l) {
    const auto li = static_cast<std::size_t>(l);
    const Vector& w = p.layers[li].weight;
    for (Index a = 0; a < d; ++a) {
      out.layers[li].weight.segment(a * w.size(), w.size()) = w;
      if (src.bias) out.layers[li].bias.segment(a * n, n) = p.layers[li].bias;
    }
  }
  out.layers.back() = p.layers.back();
  return out;
}

/// Shared bookkeeping for the two LCN_n → width-dn constructions. `place`
/// receives (layer, site α, offset β, input index i, output index j, value).
template <typename Place>
void for_each_lcn_weight(const NetworkSpec& src, const ParamSet& p, Place place) {
  const auto sources = src.offset_sources();
  const Index d = src.grid.sites(), taps = static_cast<Index>(sources.size());
  for (int l = 0; l < src.depth; ++l) {
    const auto& layer = p.layers[static_cast<std::size_t>(l)];
    const Index fin = layer.shape[2], fout = layer.shape[3];
    for (Index a = 0; a < d; ++a)
      for (Index b = 0; b < taps; ++b)
        for (Index i = 0; i < fin; ++i)
          for (Index j = 0; j < fout; ++j)
            place(l, a, b, sources[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)], i, j,
                  layer.weight[((a * taps + b) * fin + i) * fout + j]);
  }
}

ParamSet lcn_to_vec(const NetworkSpec& src, const ParamSet& p, const NetworkSpec& dst) {
  ParamSet out = zero_params(dst);
  const Index d = src.grid.sites(), n = src.width, wide = dst.width, k = src.outputs;
  const double root_d = std::sqrt(static_cast<double>(d));
  // Site α of the LCN is channel band [αn, αn+n) of the wide VEC. Bands other
  // than a site's own carry values that no later layer reads.
  for_each_lcn_weight(src, p, [&](int l, Index a, Index b, int source, Index i, Index j, double v) {
    auto& w = out.layers[static_cast<std::size_t>(l)];
    const Index fin = w.shape[1];
    const Index row = l == 0 ? i : source * n + i;
    w.weight[(b * fin + row) * wide + a * n + j] = l == 0 ? v : root_d * v;
  });
  for (int l = 0; l < src.depth && src.bias; ++l)
    out.layers[static_cast<std::size_t>(l)].bias = p.layers[static_cast<std::size_t>(l)].bias;
  const Vector& w = p.layers.back().weight;
  Vector& wt = out.layers.back().weight;
  for (Index a = 0; a < d; ++a)
    for (Index i = 0; i < n; ++i)
      wt.segment((a * wide + a * n + i) * k, k) = root_d * w.segment((a * n + i) * k, k);
  out.layers.back().bias = p.layers.back().bias;
  return out;
}

ParamSet lcn_to_fcn(const NetworkSpec& src, const ParamSet& p, const NetworkSpec& dst) {
  ParamSet out = zero_params(dst);
  const Index d = src.grid.sites(), n = src.width, c = src.grid.channels, wide = dst.width;
  const double taps = static_cast<double>(src.offsets().size());
  // Dense fan-in is d/taps times the local one.
  const double rescale = std::sqrt(static_cast<double>(d) / taps);
  for_each_lcn_weight(src, p, [&](int l, Index a, Index, int source, Index i, Index j, double v) {
    auto& w = out.layers[static_cast<std::size_t>(l)];
    const Index row = source * (l == 0 ? c : n) + i;
    // Offsets that wrap onto the same source site share one dense entry.
    w.weight[row * wide + a * n + j] += rescale * v;
  });
  for (int l = 0; l < src.depth && src.bias; ++l)
    out.layers[static_cast<std::size_t>(l)].bias = p.layers[static_cast<std::size_t>(l)].bias;
  out.layers.back() = p.layers.back();
  return out;
}

}  // namespace

std::pair<NetworkSpec, ParamSet> embed(const NetworkSpec& source, const ParamSet& params, ModelKind target) {
  check_params(source, params);
  NetworkSpec dst = source;
  dst.kind = target;
  const auto pair = std::string(to_string(source.kind)) + " -> " + std::string(to_string(target));
  if (source.kind == ModelKind::GAP && target == ModelKind::VEC) return {dst, gap_to_vec(source, params, dst)};
  if (source.kind == ModelKind::VEC && target == ModelKind::LCN) return {dst, vec_to_lcn(source, params, dst)};
  if (source.kind == ModelKind::LCN && (target == ModelKind::VEC || target == ModelKind::FCN)) {
    dst.width = source.width * source.grid.sites();
    return {dst, target == ModelKind::VEC ? lcn_to_vec(source, params, dst) : lcn_to_fcn(source, params, dst)};
  }
  throw std::invalid_argument("embed: unsupported pair " + pair);
}

}  // namespace symsys
