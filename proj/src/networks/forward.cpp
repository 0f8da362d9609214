#include "symsys/networks/forward.hpp"

#include <cmath>
#include <stdexcept>

namespace symsys {
namespace {

using Index = Eigen::Index;
using ConstMap = Eigen::Map<const RowMatrix>;
using Strided = Eigen::Map<RowMatrix, 0, Eigen::OuterStride<>>;
using ConstStrided = Eigen::Map<const RowMatrix, 0, Eigen::OuterStride<>>;

/// Everything about the layer geometry that forward and backward share.
struct Geometry {
  Index m = 0;
  int d = 1;
  int taps = 1;
  std::vector<std::vector<int>> src;

  Geometry(const NetworkSpec& spec, Index batch) : m(batch), d(spec.grid.sites()) {
    if (spec.conv()) {
      src = spec.offset_sources();
      taps = static_cast<int>(src.size());
    }
  }
};

/// Patch matrix: row s·d + α, column block β holds x at site src[β][α] of image s.
RowMatrix im2col(const RowMatrix& x, const Geometry& g) {
  const Index fin = x.cols();
  RowMatrix cols(x.rows(), g.taps * fin);
  for (Index s = 0; s < g.m; ++s)
    for (int a = 0; a < g.d; ++a) {
      const Index row = s * g.d + a;
      for (int b = 0; b < g.taps; ++b) cols.row(row).segment(b * fin, fin) = x.row(s * g.d + g.src[b][a]);
    }
  return cols;
}

/// Adjoint of im2col.
void col2im_add(const RowMatrix& cols, const Geometry& g, RowMatrix& x) {
  const Index fin = x.cols();
  for (Index s = 0; s < g.m; ++s)
    for (int a = 0; a < g.d; ++a) {
      const Index row = s * g.d + a;
      for (int b = 0; b < g.taps; ++b) x.row(s * g.d + g.src[b][a]) += cols.row(row).segment(b * fin, fin);
    }
}

/// Rows α, α+d, α+2d, ... of a (m·d)×cols matrix.
ConstStrided site_rows(const RowMatrix& x, const Geometry& g, int site) {
  return ConstStrided(x.data() + site * x.cols(), g.m, x.cols(), Eigen::OuterStride<>(g.d * x.cols()));
}
Strided site_rows(RowMatrix& x, const Geometry& g, int site) {
  return Strided(x.data() + site * x.cols(), g.m, x.cols(), Eigen::OuterStride<>(g.d * x.cols()));
}

double layer_scale(const NetworkSpec& spec, const LayerParams& l) {
  // Rows of one weight block = taps·fan_in (conv) or fan_in (FCN).
  const auto& s = l.shape;
  const double fan = spec.kind == ModelKind::LCN ? static_cast<double>(s[1] * s[2])
                     : spec.conv()               ? static_cast<double>(s[0] * s[1])
                                                 : static_cast<double>(s[0]);
  return spec.sigma_w() / std::sqrt(fan);
}

RowMatrix hidden_forward(const NetworkSpec& spec, const Geometry& g, const LayerParams& l, const RowMatrix& x) {
  const double scale = layer_scale(spec, l);
  const double sb = spec.sigma_b();
  const Index fout = l.shape.back();
  RowMatrix h;
  if (spec.kind == ModelKind::FCN) {
    h.noalias() = x * ConstMap(l.weight.data(), x.cols(), fout);
    h *= scale;
    if (spec.bias) h.rowwise() += sb * l.bias.transpose();
  } else if (spec.kind == ModelKind::LCN) {
    const RowMatrix cols = im2col(x, g);
    const Index rows = cols.cols();
    h.resize(x.rows(), fout);
    for (int a = 0; a < g.d; ++a) {
      Strided out = site_rows(h, g, a);
      out.noalias() = site_rows(cols, g, a) * ConstMap(l.weight.data() + a * rows * fout, rows, fout);
      out *= scale;
      if (spec.bias) out.rowwise() += sb * l.bias.segment(a * fout, fout).transpose();
    }
  } else {
    const RowMatrix cols = im2col(x, g);
    h.noalias() = cols * ConstMap(l.weight.data(), cols.cols(), fout);
    h *= scale;
    if (spec.bias) h.rowwise() += sb * l.bias.transpose();
  }
  return h;
}

RowMatrix pool_features(const NetworkSpec& spec, const Geometry& g, const RowMatrix& x) {
  const Index n = x.cols();
  switch (spec.kind) {
    case ModelKind::FCN: return x;
    case ModelKind::VEC:
    case ModelKind::LCN: return ConstMap(x.data(), g.m, g.d * n);
    case ModelKind::GAP: {
      RowMatrix f = RowMatrix::Zero(g.m, n);
      for (Index s = 0; s < g.m; ++s)
        for (int a = 0; a < g.d; ++a) f.row(s) += x.row(s * g.d + a);
      f *= 1.0 / g.d;
      return f;
    }
    case ModelKind::LAP: {
      const auto window = spec.pool_assignment();
      const int count = spec.pool_count();
      RowMatrix f = RowMatrix::Zero(g.m, count * n);
      for (Index s = 0; s < g.m; ++s)
        for (int a = 0; a < g.d; ++a) f.row(s).segment(window[a] * n, n) += x.row(s * g.d + a);
      f *= 1.0 / (spec.pool_window * spec.pool_window);
      return f;
    }
  }
  return x;
}

/// Adjoint of pool_features.
RowMatrix unpool(const NetworkSpec& spec, const Geometry& g, const RowMatrix& df, Index n) {
  switch (spec.kind) {
    case ModelKind::FCN: return df;
    case ModelKind::VEC:
    case ModelKind::LCN: return ConstMap(df.data(), g.m * g.d, n);
    case ModelKind::GAP: {
      RowMatrix dx(g.m * g.d, n);
      const double inv = 1.0 / g.d;
      for (Index s = 0; s < g.m; ++s)
        for (int a = 0; a < g.d; ++a) dx.row(s * g.d + a) = inv * df.row(s);
      return dx;
    }
    case ModelKind::LAP: {
      const auto window = spec.pool_assignment();
      RowMatrix dx(g.m * g.d, n);
      const double inv = 1.0 / (spec.pool_window * spec.pool_window);
      for (Index s = 0; s < g.m; ++s)
        for (int a = 0; a < g.d; ++a) dx.row(s * g.d + a) = inv * df.row(s).segment(window[a] * n, n);
      return dx;
    }
  }
  return df;
}

RowMatrix input_layout(const NetworkSpec& spec, const ImageBatch& batch) {
  if (!(batch.grid == spec.grid)) throw std::invalid_argument("forward: batch grid does not match " + spec.name());
  if (spec.kind == ModelKind::FCN) return batch.values;
  return ConstMap(batch.values.data(), batch.size() * spec.grid.sites(), spec.grid.channels);
}

}  // namespace

RowMatrix forward(const NetworkSpec& spec, const ParamSet& params, const ImageBatch& batch, ForwardTrace* trace) {
  check_params(spec, params);
  const Geometry g(spec, batch.size());
  RowMatrix x = input_layout(spec, batch);
  if (trace) {
    trace->batch = batch.size();
    trace->input = x;
    trace->pre.clear();
    trace->post.clear();
  }
  for (int l = 0; l < spec.depth; ++l) {
    RowMatrix h = hidden_forward(spec, g, params.layers[static_cast<std::size_t>(l)], x);
    x = h.cwiseMax(0.0);
    if (trace) {
      trace->pre.push_back(std::move(h));
      trace->post.push_back(x);
    }
  }
  const LayerParams& out = params.layers.back();
  RowMatrix f = pool_features(spec, g, x);
  RowMatrix logits;
  logits.noalias() = f * ConstMap(out.weight.data(), f.cols(), spec.outputs);
  logits *= spec.sigma_w() / std::sqrt(static_cast<double>(f.cols()));
  if (spec.bias) logits.rowwise() += spec.sigma_b() * out.bias.transpose();
  if (trace) trace->features = std::move(f);
  return logits;
}

RowMatrix predict(const NetworkSpec& spec, const ParamSet& params, const ImageBatch& batch, Index chunk) {
  if (chunk < 1) throw std::invalid_argument("predict: chunk must be positive");
  RowMatrix out(batch.size(), spec.outputs);
  for (Index start = 0; start < batch.size(); start += chunk) {
    const Index count = std::min(chunk, batch.size() - start);
    const ImageBatch part(batch.grid, batch.values.middleRows(start, count));
    out.middleRows(start, count) = forward(spec, params, part);
  }
  return out;
}

ParamSet backward(const NetworkSpec& spec, const ParamSet& params, const ForwardTrace& trace, const RowMatrix& cotangent) {
  check_params(spec, params);
  if (trace.pre.size() != static_cast<std::size_t>(spec.depth) || trace.features.rows() != trace.batch)
    throw std::invalid_argument("backward: trace missing or from another network");
  if (cotangent.rows() != trace.batch || cotangent.cols() != spec.outputs)
    throw std::invalid_argument("backward: cotangent shape does not match the logits");

  const Geometry g(spec, trace.batch);
  ParamSet grad = params.zeros_like();
  const double sb = spec.sigma_b();

  // Readout.
  const LayerParams& out = params.layers.back();
  const Index fan = trace.features.cols();
  const double out_scale = spec.sigma_w() / std::sqrt(static_cast<double>(fan));
  const ConstMap w_out(out.weight.data(), fan, spec.outputs);
  {
    Eigen::Map<RowMatrix> dw(grad.layers.back().weight.data(), fan, spec.outputs);
    dw.noalias() = out_scale * trace.features.transpose() * cotangent;
    if (spec.bias) grad.layers.back().bias = sb * cotangent.colwise().sum().transpose();
  }
  RowMatrix df;
  df.noalias() = out_scale * cotangent * w_out.transpose();
  RowMatrix dx = unpool(spec, g, df, trace.post.back().cols());

  for (int l = spec.depth - 1; l >= 0; --l) {
    const auto li = static_cast<std::size_t>(l);
    const LayerParams& p = params.layers[li];
    LayerParams& gp = grad.layers[li];
    const RowMatrix& x_in = l == 0 ? trace.input : trace.post[li - 1];
    const RowMatrix dh = (trace.pre[li].array() > 0.0).select(dx, 0.0);
    const double scale = layer_scale(spec, p);
    const Index fout = p.shape.back();
    const bool need_dx = l > 0;

    if (spec.kind == ModelKind::FCN) {
      const ConstMap w(p.weight.data(), x_in.cols(), fout);
      Eigen::Map<RowMatrix>(gp.weight.data(), x_in.cols(), fout).noalias() = scale * x_in.transpose() * dh;
      if (spec.bias) gp.bias = sb * dh.colwise().sum().transpose();
      if (need_dx) dx.noalias() = scale * dh * w.transpose();
      continue;
    }

    const RowMatrix cols = im2col(x_in, g);
    const Index rows = cols.cols();
    RowMatrix dcols;
    if (spec.kind == ModelKind::LCN) {
      if (need_dx) dcols.resize(cols.rows(), rows);
      for (int a = 0; a < g.d; ++a) {
        const ConstStrided dh_a = site_rows(dh, g, a);
        const ConstMap w(p.weight.data() + a * rows * fout, rows, fout);
        Eigen::Map<RowMatrix>(gp.weight.data() + a * rows * fout, rows, fout).noalias() =
            scale * site_rows(cols, g, a).transpose() * dh_a;
        if (spec.bias) gp.bias.segment(a * fout, fout) = sb * dh_a.colwise().sum().transpose();
        if (need_dx) site_rows(dcols, g, a).noalias() = scale * dh_a * w.transpose();
      }
    } else {
      const ConstMap w(p.weight.data(), rows, fout);
      Eigen::Map<RowMatrix>(gp.weight.data(), rows, fout).noalias() = scale * cols.transpose() * dh;
      if (spec.bias) gp.bias = sb * dh.colwise().sum().transpose();
      if (need_dx) dcols.noalias() = scale * dh * w.transpose();
    }
    if (need_dx) {
      dx = RowMatrix::Zero(x_in.rows(), x_in.cols());
      col2im_add(dcols, g, dx);
    }
  }
  return grad;
}

}  // namespace symsys
