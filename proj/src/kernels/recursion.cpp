#include "symsys/kernels/recursion.hpp"

#include <cmath>
#include <stdexcept>

#include "symsys/kernels/dual.hpp"

namespace symsys {

std::string_view to_string(KernelFlavor flavor) { return flavor == KernelFlavor::NNGP ? "NNGP" : "NTK"; }

KernelFlavor parse_kernel_flavor(std::string_view name) {
  if (name == "NNGP" || name == "nngp") return KernelFlavor::NNGP;
  if (name == "NTK" || name == "ntk") return KernelFlavor::NTK;
  throw std::invalid_argument("unknown kernel flavor '" + std::string(name) + "'");
}

KernelRecursion::KernelRecursion(const NetworkSpec& spec) : spec_(spec), d_(spec.grid.sites()) {
  spec_.validate();
  bias2_ = spec_.bias ? spec_.sigma_b2 : 0.0;
  if (!spec_.conv()) {
    scale_ = spec_.sigma_w2;
    return;
  }
  const SpatialGrid& g = spec_.grid;
  const auto offsets = spec_.offsets();
  scale_ = spec_.sigma_w2 / static_cast<double>(offsets.size());

  partner_.resize(static_cast<std::size_t>(d_) * static_cast<std::size_t>(d_));
  for (int a = 0; a < d_; ++a)
    for (int dh = 0; dh < g.height; ++dh)
      for (int dw = 0; dw < g.width; ++dw)
        partner_[static_cast<std::size_t>(a * d_ + g.site(dh, dw))] = g.shifted(a, dh, dw);

  // The square window factorizes into a pass along w and a pass along h.
  for (const auto& [dh, dw] : offsets) {
    std::vector<int> moved(static_cast<std::size_t>(d_));
    if (dh == offsets.front().first) {
      for (int a = 0; a < d_; ++a) moved[static_cast<std::size_t>(a)] = g.shifted(a, 0, dw);
      step_w_.push_back(moved);
    }
    if (dw == offsets.front().second) {
      for (int a = 0; a < d_; ++a) moved[static_cast<std::size_t>(a)] = g.shifted(a, dh, 0);
      step_h_.push_back(moved);
    }
  }

  if (spec_.kind == ModelKind::LAP) {
    const auto window = spec_.pool_assignment();
    for (int a = 0; a < d_; ++a)
      for (int r = 0; r < d_; ++r)
        if (window[static_cast<std::size_t>(a)] == window[static_cast<std::size_t>(partner_[static_cast<std::size_t>(a * d_ + r)])])
          window_pairs_.push_back(a * d_ + r);
  }
}

namespace {

void push_roots(KernelRecursion::Input& in, const Vector& self) {
  in.self.push_back(self);
  in.root.push_back(self.cwiseSqrt());
  in.inv_root.push_back(self.unaryExpr([](double v) { return v > 0.0 ? 1.0 / std::sqrt(v) : 0.0; }));
}

// ⟨x_α, y_α'⟩/C, shared by the full and diagonal paths so their Σ⁰ agree bitwise.
inline double pixel_dot(const double* x, const double* y, int c) {
  double s = 0.0;
  for (int i = 0; i < c; ++i) s += x[i] * y[i];
  return s / c;
}

// An input paired with itself has cos θ = 1 on its diagonal. acos is badly
// conditioned there (an ulp in cos θ moves θ by ~1e-8), so those entries take
// the exact duals V = k/2, V̇ = 1/2 instead.
inline bool same_input(const KernelRecursion::Input& x, const KernelRecursion::Input& y) {
  return &x == &y || x.pixels == y.pixels;
}

}  // namespace

// Per-thread buffers so Gram assembly does not allocate per pair.
struct KernelRecursion::Scratch {
  Array k, theta, norm, inv, v, vdot, next, carried, tmp;
};

KernelRecursion::Input KernelRecursion::prepare(const double* image) const {
  const SpatialGrid& g = spec_.grid;
  const int c = g.channels;
  Input in;
  if (!spec_.conv()) {
    in.pixels = Eigen::Map<const RowMatrix>(image, 1, g.features());
    double s = spec_.sigma_w2 * in.pixels.squaredNorm() / g.features() + bias2_;
    for (int l = 0; l < spec_.depth; ++l) {
      push_roots(in, Vector::Constant(1, s));
      s = spec_.sigma_w2 * 0.5 * s + bias2_;
    }
    return in;
  }
  in.pixels = Eigen::Map<const RowMatrix>(image, d_, c);
  Array s = in.pixels.rowwise().squaredNorm().array() / c;
  Array next(d_);
  for (int l = 0; l < spec_.depth; ++l) {
    aggregate_diag(s, next);
    next += bias2_;
    push_roots(in, next.matrix());
    s = 0.5 * next;  // V(a, a, a) = a/2
  }
  return in;
}

void KernelRecursion::aggregate(const Array& m, Array& out, Array& tmp) const {
  const std::size_t d = static_cast<std::size_t>(d_);
  tmp.setZero(m.size());
  out.setZero(m.size());
  for (std::size_t a = 0; a < d; ++a) {
    double* o = tmp.data() + a * d;
    for (const auto& step : step_w_) {
      const double* src = m.data() + static_cast<std::size_t>(step[a]) * d;
      for (std::size_t r = 0; r < d; ++r) o[r] += src[r];
    }
  }
  for (std::size_t a = 0; a < d; ++a) {
    double* o = out.data() + a * d;
    for (const auto& step : step_h_) {
      const double* src = tmp.data() + static_cast<std::size_t>(step[a]) * d;
      for (std::size_t r = 0; r < d; ++r) o[r] += src[r];
    }
  }
  out *= scale_;
}

void KernelRecursion::aggregate_diag(const Array& m, Array& out) const {
  Array tmp = Array::Zero(d_);
  for (const auto& step : step_w_)
    for (int a = 0; a < d_; ++a) tmp[a] += m[step[static_cast<std::size_t>(a)]];
  out.setZero(d_);
  for (const auto& step : step_h_)
    for (int a = 0; a < d_; ++a) out[a] += tmp[step[static_cast<std::size_t>(a)]];
  out *= scale_;
}

void KernelRecursion::norms(const Input& x, const Input& y, int layer, Scratch& s) const {
  const auto l = static_cast<std::size_t>(layer);
  const Vector &rx = x.root[l], &ry = y.root[l], &ix = x.inv_root[l], &iy = y.inv_root[l];
  const auto n = static_cast<Eigen::Index>(d_) * d_;
  s.norm.resize(n);
  s.inv.resize(n);
  for (int a = 0; a < d_; ++a)
    for (int r = 0; r < d_; ++r) {
      const int p = partner_[static_cast<std::size_t>(a * d_ + r)];
      s.norm[a * d_ + r] = rx[a] * ry[p];
      s.inv[a * d_ + r] = ix[a] * iy[p];
    }
}

void KernelRecursion::dual(const Input& x, const Input& y, int layer, Scratch& s) const {
  norms(x, y, layer, s);
  s.v.resize(s.k.size());
  s.vdot.resize(s.k.size());
  relu_dual(s.k.data(), s.norm.data(), s.inv.data(), s.v.data(), s.vdot.data(), static_cast<std::size_t>(s.k.size()));
  if (same_input(x, y))
    for (int a = 0; a < d_; ++a) {
      s.v[a * d_] = 0.5 * s.k[a * d_];
      s.vdot[a * d_] = 0.5;
    }
}

double KernelRecursion::pool(const Array& m) const {
  switch (spec_.kind) {
    case ModelKind::GAP: return m.sum() / (static_cast<double>(d_) * d_);
    case ModelKind::LAP: {
      double s = 0.0;
      for (const int k : window_pairs_) s += m[k];
      const double w2 = static_cast<double>(spec_.pool_window) * spec_.pool_window;
      return s / (spec_.pool_count() * w2 * w2);
    }
    default: {
      double s = 0.0;
      for (int a = 0; a < d_; ++a) s += m[a * d_];
      return s / d_;
    }
  }
}

void KernelRecursion::run_full(const Input& x, const Input& y, int layers, Scratch& s) const {
  const int c = spec_.grid.channels;
  Array& sigma0 = s.v;
  sigma0.resize(static_cast<Eigen::Index>(d_) * d_);
  for (int a = 0; a < d_; ++a)
    for (int r = 0; r < d_; ++r)
      sigma0[a * d_ + r] = pixel_dot(x.pixels.row(a).data(), y.pixels.row(partner_[static_cast<std::size_t>(a * d_ + r)]).data(), c);
  aggregate(sigma0, s.k, s.tmp);
  s.k += bias2_;
  s.theta = s.k;
  for (int l = 1; l < layers; ++l) {
    dual(x, y, l - 1, s);
    aggregate(s.v, s.next, s.tmp);
    s.next += bias2_;
    s.v = s.vdot * s.theta;
    aggregate(s.v, s.carried, s.tmp);
    s.theta = s.next + s.carried;
    s.k.swap(s.next);
  }
}

RowMatrix KernelRecursion::to_absolute(const Array& m) const {
  RowMatrix out(d_, d_);
  for (int a = 0; a < d_; ++a)
    for (int r = 0; r < d_; ++r) out(a, partner_[static_cast<std::size_t>(a * d_ + r)]) = m[a * d_ + r];
  return out;
}

PairValues KernelRecursion::fcn_pair(const Input& x, const Input& y) const {
  const double sw2 = spec_.sigma_w2;
  double k = sw2 * x.pixels.row(0).dot(y.pixels.row(0)) / spec_.grid.features() + bias2_;
  double theta = k;
  const bool same = same_input(x, y);
  for (int l = 0; l < spec_.depth; ++l) {
    const double a = x.self[static_cast<std::size_t>(l)][0], c = y.self[static_cast<std::size_t>(l)][0];
    const double next = sw2 * (same ? 0.5 * k : ReluDual::value(a, k, c)) + bias2_;
    theta = next + sw2 * (same ? 0.5 : ReluDual::derivative(a, k, c)) * theta;
    k = next;
  }
  return {k, theta};
}

PairValues KernelRecursion::diag_pair(const Input& x, const Input& y) const {
  Array k(d_), theta, v(d_), vdot(d_), next, carried, s0(d_);
  for (int a = 0; a < d_; ++a) s0[a] = pixel_dot(x.pixels.row(a).data(), y.pixels.row(a).data(), spec_.grid.channels);
  aggregate_diag(s0, k);
  k += bias2_;
  theta = k;
  const bool same = same_input(x, y);
  for (int l = 0; l < spec_.depth; ++l) {
    const auto li = static_cast<std::size_t>(l);
    if (same) {
      v = 0.5 * k;
      vdot.setConstant(0.5);
    } else {
      const Array norm = x.root[li].array() * y.root[li].array();
      const Array inv = x.inv_root[li].array() * y.inv_root[li].array();
      relu_dual(k.data(), norm.data(), inv.data(), v.data(), vdot.data(), static_cast<std::size_t>(d_));
    }
    if (l + 1 == spec_.depth) {
      const double nngp = spec_.sigma_w2 * v.mean() + bias2_;
      return {nngp, nngp + spec_.sigma_w2 * (vdot * theta).mean()};
    }
    aggregate_diag(v, next);
    next += bias2_;
    aggregate_diag(vdot * theta, carried);
    theta = next + carried;
    k.swap(next);
  }
  return {};
}

PairValues KernelRecursion::pair(const Input& x, const Input& y) const {
  switch (spec_.kind) {
    case ModelKind::FCN: return fcn_pair(x, y);
    case ModelKind::VEC:
    case ModelKind::LCN: return diag_pair(x, y);
    default: return pair_full(x, y);
  }
}

PairValues KernelRecursion::pair_full(const Input& x, const Input& y) const {
  if (!spec_.conv()) return fcn_pair(x, y);
  thread_local Scratch s;
  run_full(x, y, spec_.depth, s);
  dual(x, y, spec_.depth - 1, s);
  const double nngp = spec_.sigma_w2 * pool(s.v) + bias2_;
  s.v = s.vdot * s.theta;
  return {nngp, nngp + spec_.sigma_w2 * pool(s.v)};
}

PairKernel KernelRecursion::tensors(const Input& x, const Input& y, int layer) const {
  if (!spec_.conv()) throw std::invalid_argument("KernelRecursion::tensors: pixel tensors exist for conv kinds only");
  if (layer < 1 || layer > spec_.depth) throw std::invalid_argument("KernelRecursion::tensors: layer out of range");
  Scratch s;
  run_full(x, y, layer, s);
  PairKernel out;
  out.layer = layer;
  out.nngp = to_absolute(s.k);
  out.ntk = to_absolute(s.theta);
  out.self_x = x.self[static_cast<std::size_t>(layer - 1)];
  out.self_y = y.self[static_cast<std::size_t>(layer - 1)];
  return out;
}

}  // namespace symsys
