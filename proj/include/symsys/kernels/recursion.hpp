#pragma once

#include <string_view>
#include <vector>

#include "symsys/networks/spec.hpp"

namespace symsys {

enum class KernelFlavor { NNGP, NTK };

std::string_view to_string(KernelFlavor flavor);
KernelFlavor parse_kernel_flavor(std::string_view name);

/// Readout-layer kernel values for one input pair.
struct PairValues {
  double nngp = 0.0;
  double ntk = 0.0;
  double get(KernelFlavor f) const { return f == KernelFlavor::NNGP ? nngp : ntk; }
};

/// Pixel-pair tensors after hidden layer `layer` (1-based).
struct PairKernel {
  int layer = 0;
  RowMatrix nngp;  ///< K(x, x')_{α,α'}, d×d
  RowMatrix ntk;   ///< Θ(x, x')_{α,α'}
  Vector self_x;   ///< K(x, x)_{α,α}
  Vector self_y;   ///< K(x', x')_{α,α}
};

/// Infinite-width NNGP/NTK recursion for one architecture. Per-input state
/// (pixels and self-diagonals for every layer) is computed once by `prepare`
/// and reused for all pairs.
///
/// Hidden layer 1:     K¹ = A(Σ⁰) + σ_b²,  Σ⁰_{αα'} = ⟨x_α, x'_α'⟩/C
/// Hidden layer l+1:   K^{l+1} = A(V(K^l)) + σ_b²,  Θ^{l+1} = K^{l+1} + A(V̇(K^l) ⊙ Θ^l)
/// where A(M)_{αα'} = σ_w²/|window| Σ_β M_{α+β, α'+β} on the torus. The readout
/// contracts σ_w²·V(K^L) (and σ_w²·V̇ ⊙ Θ^L) over the diagonal (VEC, LCN),
/// all pairs (GAP) or same-window pairs (LAP). FCN is the d = 1 case with
/// Σ⁰ = ⟨x, x'⟩/(C·d).
class KernelRecursion {
 public:
  struct Input {
    RowMatrix pixels;          ///< d×C (one row of C·d for FCN)
    std::vector<Vector> self;  ///< self[l] = diagonal of K^{l+1}(x, x)
    std::vector<Vector> root;      ///< √self[l]
    std::vector<Vector> inv_root;  ///< 1/√self[l], 0 where self vanishes
  };

  explicit KernelRecursion(const NetworkSpec& spec);

  const NetworkSpec& spec() const { return spec_; }
  Input prepare(const double* image) const;

  /// Fast path: VEC and LCN propagate only the diagonal band.
  PairValues pair(const Input& x, const Input& y) const;
  /// Full d×d recursion with the readout of spec().kind.
  PairValues pair_full(const Input& x, const Input& y) const;
  /// Full tensors after hidden layer `layer` ∈ [1, L] (conv kinds).
  PairKernel tensors(const Input& x, const Input& y, int layer) const;

 private:
  using Array = Eigen::ArrayXd;
  // Pair tensors are stored in relative coordinates: entry α·d + δ holds the
  // (α, α+δ) element. A joint shift of both sites keeps δ fixed, so the window
  // sum A becomes a box filter over contiguous d-blocks.
  struct Scratch;
  void aggregate(const Array& m, Array& out, Array& tmp) const;  // d² tensor
  void aggregate_diag(const Array& m, Array& out) const;         // diagonal band
  void norms(const Input& x, const Input& y, int layer, Scratch& s) const;
  void dual(const Input& x, const Input& y, int layer, Scratch& s) const;
  void run_full(const Input& x, const Input& y, int layers, Scratch& s) const;
  PairValues fcn_pair(const Input& x, const Input& y) const;
  PairValues diag_pair(const Input& x, const Input& y) const;
  double pool(const Array& m) const;
  RowMatrix to_absolute(const Array& m) const;

  NetworkSpec spec_;
  int d_;
  double scale_;   // σ_w²/|window|
  double bias2_;   // σ_b² (0 without biases)
  std::vector<int> partner_;                  // α·d + δ → site α+δ
  std::vector<std::vector<int>> step_w_, step_h_;  // per window step: α → neighbour
  std::vector<int> window_pairs_;             // LAP: relative indices of same-window pairs
};

}  // namespace symsys
