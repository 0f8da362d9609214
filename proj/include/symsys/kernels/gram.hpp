#pragma once

#include <string>

#include "symsys/data/dataset.hpp"
#include "symsys/kernels/recursion.hpp"

namespace symsys {

struct KernelMatrix {
  Matrix values;  ///< rows index the first point set, columns the second
  KernelFlavor flavor = KernelFlavor::NTK;
  std::string architecture;  ///< e.g. "GAP_inf"
  SpatialGrid grid;
  bool symmetric = false;
  double jitter = 0.0;  ///< set by consumers that regularize the matrix
};

struct GramOptions {
  int tile = 32;        ///< pairs per tile edge
  bool parallel = true; ///< OpenMP over tiles; false runs the same tiles serially
  int threads = 0;      ///< 0 = OpenMP default
};

struct KernelMatrices {
  KernelMatrix nngp;
  KernelMatrix ntk;
  const KernelMatrix& get(KernelFlavor f) const { return f == KernelFlavor::NNGP ? nngp : ntk; }
};

/// Both flavors from one recursion pass. With `y == nullptr` the Gram of `x`
/// with itself is built from its upper triangle and mirrored. Every pair is
/// computed independently, so serial and parallel results are bitwise equal.
KernelMatrices kernel_matrices(const NetworkSpec& spec, const ImageBatch& x, const ImageBatch* y,
                               const GramOptions& options = {});

/// FCN_∞ kernel between two batches (spec.kind is ignored; FCN is used).
KernelMatrix fcn_kernel(const ImageBatch& x, const ImageBatch& y, const NetworkSpec& spec, KernelFlavor flavor);
/// Conv kernel with the readout of spec.kind (VEC, LCN, GAP or LAP).
KernelMatrix conv_kernel(const ImageBatch& x, const ImageBatch& y, const NetworkSpec& spec, KernelFlavor flavor);

void write_kernel(const std::string& path, const KernelMatrix& k);
KernelMatrix read_kernel(const std::string& path);

}  // namespace symsys
