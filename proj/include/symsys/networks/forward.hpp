#pragma once

#include <vector>

#include "symsys/data/dataset.hpp"
#include "symsys/networks/params.hpp"

namespace symsys {

/// Activations kept for backpropagation. Conv kinds store activations as
/// (m·d)×channels, row s·d + α holding site α of image s; FCN as m×width.
struct ForwardTrace {
  Eigen::Index batch = 0;
  RowMatrix input;             ///< x^0 in the layer layout above
  std::vector<RowMatrix> pre;  ///< h^1..h^L
  std::vector<RowMatrix> post; ///< x^l = max(0, h^l)
  RowMatrix features;          ///< readout input, m × readout_fan_in
};

/// Logits, m × outputs. Fills `trace` when given.
RowMatrix forward(const NetworkSpec& spec, const ParamSet& params, const ImageBatch& batch,
                  ForwardTrace* trace = nullptr);

/// Logits without keeping a trace, evaluated in chunks of `chunk` images.
RowMatrix predict(const NetworkSpec& spec, const ParamSet& params, const ImageBatch& batch, Eigen::Index chunk = 128);

/// Gradient of Σ cotangent ⊙ logits with respect to every parameter.
/// ReLU'(0) is taken as 0.
ParamSet backward(const NetworkSpec& spec, const ParamSet& params, const ForwardTrace& trace,
                  const RowMatrix& cotangent);

}  // namespace symsys
