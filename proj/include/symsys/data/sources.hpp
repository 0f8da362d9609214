#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "symsys/data/dataset.hpp"

namespace symsys {

/// Desk-scale stand-in for natural images: each image is one of `classes` fixed
/// template patches stamped at a uniformly random site of the torus on top of
/// i.i.d. Gaussian background noise. Labels are the template id, so they are
/// invariant under circular shifts.
struct SyntheticConfig {
  SpatialGrid grid{8, 8, 3};
  int m_train = 512;
  int m_test = 256;
  int classes = 4;
  double noise = 0.3;
  int template_size = 3;
  double template_scale = 1.0;
};

void to_json(nlohmann::json& j, const SyntheticConfig& c);
void from_json(const nlohmann::json& j, SyntheticConfig& c);

/// Stream layout: templates on stream 0, train on stream 1, test on stream 2.
/// Examples are drawn sequentially, so a smaller m_train yields a head of a
/// larger one.
Dataset gen_synthetic(std::uint64_t seed, const SyntheticConfig& cfg);

/// Per-class template patches (template_size × template_size × C), as images
/// of that patch size.
std::vector<RowMatrix> synthetic_templates(std::uint64_t seed, const SyntheticConfig& cfg);

struct CifarOptions {
  SpatialGrid grid_out{32, 32, 3};
  int m_train = 50000;
  int m_test = 10000;
  /// Shuffle the training records with this seed before taking the head.
  std::optional<std::uint64_t> shuffle_seed;
};

/// Reads the CIFAR-10 binary batches (data_batch_1..5.bin, test_batch.bin).
/// Pixels are scaled to [0, 1], average-pooled to `grid_out`, then standardized
/// per channel with the loaded training split's mean and variance.
Dataset load_cifar10(const std::string& directory, const CifarOptions& options);

/// 32×32 → H×W block averaging of one batch; H and W must divide 32.
ImageBatch average_pool(const ImageBatch& batch, const SpatialGrid& grid_out);

}  // namespace symsys
