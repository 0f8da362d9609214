#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "symsys/mathcore/linalg.hpp"

namespace symsys {

/// H×W lattice of sites, each carrying a C-channel vector. Both axes wrap
/// (torus). A grid with H = 1 is a ring.
struct SpatialGrid {
  int height = 1;
  int width = 1;
  int channels = 3;

  int sites() const { return height * width; }
  int features() const { return sites() * channels; }
  int site(int h, int w) const;
  /// Site reached from `site` by the circular offset (dh, dw).
  int shifted(int site, int dh, int dw) const;
  void validate() const;

  bool operator==(const SpatialGrid&) const = default;
};

void to_json(nlohmann::json& j, const SpatialGrid& g);
void from_json(const nlohmann::json& j, SpatialGrid& g);

/// m images; row i holds image i flattened site-major, channel-minor
/// (entry α·C + c is channel c of site α).
struct ImageBatch {
  SpatialGrid grid;
  RowMatrix values;

  ImageBatch() = default;
  ImageBatch(SpatialGrid g, RowMatrix v);

  Eigen::Index size() const { return values.rows(); }
  ImageBatch rows(std::span<const int> indices) const;
  ImageBatch head(Eigen::Index count) const;
  void validate() const;
};

/// m×k label matrix; one-hot rows for classification data.
struct LabelBatch {
  RowMatrix values;

  static LabelBatch one_hot(std::span<const int> classes, int k);

  Eigen::Index size() const { return values.rows(); }
  int classes() const { return static_cast<int>(values.cols()); }
  /// Row-wise argmax, ties broken toward the lowest index.
  std::vector<int> argmax() const;
  LabelBatch rows(std::span<const int> indices) const;
  LabelBatch head(Eigen::Index count) const;
};

struct Split {
  ImageBatch x;
  LabelBatch y;

  Eigen::Index size() const { return x.size(); }
  Split head(Eigen::Index count) const;
  Split rows(std::span<const int> indices) const;
};

struct Provenance {
  std::string source;            ///< "synthetic", "cifar10", ...
  std::string group = "identity";  ///< descriptor of the applied GroupElement
  std::uint64_t seed = 0;
  nlohmann::json notes = nlohmann::json::object();
};

void to_json(nlohmann::json& j, const Provenance& p);
void from_json(const nlohmann::json& j, Provenance& p);

struct Dataset {
  Split train;
  Split test;
  Provenance provenance;

  const SpatialGrid& grid() const { return train.x.grid; }
  int classes() const { return train.y.classes(); }
  /// Nested subset: the first m_train / m_test examples of each split.
  Dataset head(Eigen::Index m_train, Eigen::Index m_test) const;
  void validate() const;
};

/// Training split doubled by a left-right mirror (w -> W-1-w); test untouched.
Dataset flip_augment(const Dataset& ds);
ImageBatch mirror_horizontal(const ImageBatch& batch);

void write_dataset(const std::string& path, const Dataset& ds);
Dataset read_dataset(const std::string& path);

}  // namespace symsys
