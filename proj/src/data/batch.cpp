#include <stdexcept>

#include "symsys/data/dataset.hpp"

namespace symsys {

int SpatialGrid::site(int h, int w) const {
  h %= height;
  w %= width;
  if (h < 0) h += height;
  if (w < 0) w += width;
  return h * width + w;
}

int SpatialGrid::shifted(int s, int dh, int dw) const { return site(s / width + dh, s % width + dw); }

void SpatialGrid::validate() const {
  if (height < 1 || width < 1 || channels < 1) throw std::invalid_argument("SpatialGrid: extents must be positive");
}

void to_json(nlohmann::json& j, const SpatialGrid& g) {
  j = {{"height", g.height}, {"width", g.width}, {"channels", g.channels}};
}

void from_json(const nlohmann::json& j, SpatialGrid& g) {
  g.height = j.at("height").get<int>();
  g.width = j.at("width").get<int>();
  g.channels = j.value("channels", 3);
  g.validate();
}

ImageBatch::ImageBatch(SpatialGrid g, RowMatrix v) : grid(g), values(std::move(v)) { validate(); }

void ImageBatch::validate() const {
  grid.validate();
  if (values.cols() != grid.features())
    throw std::invalid_argument("ImageBatch: row length " + std::to_string(values.cols()) + " does not match grid (" +
                                std::to_string(grid.features()) + ")");
  if (!values.allFinite()) throw std::invalid_argument("ImageBatch: non-finite entries");
}

ImageBatch ImageBatch::rows(std::span<const int> indices) const {
  RowMatrix out(static_cast<Eigen::Index>(indices.size()), values.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = values.row(indices[i]);
  return ImageBatch(grid, std::move(out));
}

ImageBatch ImageBatch::head(Eigen::Index count) const {
  if (count > size()) throw std::invalid_argument("ImageBatch::head: not enough rows");
  return ImageBatch(grid, values.topRows(count));
}

LabelBatch LabelBatch::one_hot(std::span<const int> classes, int k) {
  if (k < 1) throw std::invalid_argument("LabelBatch: class count must be positive");
  LabelBatch out{RowMatrix::Zero(static_cast<Eigen::Index>(classes.size()), k)};
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i] < 0 || classes[i] >= k) throw std::invalid_argument("LabelBatch: class index out of range");
    out.values(static_cast<Eigen::Index>(i), classes[i]) = 1.0;
  }
  return out;
}

std::vector<int> LabelBatch::argmax() const {
  std::vector<int> out(static_cast<std::size_t>(values.rows()));
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    int best = 0;
    for (Eigen::Index c = 1; c < values.cols(); ++c)
      if (values(i, c) > values(i, best)) best = static_cast<int>(c);
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

LabelBatch LabelBatch::rows(std::span<const int> indices) const {
  RowMatrix out(static_cast<Eigen::Index>(indices.size()), values.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = values.row(indices[i]);
  return LabelBatch{std::move(out)};
}

LabelBatch LabelBatch::head(Eigen::Index count) const {
  if (count > size()) throw std::invalid_argument("LabelBatch::head: not enough rows");
  return LabelBatch{values.topRows(count)};
}

Split Split::head(Eigen::Index count) const { return {x.head(count), y.head(count)}; }

Split Split::rows(std::span<const int> indices) const { return {x.rows(indices), y.rows(indices)}; }

void to_json(nlohmann::json& j, const Provenance& p) {
  j = {{"source", p.source}, {"group", p.group}, {"seed", p.seed}, {"notes", p.notes}};
}

void from_json(const nlohmann::json& j, Provenance& p) {
  p.source = j.at("source").get<std::string>();
  p.group = j.value("group", std::string("identity"));
  p.seed = j.value("seed", std::uint64_t{0});
  p.notes = j.value("notes", nlohmann::json::object());
}

Dataset Dataset::head(Eigen::Index m_train, Eigen::Index m_test) const {
  Dataset out{train.head(m_train), test.head(m_test), provenance};
  out.provenance.notes["m_train"] = m_train;
  out.provenance.notes["m_test"] = m_test;
  return out;
}

void Dataset::validate() const {
  train.x.validate();
  test.x.validate();
  if (!(train.x.grid == test.x.grid)) throw std::invalid_argument("Dataset: train and test grids differ");
  if (train.y.classes() != test.y.classes()) throw std::invalid_argument("Dataset: label dimensions differ");
  if (train.x.size() != train.y.size() || test.x.size() != test.y.size())
    throw std::invalid_argument("Dataset: image and label counts differ");
}

ImageBatch mirror_horizontal(const ImageBatch& batch) {
  const SpatialGrid& g = batch.grid;
  RowMatrix out(batch.values.rows(), batch.values.cols());
  for (int h = 0; h < g.height; ++h)
    for (int w = 0; w < g.width; ++w) {
      const int dst = g.site(h, w) * g.channels;
      const int src = g.site(h, g.width - 1 - w) * g.channels;
      out.middleCols(dst, g.channels) = batch.values.middleCols(src, g.channels);
    }
  return ImageBatch(g, std::move(out));
}

Dataset flip_augment(const Dataset& ds) {
  if (ds.grid().width < 2) throw std::invalid_argument("flip_augment: grid width must be at least 2");
  const Eigen::Index m = ds.train.size();
  Dataset out = ds;
  out.train.x.values.resize(2 * m, ds.train.x.values.cols());
  out.train.x.values.topRows(m) = ds.train.x.values;
  out.train.x.values.bottomRows(m) = mirror_horizontal(ds.train.x).values;
  out.train.y.values.resize(2 * m, ds.train.y.values.cols());
  out.train.y.values.topRows(m) = ds.train.y.values;
  out.train.y.values.bottomRows(m) = ds.train.y.values;
  out.provenance.notes["flip_augment"] = true;
  return out;
}

}  // namespace symsys
