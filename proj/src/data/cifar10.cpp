#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "symsys/data/sources.hpp"

namespace symsys {
namespace {

constexpr int kSide = 32;
constexpr int kPixels = kSide * kSide;
constexpr int kRecord = 1 + 3 * kPixels;

struct RawSplit {
  std::vector<unsigned char> bytes;  // whole records, concatenated
  int count = 0;
};

void read_records(const std::filesystem::path& file, int wanted, RawSplit& out) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("load_cifar10: missing file " + file.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<long long>(in.tellg());
  in.seekg(0);
  if (size <= 0 || size % kRecord != 0)
    throw std::runtime_error("load_cifar10: truncated file " + file.string() + " (" + std::to_string(size) + " bytes)");
  const int available = static_cast<int>(size / kRecord);
  const int take = std::min(available, wanted);
  const std::size_t offset = out.bytes.size();
  out.bytes.resize(offset + static_cast<std::size_t>(take) * kRecord);
  if (!in.read(reinterpret_cast<char*>(out.bytes.data() + offset), static_cast<std::streamsize>(take) * kRecord))
    throw std::runtime_error("load_cifar10: truncated file " + file.string());
  out.count += take;
}

Split decode(const RawSplit& raw, std::span<const int> order, int m) {
  const SpatialGrid full{kSide, kSide, 3};
  RowMatrix x(m, full.features());
  std::vector<int> labels(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const unsigned char* rec = raw.bytes.data() + static_cast<std::size_t>(order[static_cast<std::size_t>(i)]) * kRecord;
    labels[static_cast<std::size_t>(i)] = rec[0];
    // Source layout: channel-major planes, each row-major 32×32.
    for (int ch = 0; ch < 3; ++ch)
      for (int p = 0; p < kPixels; ++p) x(i, p * 3 + ch) = rec[1 + ch * kPixels + p] / 255.0;
  }
  return {ImageBatch(full, std::move(x)), LabelBatch::one_hot(labels, 10)};
}

}  // namespace

ImageBatch average_pool(const ImageBatch& batch, const SpatialGrid& grid_out) {
  const SpatialGrid& in = batch.grid;
  if (grid_out.channels != in.channels) throw std::invalid_argument("average_pool: channel counts differ");
  if (grid_out.height < 1 || grid_out.width < 1 || in.height % grid_out.height != 0 || in.width % grid_out.width != 0)
    throw std::invalid_argument("average_pool: output grid must divide the input grid");
  const int bh = in.height / grid_out.height, bw = in.width / grid_out.width, c = in.channels;
  const double inv = 1.0 / (bh * bw);
  RowMatrix out = RowMatrix::Zero(batch.size(), grid_out.features());
  for (int h = 0; h < in.height; ++h)
    for (int w = 0; w < in.width; ++w) {
      const int src = in.site(h, w) * c;
      const int dst = grid_out.site(h / bh, w / bw) * c;
      out.middleCols(dst, c) += batch.values.middleCols(src, c);
    }
  out *= inv;
  return ImageBatch(grid_out, std::move(out));
}

Dataset load_cifar10(const std::string& directory, const CifarOptions& options) {
  const std::filesystem::path dir(directory);
  const SpatialGrid& g = options.grid_out;
  if (g.channels != 3 || kSide % g.height != 0 || kSide % g.width != 0)
    throw std::invalid_argument("load_cifar10: output grid must be 3-channel and divide 32×32");

  RawSplit train_raw, test_raw;
  const int train_pool = options.shuffle_seed ? 50000 : options.m_train;
  for (int b = 1; b <= 5 && train_raw.count < train_pool; ++b)
    read_records(dir / ("data_batch_" + std::to_string(b) + ".bin"), train_pool - train_raw.count, train_raw);
  read_records(dir / "test_batch.bin", options.m_test, test_raw);
  if (train_raw.count < options.m_train || test_raw.count < options.m_test)
    throw std::runtime_error("load_cifar10: not enough records for the requested subset");

  std::vector<int> train_order(static_cast<std::size_t>(train_raw.count));
  std::iota(train_order.begin(), train_order.end(), 0);
  if (options.shuffle_seed) {
    Rng rng(*options.shuffle_seed, 7);
    for (std::size_t i = train_order.size() - 1; i > 0; --i)
      std::swap(train_order[i], train_order[rng.below(i + 1)]);
  }
  std::vector<int> test_order(static_cast<std::size_t>(test_raw.count));
  std::iota(test_order.begin(), test_order.end(), 0);

  Dataset ds;
  ds.train = decode(train_raw, train_order, options.m_train);
  ds.test = decode(test_raw, test_order, options.m_test);
  if (!(g == ds.train.x.grid)) {
    ds.train.x = average_pool(ds.train.x, g);
    ds.test.x = average_pool(ds.test.x, g);
  }

  // Per-channel standardization with training statistics.
  const Eigen::Index m = ds.train.size();
  Eigen::Map<RowMatrix> train_px(ds.train.x.values.data(), m * g.sites(), 3);
  Eigen::Map<RowMatrix> test_px(ds.test.x.values.data(), ds.test.size() * g.sites(), 3);
  const Eigen::RowVector3d mean = train_px.colwise().mean();
  train_px.rowwise() -= mean;
  test_px.rowwise() -= mean;
  const Eigen::RowVector3d stddev = (train_px.array().square().colwise().sum() / static_cast<double>(train_px.rows())).sqrt();
  for (int ch = 0; ch < 3; ++ch) {
    train_px.col(ch) /= stddev[ch];
    test_px.col(ch) /= stddev[ch];
  }

  ds.provenance.source = "cifar10";
  ds.provenance.seed = options.shuffle_seed.value_or(0);
  ds.provenance.notes = {{"preprocessing", "scale to [0,1], average-pool, per-channel standardization (train stats)"},
                         {"channel_mean", {mean[0], mean[1], mean[2]}},
                         {"channel_std", {stddev[0], stddev[1], stddev[2]}},
                         {"shuffled", options.shuffle_seed.has_value()}};
  return ds;
}

}  // namespace symsys
