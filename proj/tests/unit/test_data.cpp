#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "symsys/data/dataset.hpp"
#include "symsys/data/groups.hpp"
#include "symsys/data/sources.hpp"

using namespace symsys;

namespace {

double max_abs(const RowMatrix& m) { return m.cwiseAbs().maxCoeff(); }

ImageBatch random_batch(Rng& rng, const SpatialGrid& g, int m) {
  return ImageBatch(g, RowMatrix(gaussian_matrix(rng, m, g.features())));
}

// Image moved by the circular offset (dh, dw): site s of the output holds site s - (dh, dw) of the input.
RowMatrix circular_shift(const SpatialGrid& g, const RowMatrix& row, int dh, int dw) {
  RowMatrix out(1, row.cols());
  const int c = g.channels;
  for (int s = 0; s < g.sites(); ++s) out.block(0, g.shifted(s, dh, dw) * c, 1, c) = row.block(0, s * c, 1, c);
  return out;
}

// Brute-force alignment oracle: best correlation of x with every template at every origin.
int best_shift_class(const SyntheticConfig& cfg, const std::vector<RowMatrix>& templates, const RowMatrix& x) {
  const SpatialGrid& g = cfg.grid;
  const int c = g.channels, t = cfg.template_size;
  int best = -1;
  double best_score = -1e300;
  for (int k = 0; k < cfg.classes; ++k)
    for (int origin = 0; origin < g.sites(); ++origin) {
      double score = 0.0;
      for (int u = 0; u < t; ++u)
        for (int v = 0; v < t; ++v) {
          const int site = g.shifted(origin, u, v);
          for (int ch = 0; ch < c; ++ch) score += x(0, site * c + ch) * templates[k](0, (u * t + v) * c + ch);
        }
      if (score > best_score) {
        best_score = score;
        best = k;
      }
    }
  return best;
}

}  // namespace

TEST_CASE("spatial grid addressing wraps") {
  const SpatialGrid g{4, 5, 3};
  CHECK(g.sites() == 20);
  CHECK(g.features() == 60);
  CHECK(g.shifted(g.site(3, 4), 1, 1) == g.site(0, 0));
  CHECK(g.shifted(g.site(0, 0), -1, -1) == g.site(3, 4));
  CHECK_THROWS((SpatialGrid{0, 2, 3}.validate()));
}

TEST_CASE("label batch argmax breaks ties toward lowest index") {
  LabelBatch y;
  y.values = RowMatrix::Zero(2, 3);
  y.values(1, 2) = 1.0;
  CHECK(y.argmax() == std::vector<int>{0, 2});
  const std::vector<int> cls{2, 0, 1};
  const LabelBatch oh = LabelBatch::one_hot(cls, 3);
  CHECK(oh.argmax() == cls);
  CHECK(oh.values.sum() == 3.0);
}

TEST_CASE("sample_group") {
  Rng rng(1);
  const SpatialGrid g{8, 8, 3};
  const ImageBatch x = random_batch(rng, g, 4);

  SUBCASE("identity is a bitwise copy") {
    const ImageBatch y = apply_group(sample_group(rng, GroupTag::Identity, g), x);
    CHECK(std::memcmp(y.values.data(), x.values.data(), sizeof(double) * x.values.size()) == 0);
  }
  SUBCASE("shared rotation is one orthogonal 3x3 and keeps pixel norms") {
    const GroupElement e = sample_group(rng, GroupTag::SharedPixelRotation, g);
    const auto& q = std::get<OrthoMatrix>(e.payload);
    CHECK(q.matrix().rows() == 3);
    CHECK(q.orthogonality_error() <= 1e-12);
    const ImageBatch y = apply_group(e, x);
    for (int i = 0; i < 4; ++i)
      for (int s = 0; s < g.sites(); ++s)
        CHECK(std::abs(y.values.block(i, s * 3, 1, 3).norm() - x.values.block(i, s * 3, 1, 3).norm()) <= 1e-12);
  }
  SUBCASE("pixelwise rotation has one block per site") {
    const GroupElement e = sample_group(rng, GroupTag::PixelwiseRotation, g);
    CHECK(std::get<std::vector<OrthoMatrix>>(e.payload).size() == 64);
  }
  SUBCASE("global rotation preserves inner products") {
    const ImageBatch y = apply_group(sample_group(rng, GroupTag::GlobalRotation, g), x);
    const Matrix gx = x.values * x.values.transpose(), gy = y.values * y.values.transpose();
    CHECK((gy - gx).cwiseAbs().maxCoeff() / gx.cwiseAbs().maxCoeff() <= 1e-10);
  }
  SUBCASE("permutation moves coordinates") {
    const GroupElement e = sample_group(rng, GroupTag::GlobalPermutation, g);
    const auto& perm = std::get<std::vector<int>>(e.payload);
    const ImageBatch y = apply_group(e, x);
    for (int i = 0; i < g.features(); ++i) CHECK(y.values(1, i) == x.values(1, perm[i]));
  }
  SUBCASE("rotations need three channels") {
    CHECK_THROWS(sample_group(rng, GroupTag::PixelwiseRotation, SpatialGrid{4, 4, 2}));
    CHECK_NOTHROW(sample_group(rng, GroupTag::GlobalPermutation, SpatialGrid{4, 4, 2}));
  }
}

TEST_CASE("apply_group inverse round trip for every tag") {
  Rng rng(2);
  const SpatialGrid g{4, 4, 3};
  const ImageBatch x = random_batch(rng, g, 5);
  for (const GroupTag tag : kAllGroupTags) {
    CAPTURE(to_string(tag));
    const GroupElement e = sample_group(rng, tag, g);
    const ImageBatch back = apply_group(e.inverse(), apply_group(e, x));
    CHECK(max_abs(back.values - x.values) <= 1e-12);
  }
}

TEST_CASE("group containment re-expressions act identically") {
  Rng rng(3);
  const SpatialGrid g{4, 4, 3};
  const ImageBatch x = random_batch(rng, g, 3);
  const GroupElement shared = sample_group(rng, GroupTag::SharedPixelRotation, g);
  const RowMatrix direct = apply_group(shared, x).values;
  CHECK(max_abs(apply_group(as_pixelwise(shared, g), x).values - direct) <= 1e-12);
  CHECK(max_abs(apply_group(as_global(shared, g), x).values - direct) <= 1e-12);
  const GroupElement perm = sample_group(rng, GroupTag::GlobalPermutation, g);
  CHECK(max_abs(apply_group(as_global(perm, g), x).values - apply_group(perm, x).values) <= 1e-12);
}

TEST_CASE("group shape mismatch throws") {
  Rng rng(4);
  const GroupElement e = sample_group(rng, GroupTag::PixelwiseRotation, SpatialGrid{4, 4, 3});
  CHECK_THROWS(apply_group(e, ImageBatch(SpatialGrid{2, 2, 3}, RowMatrix::Zero(1, 12))));
  CHECK(parse_group_tag("O3^d") == GroupTag::PixelwiseRotation);
  CHECK(parse_group_tag("P3d") == GroupTag::GlobalPermutation);
  CHECK_THROWS(parse_group_tag("SO2"));
}

TEST_CASE("rotation_path") {
  const SpatialGrid g{4, 4, 3};
  const Rng rng(9, 5);
  const auto blocks = [&](double t) { return std::get<std::vector<OrthoMatrix>>(rotation_path(rng, g, t).payload); };
  for (const auto& q : blocks(0.0)) CHECK(max_abs(q.matrix() - Matrix::Identity(3, 3)) <= 1e-15);
  const auto a = blocks(1.0), b = blocks(1.0);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(max_abs(a[i].matrix() - b[i].matrix()) == 0.0);
  for (const double scale : {0.5, 1.0, 2.0})
    for (const double t : {0.0, 0.3, 0.999}) {
      const auto p = std::get<std::vector<OrthoMatrix>>(rotation_path(rng, g, t, scale).payload);
      const auto q = std::get<std::vector<OrthoMatrix>>(rotation_path(rng, g, t + 1e-3, scale).payload);
      for (std::size_t i = 0; i < p.size(); ++i) CHECK(max_abs(p[i].matrix() - q[i].matrix()) <= 1e-2 * scale);
    }
  CHECK_THROWS(rotation_path(rng, g, 1.5));
  CHECK_THROWS(rotation_path(rng, g, -0.1));
}

TEST_CASE("gen_synthetic") {
  SUBCASE("noiseless images of a class are circular shifts of each other") {
    SyntheticConfig cfg;
    cfg.noise = 0.0;
    cfg.m_train = 32;
    const Dataset ds = gen_synthetic(3, cfg);
    const auto labels = ds.train.y.argmax();
    int pairs = 0;
    for (int i = 0; i < 32; ++i)
      for (int j = i + 1; j < 32; ++j) {
        if (labels[i] != labels[j]) continue;
        bool found = false;
        for (int dh = 0; dh < 8 && !found; ++dh)
          for (int dw = 0; dw < 8 && !found; ++dw)
            found = max_abs(circular_shift(cfg.grid, ds.train.x.values.row(i), dh, dw) - ds.train.x.values.row(j)) == 0.0;
        CHECK(found);
        ++pairs;
      }
    CHECK(pairs > 0);
  }
  SUBCASE("shifted images keep the oracle label") {
    const SyntheticConfig cfg;
    const Dataset ds = gen_synthetic(4, cfg);
    const auto templates = synthetic_templates(4, cfg);
    for (int i = 0; i < 16; ++i) {
      const RowMatrix x = ds.test.x.values.row(i);
      const int k = best_shift_class(cfg, templates, x);
      CHECK(best_shift_class(cfg, templates, circular_shift(cfg.grid, x, 3, 5)) == k);
    }
  }
  SUBCASE("best-shift nearest centroid reaches 95% on the default task") {
    const SyntheticConfig cfg;
    const Dataset ds = gen_synthetic(0, cfg);
    const auto templates = synthetic_templates(0, cfg);
    const auto labels = ds.test.y.argmax();
    int correct = 0;
    for (int i = 0; i < cfg.m_test; ++i)
      correct += best_shift_class(cfg, templates, ds.test.x.values.row(i)) == labels[i];
    CHECK(static_cast<double>(correct) / cfg.m_test >= 0.95);
  }
  SUBCASE("smaller m_train is a head of a larger one") {
    SyntheticConfig small, large;
    small.m_train = 64;
    large.m_train = 256;
    const Dataset a = gen_synthetic(5, small), b = gen_synthetic(5, large);
    CHECK(max_abs(a.train.x.values - b.train.x.values.topRows(64)) == 0.0);
    CHECK(max_abs(a.test.x.values - b.test.x.values) == 0.0);
  }
  SUBCASE("errors") {
    SyntheticConfig cfg;
    cfg.grid = {2, 2, 3};
    CHECK_THROWS(gen_synthetic(0, cfg));
    SyntheticConfig one;
    one.classes = 1;
    CHECK_THROWS(gen_synthetic(0, one));
  }
}

TEST_CASE("cifar10 loader on a fabricated batch") {
  const auto dir = std::filesystem::temp_directory_path() / "symsys_fake_cifar";
  std::filesystem::create_directories(dir);
  Rng rng(6);
  const auto write_batch = [&](const std::string& name, int records) {
    std::ofstream out(dir / name, std::ios::binary);
    for (int r = 0; r < records; ++r) {
      out.put(static_cast<char>(rng.below(10)));
      for (int p = 0; p < 3072; ++p) out.put(static_cast<char>(rng.below(256)));
    }
  };
  write_batch("data_batch_1.bin", 20);
  write_batch("test_batch.bin", 10);

  std::ifstream raw(dir / "data_batch_1.bin", std::ios::binary);
  const int first = raw.get();

  CifarOptions opt;
  opt.m_train = 20;
  opt.m_test = 10;
  const Dataset full = load_cifar10(dir.string(), opt);
  CHECK(full.train.y.argmax()[0] == first);
  for (int ch = 0; ch < 3; ++ch) {
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < 20; ++i)
      for (int p = 0; p < 1024; ++p) {
        const double v = full.train.x.values(i, p * 3 + ch);
        s += v;
        s2 += v * v;
      }
    const double n = 20.0 * 1024.0;
    CHECK(std::abs(s / n) <= 1e-10);
    CHECK(std::abs(s2 / n - 1.0) <= 1e-10);
  }

  // Direct averaging oracle for 32 → 8.
  const ImageBatch pooled = average_pool(full.train.x, SpatialGrid{8, 8, 3});
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int h = 0; h < 8; ++h)
      for (int w = 0; w < 8; ++w)
        for (int ch = 0; ch < 3; ++ch) {
          double sum = 0.0;
          for (int u = 0; u < 4; ++u)
            for (int v = 0; v < 4; ++v) sum += full.train.x.values(i, ((4 * h + u) * 32 + 4 * w + v) * 3 + ch);
          worst = std::max(worst, std::abs(pooled.values(i, (h * 8 + w) * 3 + ch) - sum / 16.0));
        }
  CHECK(worst <= 1e-12);
  CHECK_THROWS(average_pool(full.train.x, SpatialGrid{5, 5, 3}));

  opt.m_train = 40;
  CHECK_THROWS(load_cifar10(dir.string(), opt));
  CHECK_THROWS(load_cifar10((dir / "missing").string(), CifarOptions{}));
  std::filesystem::remove_all(dir);
}

TEST_CASE("flip_augment") {
  SyntheticConfig cfg;
  cfg.m_train = 16;
  cfg.m_test = 8;
  const Dataset ds = gen_synthetic(7, cfg);
  const Dataset aug = flip_augment(ds);
  CHECK(aug.train.size() == 32);
  CHECK(aug.test.size() == 8);
  const ImageBatch twice = mirror_horizontal(mirror_horizontal(ds.train.x));
  CHECK(std::memcmp(twice.values.data(), ds.train.x.values.data(), sizeof(double) * twice.values.size()) == 0);
  const ImageBatch once = mirror_horizontal(ds.train.x);
  const SpatialGrid& g = cfg.grid;
  for (int w = 0; w < g.width; ++w) {
    double a = 0.0, b = 0.0;
    for (int h = 0; h < g.height; ++h)
      for (int ch = 0; ch < 3; ++ch) {
        a += ds.train.x.values(0, g.site(h, w) * 3 + ch);
        b += once.values(0, g.site(h, g.width - 1 - w) * 3 + ch);
      }
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
  }
}

TEST_CASE("dataset file round trip is bitwise") {
  SyntheticConfig cfg;
  cfg.m_train = 8;
  cfg.m_test = 4;
  const Dataset ds = gen_synthetic(8, cfg);
  const auto path = (std::filesystem::temp_directory_path() / "symsys_ds.bin").string();
  write_dataset(path, ds);
  const Dataset back = read_dataset(path);
  CHECK(back.grid() == ds.grid());
  CHECK(max_abs(back.train.x.values - ds.train.x.values) == 0.0);
  CHECK(max_abs(back.test.y.values - ds.test.y.values) == 0.0);
  CHECK(back.provenance.seed == 8);
  std::filesystem::remove(path);
}
