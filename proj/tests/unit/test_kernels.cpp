#include <doctest.h>

#include <cstring>
#include <filesystem>

#include "support/oracles.hpp"
#include "symsys/data/sources.hpp"
#include "symsys/kernels/dual.hpp"
#include "symsys/kernels/gram.hpp"
#include "symsys/kernels/invariance.hpp"
#include "symsys/kernels/regression.hpp"

using namespace symsys;

namespace {

NetworkSpec make_spec(ModelKind kind, SpatialGrid grid = {4, 4, 3}, int depth = 2) {
  NetworkSpec s;
  s.kind = kind;
  s.depth = depth;
  s.grid = grid;
  s.pool_window = 2;
  return s;
}

ImageBatch random_batch(Rng& rng, const SpatialGrid& g, int m) {
  return ImageBatch(g, RowMatrix(gaussian_matrix(rng, m, g.features())));
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

RowMatrix shift_images(const SpatialGrid& g, const RowMatrix& x, int dh, int dw) {
  RowMatrix out(x.rows(), x.cols());
  const int c = g.channels;
  for (int s = 0; s < g.sites(); ++s) out.middleCols(g.shifted(s, dh, dw) * c, c) = x.middleCols(s * c, c);
  return out;
}

}  // namespace

TEST_CASE("relu duals") {
  SUBCASE("closed forms at the endpoints") {
    CHECK(ReluDual::value(1, 1, 1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(ReluDual::derivative(1, 1, 1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(ReluDual::value(1, 0, 1) == doctest::Approx(1.0 / (2.0 * M_PI)).epsilon(1e-15));
    CHECK(ReluDual::derivative(1, 0, 1) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(ReluDual::value(1, -1, 1) == doctest::Approx(0.0));
    CHECK(ReluDual::derivative(1, -1, 1) == doctest::Approx(0.0));
  }
  SUBCASE("Monte-Carlo expectations") {
    Rng rng(1), mc(2);
    for (int i = 0; i < 4; ++i) {
      const double a = 0.5 + rng.uniform(), c = 0.5 + rng.uniform();
      const double b = (2.0 * rng.uniform() - 1.0) * std::sqrt(a * c);
      const auto [v, vdot] = oracle::relu_dual_mc(mc, a, b, c, 1000000);
      CHECK(std::abs(ReluDual::value(a, b, c) - v) <= 5e-3);
      CHECK(std::abs(ReluDual::derivative(a, b, c) - vdot) <= 5e-3);
    }
  }
  SUBCASE("vectorized duals agree with the reference") {
    Rng rng(3);
    const std::size_t n = 1000;
    std::vector<double> k(n), norm(n), inv(n), v(n), vd(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double a = 0.1 + rng.uniform(), c = 0.1 + rng.uniform();
      norm[i] = std::sqrt(a * c);
      inv[i] = 1.0 / norm[i];
      k[i] = (2.0 * rng.uniform() - 1.0) * norm[i];
    }
    k[0] = norm[0];
    k[1] = -norm[1];
    relu_dual(k.data(), norm.data(), inv.data(), v.data(), vd.data(), n);
    // Only √(ac) enters the duals. At cos θ = ±1 an ulp of cos θ moves θ by
    // ~1e-8, so the endpoints get a conditioning-sized tolerance.
    double worst = 0.0, worst_end = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = norm[i];
      const double err = std::max(std::abs(v[i] - ReluDual::value(a, k[i], a)),
                                  std::abs(vd[i] - ReluDual::derivative(a, k[i], a)));
      double& slot = i < 2 ? worst_end : worst;
      slot = std::max(slot, err);
    }
    CHECK(worst <= 1e-14);
    CHECK(worst_end <= 1e-8);
    const Eigen::ArrayXd x = Eigen::ArrayXd::LinSpaced(2001, -1.0, 1.0);
    CHECK((fast_acos(x) - x.acos()).abs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("fcn kernel") {
  NetworkSpec s = make_spec(ModelKind::FCN, {1, 1, 2}, 1);
  s.sigma_w2 = 2.0;
  s.bias = false;
  // σ_w²|x|²/dim = 1 puts the layer-1 variance at 1.
  RowMatrix x(2, 2);
  x << 1, 0, 0, 1;
  const ImageBatch b(s.grid, x);
  const KernelMatrix nngp = fcn_kernel(b, b, s, KernelFlavor::NNGP);
  CHECK(nngp.values(0, 1) == doctest::Approx(1.0 / M_PI).epsilon(1e-12));
  CHECK(nngp.values(0, 0) == doctest::Approx(1.0).epsilon(1e-12));

  Rng mc(4);
  const auto [v_orth, vd_orth] = oracle::relu_dual_mc(mc, 1.0, 0.0, 1.0, 10000000);
  CHECK(std::abs(nngp.values(0, 1) - 2.0 * v_orth) <= 1e-3);
  const auto [v_same, vd_same] = oracle::relu_dual_mc(mc, 1.0, 1.0, 1.0, 10000000);
  CHECK(std::abs(nngp.values(0, 0) - 2.0 * v_same) <= 1e-3);

  // Variance 1 is a fixed point of every layer.
  for (const int depth : {2, 5}) {
    s.depth = depth;
    CHECK(fcn_kernel(b, b, s, KernelFlavor::NNGP).values(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("self pairs") {
  Rng rng(5);
  const SpatialGrid g{4, 4, 3};
  const ImageBatch x = random_batch(rng, g, 3);
  for (const ModelKind kind : {ModelKind::FCN, ModelKind::VEC, ModelKind::GAP, ModelKind::LAP}) {
    CAPTURE(to_string(kind));
    const NetworkSpec s = make_spec(kind, g, 3);
    const KernelMatrices k = kernel_matrices(s, x, nullptr);
    for (int i = 0; i < 3; ++i) CHECK(k.ntk.values(i, i) >= k.nngp.values(i, i));
  }
  // VEC/LCN diagonal: K(x, x) is σ_w²·mean_α V(self_α) + σ_b², with V(a, a, a) = a/2.
  const NetworkSpec s = make_spec(ModelKind::VEC, g, 3);
  const KernelRecursion rec(s);
  const auto in = rec.prepare(x.values.row(0).data());
  const double expected = s.sigma_w2 * 0.5 * in.self.back().mean() + s.sigma_b2;
  CHECK(rec.pair(in, in).nngp == doctest::Approx(expected).epsilon(1e-14));
  const PairKernel t = rec.tensors(in, in, 2);
  CHECK(max_abs(t.nngp.diagonal() - in.self[1]) <= 1e-12);
}

TEST_CASE("conv kernels") {
  Rng rng(6);
  const SpatialGrid g{4, 4, 3};
  const ImageBatch x = random_batch(rng, g, 6), y = random_batch(rng, g, 5);

  SUBCASE("fast diagonal path equals the full recursion") {
    for (const ModelKind kind : {ModelKind::VEC, ModelKind::LCN}) {
      const KernelRecursion rec(make_spec(kind, g, 3));
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 5; ++j) {
          const auto a = rec.prepare(x.values.row(i).data()), b = rec.prepare(y.values.row(j).data());
          const PairValues fast = rec.pair(a, b), full = rec.pair_full(a, b);
          CHECK(std::abs(fast.nngp - full.nngp) <= 1e-12);
          CHECK(std::abs(fast.ntk - full.ntk) <= 1e-12);
        }
    }
  }
  SUBCASE("GAP is invariant under independent circular shifts") {
    const NetworkSpec s = make_spec(ModelKind::GAP, g);
    for (const KernelFlavor f : {KernelFlavor::NNGP, KernelFlavor::NTK}) {
      const Matrix ref = conv_kernel(x, y, s, f).values;
      const ImageBatch xs(g, shift_images(g, x.values, 1, 2)), ys(g, shift_images(g, y.values, 3, 0));
      CHECK(max_abs(conv_kernel(xs, ys, s, f).values - ref) <= 1e-12);
    }
  }
  SUBCASE("one-site grid reduces to FCN") {
    const SpatialGrid one{1, 1, 3};
    const ImageBatch a = random_batch(rng, one, 5), b = random_batch(rng, one, 4);
    NetworkSpec s = make_spec(ModelKind::FCN, one, 3);
    s.pool_window = 1;
    for (const KernelFlavor f : {KernelFlavor::NNGP, KernelFlavor::NTK}) {
      const Matrix ref = fcn_kernel(a, b, s, f).values;
      for (const ModelKind kind : {ModelKind::VEC, ModelKind::GAP, ModelKind::LAP, ModelKind::LCN}) {
        s.kind = kind;
        CHECK(max_abs(conv_kernel(a, b, s, f).values - ref) <= 1e-12);
      }
    }
  }
  SUBCASE("LAP limits") {
    NetworkSpec lap = make_spec(ModelKind::LAP, g);
    for (const KernelFlavor f : {KernelFlavor::NNGP, KernelFlavor::NTK}) {
      lap.pool_window = 1;
      CHECK(max_abs(conv_kernel(x, y, lap, f).values - conv_kernel(x, y, make_spec(ModelKind::VEC, g), f).values) <= 1e-12);
      lap.pool_window = 4;
      CHECK(max_abs(conv_kernel(x, y, lap, f).values - conv_kernel(x, y, make_spec(ModelKind::GAP, g), f).values) <= 1e-12);
    }
  }
  SUBCASE("symmetric Gram, serial equals parallel") {
    const NetworkSpec s = make_spec(ModelKind::GAP, g);
    GramOptions serial, parallel;
    serial.parallel = false;
    serial.tile = 2;
    parallel.tile = 3;
    const KernelMatrices a = kernel_matrices(s, x, nullptr, serial);
    const KernelMatrices b = kernel_matrices(s, x, nullptr, parallel);
    CHECK(max_abs(a.ntk.values - a.ntk.values.transpose()) == 0.0);
    CHECK(std::memcmp(a.ntk.values.data(), b.ntk.values.data(), sizeof(double) * a.ntk.values.size()) == 0);
    const KernelMatrices cross = kernel_matrices(s, x, &x, serial);
    CHECK(max_abs(cross.nngp.values - a.nngp.values) <= 1e-15 * max_abs(a.nngp.values));
  }
  SUBCASE("mismatched grid throws") {
    CHECK_THROWS(conv_kernel(x, random_batch(rng, SpatialGrid{2, 2, 3}, 2), make_spec(ModelKind::VEC, g), KernelFlavor::NTK));
  }
}

TEST_CASE("kernel file round trip") {
  Rng rng(7);
  const SpatialGrid g{3, 3, 3};
  const ImageBatch x = random_batch(rng, g, 4);
  const KernelMatrix k = conv_kernel(x, x, make_spec(ModelKind::GAP, g), KernelFlavor::NTK);
  const auto path = (std::filesystem::temp_directory_path() / "symsys_kernel.bin").string();
  write_kernel(path, k);
  const KernelMatrix back = read_kernel(path);
  CHECK(max_abs(back.values - k.values) == 0.0);
  CHECK(back.flavor == KernelFlavor::NTK);
  CHECK(back.architecture == k.architecture);
  std::filesystem::remove(path);
}

TEST_CASE("kernel invariance witnesses") {
  Rng rng(8);
  const SpatialGrid g{4, 4, 3};
  const ImageBatch x = random_batch(rng, g, 12);
  for (const KernelFlavor f : {KernelFlavor::NNGP, KernelFlavor::NTK}) {
    CAPTURE(to_string(f));
    const InvarianceReport fcn = kernel_invariance_check(make_spec(ModelKind::FCN, g), rng, x, f);
    CHECK(fcn.matched == GroupTag::GlobalRotation);
    CHECK(fcn.matched_deviation <= 1e-10);
    CHECK_FALSE(fcn.mismatched.has_value());

    const InvarianceReport vec = kernel_invariance_check(make_spec(ModelKind::VEC, g), rng, x, f);
    CHECK(vec.matched == GroupTag::PixelwiseRotation);
    CHECK(vec.matched_deviation <= 1e-10);
    CHECK(*vec.mismatched_deviation >= 1e-3);

    const InvarianceReport gap = kernel_invariance_check(make_spec(ModelKind::GAP, g), rng, x, f);
    CHECK(gap.matched == GroupTag::SharedPixelRotation);
    CHECK(gap.matched_deviation <= 1e-10);
    CHECK(*gap.mismatched_deviation >= 1e-3);
  }
  CHECK(licensed_kernel_group(ModelKind::LCN) == GroupTag::PixelwiseRotation);
  CHECK(licensed_kernel_group(ModelKind::LAP) == GroupTag::SharedPixelRotation);
  CHECK(next_larger_group(GroupTag::PixelwiseRotation) == GroupTag::GlobalRotation);
  CHECK_FALSE(next_larger_group(GroupTag::GlobalRotation).has_value());
}

TEST_CASE("solve_regression") {
  Rng rng(9);
  const SpatialGrid g{4, 4, 3};
  const NetworkSpec s = make_spec(ModelKind::VEC, g);

  SUBCASE("one training point") {
    const ImageBatch xt = random_batch(rng, g, 1), xs = random_batch(rng, g, 3);
    const LabelBatch y = LabelBatch::one_hot(std::vector<int>{1}, 2);
    const KernelMatrix kt = conv_kernel(xt, xt, s, KernelFlavor::NTK);
    const KernelMatrix kc = conv_kernel(xs, xt, s, KernelFlavor::NTK);
    const RegressionResult r = solve_regression(kt, y, kc);
    for (int i = 0; i < 3; ++i) {
      CHECK(r.predictions(i, 0) == doctest::Approx(0.0));
      CHECK(r.predictions(i, 1) == doctest::Approx(kc.values(i, 0) / kt.values(0, 0)).epsilon(1e-10));
    }
  }
  SUBCASE("interpolates the training set") {
    const ImageBatch xt = random_batch(rng, g, 24);
    std::vector<int> cls;
    for (int i = 0; i < 24; ++i) cls.push_back(i % 3);
    const LabelBatch y = LabelBatch::one_hot(cls, 3);
    for (const KernelFlavor f : {KernelFlavor::NNGP, KernelFlavor::NTK}) {
      const KernelMatrix k = conv_kernel(xt, xt, s, f);
      const RegressionResult r = solve_regression(k, y, k);
      CHECK(r.rung == 0);
      CHECK((r.predictions - y.values).cwiseAbs().maxCoeff() <= 1e-6);
    }
  }
  SUBCASE("flavor mismatch throws") {
    const ImageBatch xt = random_batch(rng, g, 3);
    const LabelBatch y = LabelBatch::one_hot(std::vector<int>{0, 1, 0}, 2);
    CHECK_THROWS(solve_regression(conv_kernel(xt, xt, s, KernelFlavor::NTK), y, conv_kernel(xt, xt, s, KernelFlavor::NNGP)));
  }
}

TEST_CASE("GAP NTK beats chance on the 32-point synthetic task") {
  SyntheticConfig cfg;
  cfg.m_train = 32;
  cfg.m_test = 64;
  NetworkSpec s = make_spec(ModelKind::GAP, cfg.grid, 3);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Dataset ds = gen_synthetic(seed, cfg);
    const KernelMatrix kt = conv_kernel(ds.train.x, ds.train.x, s, KernelFlavor::NTK);
    const KernelMatrix kc = conv_kernel(ds.test.x, ds.train.x, s, KernelFlavor::NTK);
    const RegressionResult r = solve_regression(kt, ds.train.y, kc);
    const auto pred = LabelBatch{r.predictions}.argmax(), truth = ds.test.y.argmax();
    int correct = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == truth[i];
    const double acc = static_cast<double>(correct) / static_cast<double>(pred.size());
    CAPTURE(seed);
    CHECK(acc >= 1.0 / cfg.classes + 0.15);
  }
}
