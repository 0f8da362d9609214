#include <doctest.h>

#include <set>

#include "symsys/data/sources.hpp"
#include "symsys/kernels/gram.hpp"
#include "symsys/training/learning_rate.hpp"
#include "symsys/training/loss.hpp"
#include "symsys/training/train.hpp"

using namespace symsys;

namespace {

NetworkSpec fcn_spec(int width, int depth, SpatialGrid grid = {4, 4, 3}, int outputs = 2) {
  NetworkSpec s;
  s.kind = ModelKind::FCN;
  s.width = width;
  s.depth = depth;
  s.grid = grid;
  s.outputs = outputs;
  return s;
}

LabelBatch labels_of(std::vector<int> cls, int k) { return LabelBatch::one_hot(cls, k); }

}  // namespace

TEST_CASE("mse_l2_loss") {
  ParamSet none;
  SUBCASE("perfect fit") {
    const RowMatrix y = labels_of({0, 1, 1}, 2).values;
    const LossValue v = mse_l2_loss(y, y, none, 0.0);
    CHECK(v.loss == 0.0);
    CHECK(v.cotangent.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("single sample, two classes") {
    RowMatrix f(1, 2), y(1, 2);
    f << 1, 0;
    y << 0, 1;
    const LossValue v = mse_l2_loss(f, y, none, 0.0);
    CHECK(v.loss == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(v.cotangent(0, 0) == doctest::Approx(0.5));
    CHECK(v.cotangent(0, 1) == doctest::Approx(-0.5));
  }
  SUBCASE("regularizer only") {
    ParamSet q;
    q.layers.push_back({{1}, Vector::Constant(1, std::sqrt(2e7)), Vector()});  // |θ|² = 2·10⁷
    const RowMatrix zero = RowMatrix::Zero(3, 2);
    CHECK(mse_l2_loss(zero, zero, q, 1e-7).loss == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mse_l2_loss(zero, zero, q, 1e-7).cotangent.cwiseAbs().maxCoeff() == 0.0);
    CHECK(mse_l2_loss(zero, zero, q, 0.0).loss == 0.0);
  }
}

TEST_CASE("evaluate_logits") {
  const LabelBatch y = labels_of({0, 2, 1, 2}, 3);
  const Evaluation e = evaluate_logits(y.values, y);
  CHECK(e.accuracy == 1.0);
  CHECK(e.mse == 0.0);

  std::vector<int> balanced;
  for (int i = 0; i < 100; ++i) balanced.push_back(i % 10);
  CHECK(evaluate_logits(RowMatrix::Zero(100, 10), labels_of(balanced, 10)).accuracy == doctest::Approx(0.1));
  std::vector<int> skewed(100, 3);
  for (int i = 0; i < 30; ++i) skewed[i] = 0;
  CHECK(evaluate_logits(RowMatrix::Zero(100, 10), labels_of(skewed, 10)).accuracy == doctest::Approx(0.3));

  Rng rng(1);
  const int m = 10000;
  std::vector<int> cls(m);
  for (auto& c : cls) c = static_cast<int>(rng.below(10));
  const RowMatrix logits = gaussian_matrix(rng, m, 10);
  CHECK(std::abs(evaluate_logits(logits, labels_of(cls, 10)).accuracy - 0.1) <= 0.01);
}

TEST_CASE("learning rate estimation") {
  SUBCASE("linear model closed form") {
    // f(x) = ⟨θ, x⟩/√p has Jacobian x/√p; with |x|² = p the Gram is [1].
    const int p = 12;
    Rng rng(2);
    Vector x = gaussian_matrix(rng, p, 1).col(0);
    x *= std::sqrt(static_cast<double>(p)) / x.norm();
    const Matrix jac = x.transpose() / std::sqrt(static_cast<double>(p));
    const LrEstimate e = learning_rate_from_gram(jac * jac.transpose());
    CHECK(e.lambda_max == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(e.eta0 == doctest::Approx(2.0).epsilon(1e-9));
  }
  SUBCASE("duplicated rows against a dense eigensolver") {
    const NetworkSpec s = fcn_spec(16, 2);
    Rng data(3);
    const ImageBatch x(s.grid, RowMatrix(gaussian_matrix(data, 4, s.grid.features())));
    const std::vector<int> dup_idx{0, 1, 2, 3, 0, 1, 2, 3};
    Rng r1(4), r2(4);
    const Matrix g = empirical_ntk(s, r1, x, 2);
    const Matrix gd = empirical_ntk(s, r2, x.rows(dup_idx), 2);
    const double oracle = Eigen::SelfAdjointEigenSolver<Matrix>(gd).eigenvalues().maxCoeff();
    Rng r3(4);
    const double eta_dup = estimate_lr(s, r3, x.rows(dup_idx), 2).eta0;
    CHECK(std::abs(eta_dup - 2.0 / oracle) / (2.0 / oracle) <= 0.01);
    // Exact duplication doubles λ_max, so η₀ halves.
    const double eta = learning_rate_from_gram(g).eta0;
    CHECK(std::abs(eta_dup - 0.5 * eta) / eta <= 0.01);
  }
  SUBCASE("wide network matches the infinite-width Gram") {
    const NetworkSpec s = fcn_spec(2048, 1);
    Rng data(5), rng(6);
    const ImageBatch x(s.grid, RowMatrix(gaussian_matrix(data, 6, s.grid.features())));
    const double eta = estimate_lr(s, rng, x, 1).eta0;
    const KernelMatrix k = fcn_kernel(x, x, s, KernelFlavor::NTK);
    const double oracle = 2.0 / Eigen::SelfAdjointEigenSolver<Matrix>(k.values).eigenvalues().maxCoeff();
    CHECK(std::abs(eta - oracle) / oracle <= 0.10);
  }
  SUBCASE("zero Gram throws") { CHECK_THROWS_AS(learning_rate_from_gram(Matrix::Zero(2, 2)), std::invalid_argument); }
}

TEST_CASE("batch schedule") {
  BatchSchedule full(1, 10, 10);
  for (int step = 0; step < 3; ++step) {
    const auto b = full.batch(step);
    CHECK(std::set<int>(b.begin(), b.end()).size() == 10);
  }
  BatchSchedule a(2, 12, 4), b(2, 12, 4);
  std::set<int> epoch;
  for (int step = 0; step < 3; ++step) {
    const auto x = a.batch(step);
    CHECK(x == b.batch(step));
    epoch.insert(x.begin(), x.end());
  }
  CHECK(epoch.size() == 12);
}

TEST_CASE("train") {
  SyntheticConfig dcfg;
  dcfg.grid = {4, 4, 3};
  dcfg.m_train = 32;
  dcfg.m_test = 16;
  dcfg.template_size = 2;

  SUBCASE("single point is fit to 1e-10") {
    Dataset ds = gen_synthetic(1, dcfg);
    ds.train = ds.train.head(1);
    const NetworkSpec s = fcn_spec(64, 1, dcfg.grid, 4);
    Rng rng(7);
    TrainConfig cfg;
    cfg.batch_size = 1;
    cfg.max_steps = 500;
    cfg.early_stop_acc = 2.0;
    cfg.loss_tolerance = 1e-10;
    cfg.eval_interval = 10;
    const TrainResult r = train(s, init_params(rng, s), ds, cfg);
    CHECK(r.record.status == "converged");
    CHECK(r.record.metrics.back().train_loss <= 1e-10);
    CHECK(r.record.final_step <= 500);
  }
  SUBCASE("identical settings give identical records") {
    const Dataset ds = gen_synthetic(2, dcfg);
    NetworkSpec s = fcn_spec(16, 2, dcfg.grid, 4);
    s.kind = ModelKind::VEC;
    TrainConfig cfg = inference_config("NN+");
    cfg.batch_size = 8;
    cfg.max_steps = 60;
    cfg.eval_interval = 20;
    cfg.seed = 3;
    Rng r1(8), r2(8);
    const TrainResult a = train(s, init_params(r1, s), ds, cfg);
    const TrainResult b = train(s, init_params(r2, s), ds, cfg);
    CHECK(nlohmann::json(a.record).dump() == nlohmann::json(b.record).dump());
    CHECK(a.params.max_abs_diff(b.params) == 0.0);
  }
  SUBCASE("weight decay shrinks parameters when the data term vanishes") {
    Dataset ds = gen_synthetic(3, dcfg);
    const NetworkSpec s = fcn_spec(8, 1, dcfg.grid, 4);
    ParamSet p = zero_params(s);
    p.layers[0].weight.setConstant(1.0);
    TrainConfig cfg;
    cfg.batch_size = 4;
    cfg.momentum = 0.0;
    cfg.eta0 = 0.5;
    cfg.l2 = 0.1;
    cfg.max_steps = 1;
    cfg.early_stop_acc = 2.0;
    // Zero readout: the only gradient on the hidden layer is λθ.
    ds.train.y.values.setZero();
    const TrainResult r = train(s, p, ds, cfg);
    CHECK(r.params.layers[0].weight(0) == doctest::Approx(1.0 - 0.5 * 0.1).epsilon(1e-14));
  }
  SUBCASE("divergence is recorded") {
    const Dataset ds = gen_synthetic(4, dcfg);
    const NetworkSpec s = fcn_spec(16, 2, dcfg.grid, 4);
    Rng rng(9);
    TrainConfig cfg;
    cfg.batch_size = 32;
    cfg.lr_multiplier = 1e5;
    cfg.max_steps = 200;
    cfg.early_stop_acc = 2.0;
    const TrainResult r = train(s, init_params(rng, s), ds, cfg);
    CHECK(r.record.status == "diverged");
    CHECK_FALSE(r.record.success);
  }
  SUBCASE("centered training starts from zero logits") {
    const Dataset ds = gen_synthetic(5, dcfg);
    const NetworkSpec s = fcn_spec(16, 1, dcfg.grid, 4);
    Rng rng(10);
    TrainConfig cfg;
    cfg.batch_size = 32;
    cfg.max_steps = 0;
    cfg.centered = true;
    const TrainResult r = train(s, init_params(rng, s), ds, cfg);
    // Zero predictions: every test row ties and mse is |y|²/(2km) = 1/(2k).
    CHECK(r.record.metrics.front().test_mse == doctest::Approx(1.0 / 8.0));
  }
  SUBCASE("bad configuration throws") {
    const Dataset ds = gen_synthetic(6, dcfg);
    const NetworkSpec s = fcn_spec(4, 1, dcfg.grid, 4);
    TrainConfig cfg;
    cfg.batch_size = 64;
    CHECK_THROWS_AS(train(s, zero_params(s), ds, cfg), std::invalid_argument);
  }
}

TEST_CASE("GAP_32 NN+ reaches the success threshold on the default synthetic task") {
  const SyntheticConfig dcfg;
  const Dataset ds = gen_synthetic(0, dcfg);
  NetworkSpec s;
  s.kind = ModelKind::GAP;
  s.width = 32;
  s.grid = dcfg.grid;
  s.outputs = dcfg.classes;
  TrainConfig cfg = inference_config("NN+");
  cfg.max_steps = 20000;
  cfg.seed = 0;
  Rng rng(0, 0x1417);
  const TrainResult r = train(s, init_params(rng, s), ds, cfg);
  MESSAGE("GAP_32 NN+ stopped at step ", r.record.final_step, " with train accuracy ", r.record.best_train_acc);
  CHECK(r.record.success);
  CHECK(r.record.final_step <= 20000);
}
