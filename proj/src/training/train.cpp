#include "symsys/training/train.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "symsys/mathcore/text.hpp"
#include "symsys/training/learning_rate.hpp"
#include "symsys/training/loss.hpp"

namespace symsys {

void TrainConfig::validate(Eigen::Index m_train) const {
  if (batch_size < 1 || batch_size > m_train)
    throw std::invalid_argument("TrainConfig: batch size " + std::to_string(batch_size) + " not in [1, " +
                                std::to_string(m_train) + "]");
  if (!(lr_multiplier > 0.0)) throw std::invalid_argument("TrainConfig: learning-rate multiplier must be positive");
  if (!(l2 >= 0.0)) throw std::invalid_argument("TrainConfig: L2 coefficient must be nonnegative");
  if (max_steps < 0 || eval_interval < 1 || lr_samples < 1) throw std::invalid_argument("TrainConfig: bad step settings");
  if (momentum < 0.0 || momentum >= 1.0) throw std::invalid_argument("TrainConfig: momentum must lie in [0, 1)");
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = {{"batch_size", c.batch_size},     {"momentum", c.momentum},
       {"lr_multiplier", c.lr_multiplier}, {"l2", c.l2},
       {"max_steps", c.max_steps},       {"early_stop_acc", c.early_stop_acc},
       {"success_acc", c.success_acc},   {"seed", c.seed},
       {"eval_interval", c.eval_interval}, {"eta0", c.eta0},
       {"lr_samples", c.lr_samples},     {"loss_tolerance", c.loss_tolerance},
       {"centered", c.centered},         {"divergence_factor", c.divergence_factor}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  const TrainConfig d;
  c.batch_size = j.value("batch_size", d.batch_size);
  c.momentum = j.value("momentum", d.momentum);
  c.lr_multiplier = j.value("lr_multiplier", d.lr_multiplier);
  c.l2 = j.value("l2", d.l2);
  c.max_steps = j.value("max_steps", d.max_steps);
  c.early_stop_acc = j.value("early_stop_acc", d.early_stop_acc);
  c.success_acc = j.value("success_acc", d.success_acc);
  c.seed = j.value("seed", d.seed);
  c.eval_interval = j.value("eval_interval", d.eval_interval);
  c.eta0 = j.value("eta0", d.eta0);
  c.lr_samples = j.value("lr_samples", d.lr_samples);
  c.loss_tolerance = j.value("loss_tolerance", d.loss_tolerance);
  c.centered = j.value("centered", d.centered);
  c.divergence_factor = j.value("divergence_factor", d.divergence_factor);
}

TrainConfig inference_config(const std::string& inference, TrainConfig base) {
  if (inference == "NN") {
    base.lr_multiplier = 1.0;
    base.l2 = 0.0;
  } else if (inference == "NN+") {
    base.lr_multiplier = 8.0;
    base.l2 = 1e-7;
  } else {
    throw std::invalid_argument("unknown finite-width inference '" + inference + "' (expected NN or NN+)");
  }
  return base;
}

void to_json(nlohmann::json& j, const RunRecord& r) {
  nlohmann::json series = nlohmann::json::array();
  for (const auto& m : r.metrics)
    series.push_back({{"step", m.step},
                      {"train_loss", m.train_loss},
                      {"train_acc", m.train_acc},
                      {"test_acc", m.test_acc},
                      {"test_mse", m.test_mse}});
  j = {{"digest", r.digest},
       {"config", r.config},
       {"provenance", r.provenance},
       {"eta", r.eta},
       {"best_test_acc", r.best_test_acc},
       {"best_train_acc", r.best_train_acc},
       {"final_test_mse", r.final_test_mse},
       {"final_step", r.final_step},
       {"success", r.success},
       {"status", r.status},
       {"metrics", series}};
}

void write_run_record(const std::string& directory, const RunRecord& r) {
  std::filesystem::create_directories(directory);
  const std::filesystem::path base = std::filesystem::path(directory) / r.digest;
  std::ofstream json(base.string() + ".json");
  json << nlohmann::json(r).dump(2) << "\n";
  std::ofstream csv(base.string() + ".metrics.csv");
  csv << "step,train_loss,train_acc,test_acc\n";
  for (const auto& m : r.metrics)
    csv << m.step << ',' << format_double(m.train_loss) << ',' << format_double(m.train_acc) << ','
        << format_double(m.test_acc) << '\n';
  if (!json || !csv) throw std::runtime_error("write_run_record: cannot write under " + directory);
}

BatchSchedule::BatchSchedule(std::uint64_t seed, int m, int batch_size)
    : rng_(seed, 0x5c4ed), m_(m), batch_size_(batch_size) {
  if (m < 1 || batch_size < 1 || batch_size > m) throw std::invalid_argument("BatchSchedule: bad sizes");
}

std::vector<int> BatchSchedule::batch(int step) {
  const auto end = static_cast<std::size_t>(step + 1) * static_cast<std::size_t>(batch_size_);
  while (order_.size() < end) {
    const auto epoch = random_permutation(rng_, m_);
    order_.insert(order_.end(), epoch.begin(), epoch.end());
  }
  return {order_.begin() + static_cast<std::ptrdiff_t>(end - static_cast<std::size_t>(batch_size_)),
          order_.begin() + static_cast<std::ptrdiff_t>(end)};
}

namespace {

std::string params_digest(const ParamSet& p) {
  const Vector flat = p.flatten();
  return digest_hex(std::string_view(reinterpret_cast<const char*>(flat.data()), static_cast<std::size_t>(flat.size()) * sizeof(double)));
}

}  // namespace

TrainResult train(const NetworkSpec& spec, const ParamSet& params0, const Dataset& ds, const TrainConfig& cfg,
                  const TrainObserver& observer) {
  const Split& tr = ds.train;
  const Split& te = ds.test;
  cfg.validate(tr.size());
  check_params(spec, params0);

  RunRecord rec;
  rec.config = {{"spec", spec}, {"train", cfg}, {"params", params_digest(params0)}};
  rec.provenance = ds.provenance;
  rec.digest = digest_hex(nlohmann::json{{"config", rec.config}, {"provenance", rec.provenance}}.dump());

  const int m = static_cast<int>(tr.size());
  BatchSchedule schedule(cfg.seed, m, cfg.batch_size);
  double eta0 = cfg.eta0;
  if (eta0 <= 0.0) {
    Rng lr_rng(cfg.seed, 0x1e7a);
    BatchSchedule peek(cfg.seed, m, cfg.batch_size);
    eta0 = estimate_lr(spec, lr_rng, tr.x.rows(peek.batch(0)), cfg.lr_samples).eta0;
  }
  rec.eta = cfg.lr_multiplier * eta0;

  RowMatrix offset_train, offset_test;
  if (cfg.centered) {
    offset_train = predict(spec, params0, tr.x);
    offset_test = predict(spec, params0, te.x);
  }
  auto logits_on = [&](const ParamSet& p, const ImageBatch& x, const RowMatrix& offset) {
    RowMatrix f = predict(spec, p, x);
    if (cfg.centered) f -= offset;
    return f;
  };

  ParamSet params = params0;
  ParamSet velocity = params0.zeros_like();
  double reference_loss = -1.0;
  int step = 0;
  for (;; ++step) {
    if (step % cfg.eval_interval == 0 || step == cfg.max_steps) {
      const RowMatrix f_train = logits_on(params, tr.x, offset_train);
      const RowMatrix f_test = logits_on(params, te.x, offset_test);
      const Evaluation et = evaluate_logits(f_train, tr.y);
      const Evaluation ev = evaluate_logits(f_test, te.y);
      MetricRow row{step, mse_l2_loss(f_train, tr.y.values, params, cfg.l2).loss, et.accuracy, ev.accuracy, ev.mse};
      rec.metrics.push_back(row);
      rec.best_test_acc = std::max(rec.best_test_acc, row.test_acc);
      rec.best_train_acc = std::max(rec.best_train_acc, row.train_acc);
      rec.final_test_mse = row.test_mse;
      if (observer) observer(step, params);
      if (row.train_acc >= cfg.early_stop_acc) {
        rec.status = "early_stop";
        break;
      }
      if (cfg.loss_tolerance > 0.0 && row.train_loss <= cfg.loss_tolerance) {
        rec.status = "converged";
        break;
      }
    }
    if (step == cfg.max_steps) {
      rec.status = "max_steps";
      break;
    }

    const std::vector<int> idx = schedule.batch(step);
    const ImageBatch xb = tr.x.rows(idx);
    ForwardTrace trace;
    RowMatrix logits = forward(spec, params, xb, &trace);
    if (cfg.centered)
      for (std::size_t i = 0; i < idx.size(); ++i) logits.row(static_cast<Eigen::Index>(i)) -= offset_train.row(idx[i]);
    const LossValue lv = mse_l2_loss(logits, tr.y.rows(idx).values, params, cfg.l2);
    if (reference_loss < 0.0) reference_loss = lv.loss;
    if (!std::isfinite(lv.loss) || lv.loss > cfg.divergence_factor * std::max(reference_loss, 1e-300)) {
      rec.status = "diverged";
      break;
    }
    ParamSet grad = backward(spec, params, trace, lv.cotangent);
    if (cfg.l2 != 0.0) grad.axpy(cfg.l2, params);
    velocity.scale(cfg.momentum);
    velocity.axpy(-rec.eta, grad);
    params.axpy(1.0, velocity);
  }
  rec.final_step = step;
  rec.success = rec.best_train_acc >= cfg.success_acc;
  return {std::move(params), std::move(rec)};
}

}  // namespace symsys
