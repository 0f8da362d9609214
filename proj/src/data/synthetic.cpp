#include <cmath>
#include <stdexcept>

#include "symsys/data/sources.hpp"

namespace symsys {

void to_json(nlohmann::json& j, const SyntheticConfig& c) {
  j = {{"grid", c.grid},           {"m_train", c.m_train},
       {"m_test", c.m_test},       {"classes", c.classes},
       {"noise", c.noise},         {"template_size", c.template_size},
       {"template_scale", c.template_scale}};
}

void from_json(const nlohmann::json& j, SyntheticConfig& c) {
  const SyntheticConfig d;
  c.grid = j.value("grid", d.grid);
  c.m_train = j.value("m_train", d.m_train);
  c.m_test = j.value("m_test", d.m_test);
  c.classes = j.value("classes", d.classes);
  c.noise = j.value("noise", d.noise);
  c.template_size = j.value("template_size", d.template_size);
  c.template_scale = j.value("template_scale", d.template_scale);
}

namespace {

void check(const SyntheticConfig& cfg) {
  cfg.grid.validate();
  if (cfg.classes < 2) throw std::invalid_argument("gen_synthetic: need at least 2 classes");
  if (cfg.m_train < cfg.classes || cfg.m_test < cfg.classes)
    throw std::invalid_argument("gen_synthetic: each split needs at least one example per class");
  if (cfg.template_size < 1 || cfg.template_size > cfg.grid.height || cfg.template_size > cfg.grid.width)
    throw std::invalid_argument("gen_synthetic: grid is smaller than the template");
}

Split draw_split(Rng& rng, const SyntheticConfig& cfg, const std::vector<RowMatrix>& templates, int m) {
  const SpatialGrid& g = cfg.grid;
  const int c = g.channels;
  const int t = cfg.template_size;
  RowMatrix x(m, g.features());
  std::vector<int> labels(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const int label = static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.classes)));
    const int origin = static_cast<int>(rng.below(static_cast<std::uint64_t>(g.sites())));
    for (Eigen::Index f = 0; f < x.cols(); ++f) x(i, f) = cfg.noise * rng.normal();
    const RowMatrix& patch = templates[static_cast<std::size_t>(label)];
    for (int u = 0; u < t; ++u)
      for (int v = 0; v < t; ++v) {
        const int site = g.shifted(origin, u, v);
        for (int ch = 0; ch < c; ++ch) x(i, site * c + ch) += patch(0, (u * t + v) * c + ch);
      }
    labels[static_cast<std::size_t>(i)] = label;
  }
  return {ImageBatch(g, std::move(x)), LabelBatch::one_hot(labels, cfg.classes)};
}

}  // namespace

std::vector<RowMatrix> synthetic_templates(std::uint64_t seed, const SyntheticConfig& cfg) {
  check(cfg);
  Rng rng(seed, 0);
  const int c = cfg.grid.channels;
  const int pixels = cfg.template_size * cfg.template_size;
  // Every template pixel has norm scale·√C, so classes differ only in channel
  // directions and pixel norms mark where a template sits, never which one.
  const double radius = cfg.template_scale * std::sqrt(static_cast<double>(c));
  std::vector<RowMatrix> out;
  for (int k = 0; k < cfg.classes; ++k) {
    RowMatrix patch(1, pixels * c);
    for (int p = 0; p < pixels; ++p) {
      auto px = patch.block(0, p * c, 1, c);
      for (int ch = 0; ch < c; ++ch) px(0, ch) = rng.normal();
      px *= radius / px.norm();
    }
    out.push_back(std::move(patch));
  }
  return out;
}

Dataset gen_synthetic(std::uint64_t seed, const SyntheticConfig& cfg) {
  const auto templates = synthetic_templates(seed, cfg);
  Rng train_rng(seed, 1), test_rng(seed, 2);
  Dataset ds;
  ds.train = draw_split(train_rng, cfg, templates, cfg.m_train);
  ds.test = draw_split(test_rng, cfg, templates, cfg.m_test);
  ds.provenance.source = "synthetic";
  ds.provenance.seed = seed;
  ds.provenance.notes = {{"generator", cfg}, {"rng", Rng::kAlgorithm}};
  return ds;
}

}  // namespace symsys
