#include "symsys/networks/params.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "symsys/mathcore/container.hpp"

namespace symsys {

std::string_view to_string(InitDist dist) { return dist == InitDist::Gaussian ? "gaussian" : "uniform"; }

InitDist parse_init_dist(std::string_view name) {
  if (name == "gaussian") return InitDist::Gaussian;
  if (name == "uniform") return InitDist::Uniform;
  throw std::invalid_argument("unknown init distribution '" + std::string(name) + "'");
}

std::size_t ParamSet::size() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

double ParamSet::squared_norm() const {
  double s = 0.0;
  for (const auto& l : layers) s += l.weight.squaredNorm() + l.bias.squaredNorm();
  return s;
}

ParamSet ParamSet::zeros_like() const {
  ParamSet z;
  for (const auto& l : layers)
    z.layers.push_back({l.shape, Vector::Zero(l.weight.size()), Vector::Zero(l.bias.size())});
  return z;
}

void ParamSet::axpy(double a, const ParamSet& x) {
  if (x.layers.size() != layers.size()) throw std::invalid_argument("ParamSet::axpy: layer count mismatch");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    layers[i].weight += a * x.layers[i].weight;
    layers[i].bias += a * x.layers[i].bias;
  }
}

void ParamSet::scale(double a) {
  for (auto& l : layers) {
    l.weight *= a;
    l.bias *= a;
  }
}

double ParamSet::dot(const ParamSet& other) const {
  double s = 0.0;
  for (std::size_t i = 0; i < layers.size(); ++i)
    s += layers[i].weight.dot(other.layers[i].weight) + layers[i].bias.dot(other.layers[i].bias);
  return s;
}

double ParamSet::max_abs_diff(const ParamSet& other) const {
  if (other.layers.size() != layers.size()) throw std::invalid_argument("ParamSet::max_abs_diff: layer count mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].weight.size() > 0)
      m = std::max(m, (layers[i].weight - other.layers[i].weight).cwiseAbs().maxCoeff());
    if (layers[i].bias.size() > 0)
      m = std::max(m, (layers[i].bias - other.layers[i].bias).cwiseAbs().maxCoeff());
  }
  return m;
}

bool ParamSet::all_finite() const {
  for (const auto& l : layers)
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  return true;
}

Vector ParamSet::flatten() const {
  Vector flat(static_cast<Eigen::Index>(size()));
  Eigen::Index at = 0;
  for (const auto& l : layers) {
    flat.segment(at, l.weight.size()) = l.weight;
    at += l.weight.size();
    flat.segment(at, l.bias.size()) = l.bias;
    at += l.bias.size();
  }
  return flat;
}

void ParamSet::unflatten(const Vector& flat) {
  if (flat.size() != static_cast<Eigen::Index>(size())) throw std::invalid_argument("ParamSet::unflatten: size mismatch");
  Eigen::Index at = 0;
  for (auto& l : layers) {
    l.weight = flat.segment(at, l.weight.size());
    at += l.weight.size();
    l.bias = flat.segment(at, l.bias.size());
    at += l.bias.size();
  }
}

std::vector<std::vector<std::int64_t>> param_shapes(const NetworkSpec& spec) {
  spec.validate();
  const std::int64_t n = spec.width, c = spec.grid.channels, d = spec.grid.sites();
  const auto taps = static_cast<std::int64_t>(spec.offsets().size());
  std::vector<std::vector<std::int64_t>> shapes;
  for (int l = 0; l < spec.depth; ++l) {
    const std::int64_t fan_in = l == 0 ? (spec.kind == ModelKind::FCN ? c * d : c) : n;
    switch (spec.kind) {
      case ModelKind::FCN: shapes.push_back({fan_in, n}); break;
      case ModelKind::LCN: shapes.push_back({d, taps, fan_in, n}); break;
      default: shapes.push_back({taps, fan_in, n}); break;
    }
  }
  shapes.push_back({spec.readout_fan_in(), spec.outputs});
  return shapes;
}

std::int64_t bias_size(const NetworkSpec& spec, std::size_t layer) {
  if (!spec.bias) return 0;
  if (layer == static_cast<std::size_t>(spec.depth)) return spec.outputs;
  return spec.kind == ModelKind::LCN ? static_cast<std::int64_t>(spec.grid.sites()) * spec.width : spec.width;
}

void check_params(const NetworkSpec& spec, const ParamSet& params) {
  const auto shapes = param_shapes(spec);
  if (params.layers.size() != shapes.size())
    throw std::invalid_argument("params have " + std::to_string(params.layers.size()) + " layers, " + spec.name() +
                                " needs " + std::to_string(shapes.size()));
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    const auto& l = params.layers[i];
    const auto count = std::accumulate(shapes[i].begin(), shapes[i].end(), std::int64_t{1}, std::multiplies<>());
    if (l.shape != shapes[i] || l.weight.size() != count || l.bias.size() != bias_size(spec, i))
      throw std::invalid_argument("params layer " + std::to_string(i) + " does not match " + spec.name());
  }
}

ParamSet init_params(Rng& rng, const NetworkSpec& spec, InitDist dist) {
  const auto shapes = param_shapes(spec);
  const double half = std::sqrt(3.0);
  auto draw = [&](Vector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
      v[i] = dist == InitDist::Gaussian ? rng.normal() : half * (2.0 * rng.uniform() - 1.0);
  };
  ParamSet p;
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    const auto count = std::accumulate(shapes[i].begin(), shapes[i].end(), std::int64_t{1}, std::multiplies<>());
    LayerParams l{shapes[i], Vector(count), Vector(bias_size(spec, i))};
    draw(l.weight);
    draw(l.bias);
    p.layers.push_back(std::move(l));
  }
  return p;
}

ParamSet zero_params(const NetworkSpec& spec) {
  const auto shapes = param_shapes(spec);
  ParamSet p;
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    const auto count = std::accumulate(shapes[i].begin(), shapes[i].end(), std::int64_t{1}, std::multiplies<>());
    p.layers.push_back({shapes[i], Vector::Zero(count), Vector::Zero(bias_size(spec, i))});
  }
  return p;
}

void write_params(const std::string& path, const NetworkSpec& spec, const ParamSet& params, std::uint64_t seed,
                  InitDist dist) {
  check_params(spec, params);
  Container c;
  c.header = {{"kind", "params"}, {"spec", spec}, {"seed", seed}, {"dist", to_string(dist)}};
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    const auto& l = params.layers[i];
    const std::string prefix = "layer" + std::to_string(i);
    c.arrays.push_back({prefix + ".weight", l.shape, std::vector<double>(l.weight.begin(), l.weight.end())});
    c.arrays.push_back({prefix + ".bias", {l.bias.size()}, std::vector<double>(l.bias.begin(), l.bias.end())});
  }
  write_container(path, c);
}

StoredParams read_params(const std::string& path) {
  const Container c = read_container(path);
  if (c.header.value("kind", "") != "params") throw std::runtime_error("read_params: " + path + " is not a parameter set");
  StoredParams out;
  out.spec = c.header.at("spec").get<NetworkSpec>();
  out.seed = c.header.value("seed", std::uint64_t{0});
  out.dist = parse_init_dist(c.header.value("dist", std::string("gaussian")));
  const auto shapes = param_shapes(out.spec);
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    const std::string prefix = "layer" + std::to_string(i);
    const auto& w = c.array(prefix + ".weight");
    const auto& b = c.array(prefix + ".bias");
    out.params.layers.push_back({w.shape, Eigen::Map<const Vector>(w.values.data(), static_cast<Eigen::Index>(w.values.size())),
                                 Eigen::Map<const Vector>(b.values.data(), static_cast<Eigen::Index>(b.values.size()))});
  }
  check_params(out.spec, out.params);
  return out;
}

}  // namespace symsys
