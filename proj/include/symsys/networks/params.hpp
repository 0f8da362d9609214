#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "symsys/mathcore/linalg.hpp"
#include "symsys/networks/spec.hpp"

namespace symsys {

enum class InitDist { Gaussian, Uniform };

std::string_view to_string(InitDist dist);
InitDist parse_init_dist(std::string_view name);

/// One layer's raw parameters. `weight` is row-major over `shape`:
///   FCN            [fan_in, n_out]
///   shared conv    [|β|, fan_in, n_out]
///   LCN            [d, |β|, fan_in, n_out]
///   readout        [readout_fan_in, k_out]   (VEC/LCN: site-major d·n)
/// `bias` has n_out entries, or d·n_out for LCN hidden layers.
struct LayerParams {
  std::vector<std::int64_t> shape;
  Vector weight;
  Vector bias;
};

/// Layers 0..L-1 are hidden layers, layer L the readout.
struct ParamSet {
  std::vector<LayerParams> layers;

  std::size_t size() const;
  double squared_norm() const;
  ParamSet zeros_like() const;
  /// this += a·x
  void axpy(double a, const ParamSet& x);
  void scale(double a);
  double dot(const ParamSet& other) const;
  double max_abs_diff(const ParamSet& other) const;
  bool all_finite() const;

  /// Flat view in layer order (weight then bias).
  Vector flatten() const;
  void unflatten(const Vector& flat);
};

/// Expected weight shapes for `spec`, in layer order.
std::vector<std::vector<std::int64_t>> param_shapes(const NetworkSpec& spec);
std::int64_t bias_size(const NetworkSpec& spec, std::size_t layer);
/// Throws when `params` do not have the shapes dictated by `spec`.
void check_params(const NetworkSpec& spec, const ParamSet& params);

/// Raw unit-variance parameters: N(0, 1) or U[-√3, √3]. Layers are drawn in
/// order, weights before biases.
ParamSet init_params(Rng& rng, const NetworkSpec& spec, InitDist dist = InitDist::Gaussian);
/// All-zero parameters with the shapes of `spec`.
ParamSet zero_params(const NetworkSpec& spec);

void write_params(const std::string& path, const NetworkSpec& spec, const ParamSet& params,
                  std::uint64_t seed, InitDist dist);
struct StoredParams {
  NetworkSpec spec;
  ParamSet params;
  std::uint64_t seed = 0;
  InitDist dist = InitDist::Gaussian;
};
StoredParams read_params(const std::string& path);

}  // namespace symsys
