#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "symsys/data/dataset.hpp"

namespace symsys {

enum class ModelKind { FCN, LCN, VEC, GAP, LAP };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

/// Architecture description under NTK parameterization: weights are stored raw
/// and every layer scales by σ_w/√fan-in in the forward pass.
struct NetworkSpec {
  ModelKind kind = ModelKind::FCN;
  int depth = 3;        ///< hidden layers L
  int width = 32;       ///< channels per hidden layer n
  int half_window = 1;  ///< conv window is (2k+1)×(2k+1)
  int pool_window = 4;  ///< LAP window w
  SpatialGrid grid{8, 8, 3};
  double sigma_w2 = 2.0;
  double sigma_b2 = 0.01;
  int outputs = 4;
  bool bias = true;

  void validate() const;
  bool conv() const { return kind != ModelKind::FCN; }
  /// "FCN", "GAP", "LAP(4)", ...
  std::string name() const;

  /// Circular window offsets (dh, dw). An axis of extent 1 contributes only
  /// offset 0, so an H = 1 grid gives a 1-D ring window and a 1×1 grid a
  /// single tap.
  std::vector<std::pair<int, int>> offsets() const;
  /// src[β][α] = site read by output site α through offset β.
  std::vector<std::vector<int>> offset_sources() const;
  int pool_count() const;                 ///< number of LAP windows
  std::vector<int> pool_assignment() const;  ///< window index of every site
  int readout_fan_in() const;
  double sigma_w() const;
  double sigma_b() const;
};

void to_json(nlohmann::json& j, const NetworkSpec& s);
void from_json(const nlohmann::json& j, NetworkSpec& s);

/// Parses "FCN", "VEC", "LAP(4)", "LAP4" into kind (+ pool window).
NetworkSpec with_model_name(NetworkSpec base, std::string_view name);

}  // namespace symsys
