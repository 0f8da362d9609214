#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "symsys/harness/config.hpp"
#include "symsys/networks/couple.hpp"

namespace symsys {

/// One (architecture, group, check) line of the suite. Licensed entries must
/// stay at or below `threshold`; expected-variant witnesses must reach it.
struct SuiteEntry {
  std::string model;  ///< "GAP", "LAP(4)", ...
  std::string width;  ///< "n" (finite) or "inf"
  std::string group;
  std::string check;  ///< "coupled:NN", "kernel:NTK", "prediction:NNGP", ...
  bool licensed = true;
  double deviation = 0.0;
  double threshold = 0.0;
  bool pass = false;
};
void to_json(nlohmann::json& j, const SuiteEntry& e);

struct SuiteReport {
  std::vector<SuiteEntry> entries;
  bool all_pass() const;
};
void to_json(nlohmann::json& j, const SuiteReport& r);

/// Trains `params0` on `ds` and a copy on g·ds, the copy starting from the
/// coupled parameters (or from `params0` itself when `couple` is false), with
/// one shared η and batch schedule. Returns the largest |f_t(x) - f_t^τ(τx)|
/// over held-out points and logged steps.
struct CoupledRun {
  double max_deviation = 0.0;
  int checkpoints = 0;
  double eta = 0.0;
};
CoupledRun coupled_trajectory(const NetworkSpec& spec, const Dataset& ds, const GroupElement& g, TrainConfig cfg,
                              std::uint64_t seed, bool couple = true, InitDist dist = InitDist::Gaussian);

/// Largest relative deviation max|p_τ - p|/max|p| of kernel-regression
/// predictions when train and test inputs are all transformed by g.
double prediction_deviation(const NetworkSpec& spec, KernelFlavor flavor, const Dataset& ds, const GroupElement& g,
                            const GramOptions& gram = {});

/// Runs the finite- and infinite-width checks listed in config["suite"].
SuiteReport verify_symmetry_suite(const nlohmann::json& config);

}  // namespace symsys
