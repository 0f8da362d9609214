#pragma once

#include <optional>
#include <string>

#include "symsys/data/groups.hpp"
#include "symsys/networks/params.hpp"

namespace symsys {

/// Why (kind, tag) is not a symmetry of the finite-width learner, or nullopt
/// when it is. Rotations need Gaussian first-layer weights; permutations are
/// licensed for FCN under either distribution.
std::optional<std::string> coupling_violation(ModelKind kind, GroupTag tag, InitDist dist = InitDist::Gaussian);
inline bool coupling_licensed(ModelKind kind, GroupTag tag, InitDist dist = InitDist::Gaussian) {
  return !coupling_violation(kind, tag, dist).has_value();
}

/// First layer acted on by g so that the coupled network on g·X reproduces
/// the original network on X: every first-layer filter, read as an image,
/// is transformed by g. Other layers are copied.
ParamSet couple_params(const NetworkSpec& spec, const ParamSet& params, const GroupElement& g,
                       InitDist dist = InitDist::Gaussian);

}  // namespace symsys
