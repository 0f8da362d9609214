#pragma once

#include <utility>

#include "symsys/networks/params.hpp"

namespace symsys {

/// Realizes a network inside a larger function class with identical outputs:
///   GAP_n → VEC_n      readout spread evenly over sites (w/√d)
///   VEC_n → LCN_n      shared filters replicated per site
///   LCN_n → VEC_{dn}   site α of the LCN lives in channel band [αn, αn+n)
///   LCN_n → FCN_{dn}   local connectivity as a block-sparse dense layer
/// Any other (source, target) pair throws.
std::pair<NetworkSpec, ParamSet> embed(const NetworkSpec& source, const ParamSet& params, ModelKind target);

}  // namespace symsys
