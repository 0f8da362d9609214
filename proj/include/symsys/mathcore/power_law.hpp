#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace symsys {

struct PowerLawPoint {
  double m = 0.0;  ///< sample count
  double v = 0.0;  ///< positive metric, e.g. test MSE
};

/// One straight-line segment in (log m, log v) space, v ≈ exp(intercept)·m^(-exponent).
/// `exponent` is the scaling exponent of a learning curve; it has nothing to do
/// with the spatial site index used by images and kernels.
struct ScalingFit {
  double exponent = 0.0;
  double intercept = 0.0;
  std::optional<double> breakpoint;  ///< sample count at the split (two-segment fits only)
  double residual = 0.0;             ///< mean squared log-space error over the segment's points
  std::size_t first = 0;             ///< index of the segment's first point
  std::size_t count = 0;
};

enum class SplitMode {
  /// Continuous two-piece fit with the knot at a data point, knot chosen by
  /// exhaustive scan of the total squared error.
  Scan,
  /// Two independent lines over the first `fixed_split` points and the rest.
  Fixed,
};

struct PowerLawOptions {
  SplitMode mode = SplitMode::Scan;
  std::size_t fixed_split = 0;
};

struct PowerLawFit {
  std::vector<ScalingFit> segments;
  double total_residual = 0.0;  ///< sum of squared log-space errors over all points

  /// Second-segment exponent minus first; positive means the curve steepens.
  double exponent_gain() const;
};

/// Least-squares power-law fit with one or two segments. Points must be sorted
/// by m; every m and v must be strictly positive.
PowerLawFit fit_power_law(std::span<const PowerLawPoint> points, int segments,
                          const PowerLawOptions& options = {});

}  // namespace symsys
