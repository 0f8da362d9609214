#include "symsys/mathcore/power_law.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

namespace symsys {
namespace {

struct LogPoints {
  Eigen::VectorXd x, y;
};

LogPoints to_log(std::span<const PowerLawPoint> points) {
  LogPoints out{Eigen::VectorXd(points.size()), Eigen::VectorXd(points.size())};
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].m > 0.0) || !(points[i].v > 0.0))
      throw std::invalid_argument("fit_power_law: sample counts and metric values must be positive");
    if (i > 0 && !(points[i].m > points[i - 1].m))
      throw std::invalid_argument("fit_power_law: points must be strictly increasing in m");
    out.x[i] = std::log(points[i].m);
    out.y[i] = std::log(points[i].v);
  }
  return out;
}

ScalingFit fit_line(const LogPoints& lp, std::size_t first, std::size_t count) {
  const auto x = lp.x.segment(first, count);
  const auto y = lp.y.segment(first, count);
  const double mx = x.mean(), my = y.mean();
  const double sxx = (x.array() - mx).square().sum();
  const double sxy = ((x.array() - mx) * (y.array() - my)).sum();
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  const double sse = (y.array() - intercept - slope * x.array()).square().sum();
  ScalingFit fit;
  fit.exponent = -slope;
  fit.intercept = intercept;
  fit.residual = sse / static_cast<double>(count);
  fit.first = first;
  fit.count = count;
  return fit;
}

PowerLawFit fit_hinge(const LogPoints& lp, const std::vector<double>& m) {
  const auto n = static_cast<std::size_t>(lp.x.size());
  PowerLawFit best;
  best.total_residual = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double xk = lp.x[k];
    Eigen::MatrixXd design(n, 3);
    for (std::size_t i = 0; i < n; ++i) {
      const double dx = lp.x[i] - xk;
      design(i, 0) = 1.0;
      design(i, 1) = dx < 0.0 ? dx : 0.0;
      design(i, 2) = dx > 0.0 ? dx : 0.0;
    }
    const Eigen::Vector3d coef = design.colPivHouseholderQr().solve(lp.y);
    const Eigen::VectorXd err = lp.y - design * coef;
    const double sse = err.squaredNorm();
    if (!(sse < best.total_residual)) continue;

    ScalingFit left, right;
    left.exponent = -coef[1];
    left.intercept = coef[0] - coef[1] * xk;
    left.first = 0;
    left.count = k + 1;
    left.residual = err.head(k + 1).squaredNorm() / static_cast<double>(k + 1);
    right.exponent = -coef[2];
    right.intercept = coef[0] - coef[2] * xk;
    right.first = k;
    right.count = n - k;
    right.residual = err.tail(n - k).squaredNorm() / static_cast<double>(n - k);
    left.breakpoint = right.breakpoint = m[k];
    best.segments = {left, right};
    best.total_residual = sse;
  }
  return best;
}

}  // namespace

double PowerLawFit::exponent_gain() const {
  if (segments.size() != 2) throw std::logic_error("exponent_gain: fit has no second segment");
  return segments[1].exponent - segments[0].exponent;
}

PowerLawFit fit_power_law(std::span<const PowerLawPoint> points, int segments, const PowerLawOptions& options) {
  if (segments != 1 && segments != 2) throw std::invalid_argument("fit_power_law: segments must be 1 or 2");
  const LogPoints lp = to_log(points);
  const std::size_t n = points.size();

  if (segments == 1) {
    if (n < 2) throw std::invalid_argument("fit_power_law: need at least 2 points");
    PowerLawFit out;
    out.segments = {fit_line(lp, 0, n)};
    out.total_residual = out.segments[0].residual * static_cast<double>(n);
    return out;
  }

  if (options.mode == SplitMode::Fixed) {
    const std::size_t split = options.fixed_split;
    if (split < 2 || n < split + 2)
      throw std::invalid_argument("fit_power_law: fixed split needs at least 2 points per side");
    PowerLawFit out;
    ScalingFit a = fit_line(lp, 0, split);
    ScalingFit b = fit_line(lp, split, n - split);
    a.breakpoint = b.breakpoint = points[split - 1].m;
    out.total_residual = a.residual * static_cast<double>(a.count) + b.residual * static_cast<double>(b.count);
    out.segments = {a, b};
    return out;
  }

  if (n < 3) throw std::invalid_argument("fit_power_law: need at least 3 points for a two-segment fit");
  std::vector<double> m(n);
  for (std::size_t i = 0; i < n; ++i) m[i] = points[i].m;
  return fit_hinge(lp, m);
}

}  // namespace symsys
