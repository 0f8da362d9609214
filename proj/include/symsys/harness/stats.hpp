#pragma once

#include <span>
#include <vector>

namespace symsys {

double mean(std::span<const double> v);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double stddev(std::span<const double> v);
/// stddev/√n; 0 for fewer than two values.
double std_error(std::span<const double> v);
double median(std::vector<double> v);

/// Least-squares nondecreasing fit (pool-adjacent-violators) with weights.
std::vector<double> isotonic_increasing(std::span<const double> y, std::span<const double> w);

/// One step of a "statistically nonincreasing" sequence: next ≤ prev + z·√(se_prev² + se_next²).
bool within_noise_below(double prev, double prev_se, double next, double next_se, double z = 2.0);

}  // namespace symsys
