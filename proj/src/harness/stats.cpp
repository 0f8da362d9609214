#include "symsys/harness/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace symsys {

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean(v);
  double ss = 0.0;
  for (const double x : v) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double std_error(std::span<const double> v) {
  return v.size() < 2 ? 0.0 : stddev(v) / std::sqrt(static_cast<double>(v.size()));
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of an empty list");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<double> isotonic_increasing(std::span<const double> y, std::span<const double> w) {
  if (y.size() != w.size()) throw std::invalid_argument("isotonic_increasing: size mismatch");
  struct Block {
    double value, weight;
    std::size_t count;
  };
  std::vector<Block> blocks;
  for (std::size_t i = 0; i < y.size(); ++i) {
    blocks.push_back({y[i], w[i], 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].value > blocks.back().value) {
      Block b = blocks.back();
      blocks.pop_back();
      Block& a = blocks.back();
      const double wt = a.weight + b.weight;
      a.value = wt > 0.0 ? (a.value * a.weight + b.value * b.weight) / wt : 0.5 * (a.value + b.value);
      a.weight = wt;
      a.count += b.count;
    }
  }
  std::vector<double> out;
  for (const Block& b : blocks) out.insert(out.end(), b.count, b.value);
  return out;
}

bool within_noise_below(double prev, double prev_se, double next, double next_se, double z) {
  return next <= prev + z * std::sqrt(prev_se * prev_se + next_se * next_se);
}

}  // namespace symsys
