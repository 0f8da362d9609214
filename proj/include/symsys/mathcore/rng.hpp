#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace symsys {

/// Counter-based generator (Philox4x32-10) keyed by a 64-bit seed.
///
/// The 128-bit counter holds a 64-bit block index and the 64-bit stream id, so
/// every (seed, stream) pair addresses an independent, reproducible sequence.
/// Normals use Box-Muller on 53-bit uniforms; both the bit generator and the
/// transforms are part of `kAlgorithm`, and any change to either bumps it.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm = "philox4x32-10+boxmuller/v1";

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// Fresh generator on another stream of the same seed, positioned at its start.
  Rng substream(std::uint64_t stream) const { return Rng(seed_, stream); }

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [0, n); rejection sampling keeps it unbiased.
  std::uint64_t below(std::uint64_t n);
  double normal();

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// i.i.d. standard normal tensor, row-major over `shape`.
std::vector<double> gaussian(Rng& rng, std::span<const std::size_t> shape);

Eigen::MatrixXd gaussian_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols);

}  // namespace symsys
