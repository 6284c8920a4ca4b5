#pragma once

// Counter-based random numbers (Philox4x32-10). A draw is a pure function of
// (seed, counter), so Monte Carlo streams can be indexed by path and
// coefficient without any sequential generator state.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace gpd {

class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;

  explicit Philox4x32(std::uint64_t seed) noexcept
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)} {}

  Counter operator()(Counter ctr) const noexcept {
    std::array<std::uint32_t, 2> key = key_;
    for (int round = 0; round < 10; ++round) {
      ctr = single_round(ctr, key);
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static Counter single_round(const Counter& c,
                              const std::array<std::uint32_t, 2>& k) noexcept {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }

  std::array<std::uint32_t, 2> key_;
};

// Stream tags keep unrelated consumers of the same seed apart.
enum class Stream : std::uint32_t {
  KarhunenLoeve = 1,
  JointGaussian = 2,
  PointSampling = 3,
  NetShuffle = 4,
  Probe = 5,
  Pairs = 6,
  Quadrature = 7,
};

// Draws keyed by (seed, stream, a, b). Each call consumes one Philox block.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, Stream stream) noexcept
      : philox_(seed), stream_(static_cast<std::uint32_t>(stream)) {}

  // Two independent uniforms in the open interval (0, 1).
  std::pair<double, double> uniform2(std::uint64_t a,
                                     std::uint32_t b) const noexcept {
    const auto r = philox_({static_cast<std::uint32_t>(a),
                            static_cast<std::uint32_t>(a >> 32), b, stream_});
    return {to_unit(r[0], r[1]), to_unit(r[2], r[3])};
  }

  // Two independent standard normals (Box-Muller on uniform2).
  std::pair<double, double> normal2(std::uint64_t a,
                                    std::uint32_t b) const noexcept {
    const auto [u1, u2] = uniform2(a, b);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
  }

  double uniform(std::uint64_t a, std::uint32_t b) const noexcept {
    return uniform2(a, b).first;
  }

 private:
  static double to_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
    const std::uint64_t bits =
        (static_cast<std::uint64_t>(hi >> 5) << 26) | (lo >> 6);
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  Philox4x32 philox_;
  std::uint32_t stream_;
};

}  // namespace gpd
