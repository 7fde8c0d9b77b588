#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <utility>

// Counter-based random number generation (Philox-4x32 with 10 rounds).
// Every draw is a pure function of (seed, counter), so parallel workers can
// sample any mode at any time without shared state, and results do not
// depend on scheduling order.

namespace qdc::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

namespace detail {

inline constexpr std::uint32_t philox_m0 = 0xD2511F53u;
inline constexpr std::uint32_t philox_m1 = 0xCD9E8D57u;
inline constexpr std::uint32_t philox_w0 = 0x9E3779B9u;
inline constexpr std::uint32_t philox_w1 = 0xBB67AE85u;

inline Counter philox_round(const Counter& c, const Key& k) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(philox_m0) * c[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(philox_m1) * c[2];
  return {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0],
          static_cast<std::uint32_t>(p1),
          static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1],
          static_cast<std::uint32_t>(p0)};
}

}  // namespace detail

// Ten Philox rounds with the Weyl key schedule.
inline Counter philox4x32_10(Counter counter, Key key) {
  for (int round = 0; round < 9; ++round) {
    counter = detail::philox_round(counter, key);
    key[0] += detail::philox_w0;
    key[1] += detail::philox_w1;
  }
  return detail::philox_round(counter, key);
}

// Map 32 uniform bits into the open interval (0, 1).
inline double to_unit_interval(std::uint32_t bits) {
  return (static_cast<double>(bits) + 0.5) * 0x1p-32;
}

// Two standard normal deviates from two uniforms (Box-Muller).
inline std::pair<double, double> gaussian_pair(double u1, double u2) {
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * 3.141592653589793238462643383279502884 * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

// Stream identifiers separating statistically independent uses of the
// counter space within one simulation.
enum Stream : std::uint32_t {
  stream_vacuum_1 = 1,  // vacuum input of squeezer 1
  stream_vacuum_2 = 2,  // vacuum input of squeezer 2
  stream_signal = 3,    // classical image ensemble
};

// Deterministic Gaussian source: one Philox block per (sample, block,
// stream) yields two independent unit circular complex amplitudes
// (E|c|^2 = 1), one per lane.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)} {}

  Counter raw(std::uint32_t sample, std::uint32_t block,
              std::uint32_t stream) const {
    return philox4x32_10({sample, block, 0u, stream}, key_);
  }

  std::pair<std::complex<double>, std::complex<double>> complex_pair(
      std::uint32_t sample, std::uint32_t block, std::uint32_t stream) const {
    const Counter w = raw(sample, block, stream);
    const auto [x0, y0] = gaussian_pair(to_unit_interval(w[0]),
                                        to_unit_interval(w[1]));
    const auto [x1, y1] = gaussian_pair(to_unit_interval(w[2]),
                                        to_unit_interval(w[3]));
    constexpr double inv_sqrt2 = 0.7071067811865475244;
    return {std::complex<double>(x0 * inv_sqrt2, y0 * inv_sqrt2),
            std::complex<double>(x1 * inv_sqrt2, y1 * inv_sqrt2)};
  }

  std::uint64_t seed() const {
    return static_cast<std::uint64_t>(key_[1]) << 32 | key_[0];
  }

 private:
  Key key_;
};

}  // namespace qdc::rng
