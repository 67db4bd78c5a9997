#pragma once

#include <cmath>
#include <cstdint>

namespace mialab {

// Counter-based pseudo-random stream keyed by (seed, substream index).
// Identical (seed, substream) always yields the identical draw sequence,
// independent of host thread count; distinct substreams are derived by
// re-keying, so trial-level parallelism never shares state.
//
// The core permutation is the splitmix64 finalizer applied to a keyed
// counter, which is statistically solid for Monte Carlo work at the scales
// used here.
class RngStream {
public:
  RngStream(std::uint64_t seed, std::uint64_t substream = 0)
      : key_(derive_key(seed, substream)), counter_(0) {}

  std::uint64_t next_u64() {
    std::uint64_t z = key_ + (++counter_) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in the open interval (0, 1).
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; two uniforms per draw, no cached spare,
  // so the consumed-counter arithmetic stays simple and reproducible.
  double next_gauss() {
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  // Fresh statistically independent stream keyed by (this stream's key, idx).
  // Derivation uses the construction-time key, not the current counter, so
  // substreams do not depend on how much of the parent was consumed.
  RngStream substream(std::uint64_t idx) const {
    RngStream child(0, 0);
    child.key_ = mix(key_ ^ mix(idx + 0x632BE59BD9B4E019ull));
    child.counter_ = 0;
    return child;
  }

private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 33)) * 0xFF51AFD7ED558CCDull;
    z = (z ^ (z >> 33)) * 0xC4CEB9FE1A85EC53ull;
    return z ^ (z >> 33);
  }

  static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t sub) {
    return mix(mix(seed + 0x9E3779B97F4A7C15ull) ^
               mix(sub * 0xD1B54A32D192ED03ull + 0x8BB84B93962EACC9ull));
  }

  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace mialab
