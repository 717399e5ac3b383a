#ifndef NCT_RNG_HPP
#define NCT_RNG_HPP

#include <cstdint>
#include <random>

namespace nct {

/// Deterministic uniform generator. The mapping from engine output to
/// doubles is spelled out here because the standard distributions are
/// implementation-defined; reports must be reproducible byte for byte.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0,1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform in [-1,1).
  double symmetric() { return uniform(-1.0, 1.0); }

  std::uint64_t integer() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace nct

#endif
