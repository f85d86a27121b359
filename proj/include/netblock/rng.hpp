#pragma once

#include <cmath>
#include <cstdint>

namespace netblock {

// Counter-based 64-bit generator (splitmix64 output function over an
// incrementing counter). Parallel replicates get independent streams by
// deriving the key from (master seed, replicate index, purpose tag), so a
// run is reproducible regardless of how replicates are scheduled.
class Rng {
 public:
  // Purpose tags keep draws for different jobs inside one replicate on
  // disjoint streams.
  enum Purpose : std::uint64_t {
    kCovariance = 1,
    kSignal = 2,
    kSample = 3,
    kGraph = 4,
    kGeneric = 5,
  };

  explicit Rng(std::uint64_t key) : state_(key) {}

  static Rng stream(std::uint64_t master_seed, std::uint64_t replicate,
                    std::uint64_t purpose) {
    std::uint64_t s = mix(master_seed ^ 0x8000000080003105ULL);
    s = mix(s ^ (replicate * 0x9E3779B97F4A7C15ULL));
    s = mix(s ^ (purpose * 0xD1342543DE82EF95ULL));
    return Rng(s);
  }

  // Sub-seed for a replicate-scoped generator spec.
  static std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t replicate) {
    return Rng::stream(master_seed, replicate, 0xD5).next_u64();
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Box-Muller; the spare value is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] so the log is finite.
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace netblock
