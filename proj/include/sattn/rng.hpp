#pragma once

#include <cstdint>
#include <cmath>

namespace sattn {

/// Counter-based random stream keyed by (seed, stream).
///
/// Each draw hashes (seed, stream, counter) through two rounds of the
/// splitmix64 finalizer, so samples are a pure function of the key and the
/// draw index: parallel batches get reproducible, scheduling-independent
/// streams, and a given (seed, stream) replays bit-for-bit on one build.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(mix(seed + 0x9e3779b97f4a7c15ULL) ^ mix(stream + 0xbf58476d1ce4e5b9ULL))),
          counter_(0) {}

    std::uint64_t next_u64() {
        std::uint64_t z = key_ + (++counter_) * 0x9e3779b97f4a7c15ULL;
        return mix(mix(z));
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller; pairs are cached so draws stay aligned
    /// with the counter sequence.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // log(0) guarded by the half-open uniform: u1 in (0, 1].
        const double u1 = 1.0 - uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Simple multiply-shift; bias is < 2^-53 * n, irrelevant at our scales.
        return static_cast<std::uint64_t>(uniform01() * static_cast<double>(n)) % n;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_;
    std::uint64_t counter_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Reproducibility key for samplers: seed plus substream id.
struct SeedSpec {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    CounterRng rng() const { return CounterRng(seed, stream); }
};

}  // namespace sattn
