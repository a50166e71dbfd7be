#pragma once

#include <cstdint>
#include <random>

namespace qcs {

/// Seedable, splittable pseudo-random generator.
///
/// Every stochastic routine takes an explicit `Rng&`. Independent streams are
/// derived with `split(index)`, which hashes (seed, stream, index) so that a
/// sweep point or a Monte Carlo trial gets the same numbers no matter which
/// order the work is done in.
class Rng {
  public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream), engine_(mix(seed, stream)) {
    }

    std::uint64_t seed() const {
        return seed_;
    }
    std::uint64_t stream() const {
        return stream_;
    }

    Rng split(std::uint64_t index) const {
        return Rng(seed_, mix(stream_ + 0x9e3779b97f4a7c15ULL, index));
    }

    std::uint64_t next_u64() {
        return engine_();
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    double normal() {
        return std::normal_distribution<double>{}(engine_);
    }

    bool bernoulli(double p) {
        return uniform() < p;
    }

    std::mt19937_64 &engine() {
        return engine_;
    }

  private:
    static std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }
    static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
        return splitmix64(splitmix64(a) ^ (b * 0xd1342543de82ef95ULL + 1));
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
};

}  // namespace qcs
