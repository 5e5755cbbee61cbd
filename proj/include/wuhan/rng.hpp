// Seeded random streams for per-trial measurement sampling.
//
// Each trial owns one Rng derived from (master seed, trial index), so trials
// can be run in any order or in parallel and still reproduce bit-for-bit.

#pragma once

#include <cstdint>
#include <random>

namespace wuhan {

/// splitmix64 finalizer; used only to decorrelate derived seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed of stream `index` under `master`. Index-based, never order-based.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return splitmix64(master + 0x9E3779B97F4A7C15ULL * (index + 1));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    static Rng for_trial(std::uint64_t master_seed, std::uint64_t trial_index) {
        return Rng(derive_seed(master_seed, trial_index));
    }

    /// Independent child stream; does not advance this stream.
    Rng derive(std::uint64_t stream) const { return Rng(derive_seed(seed_, stream)); }

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) from the top 53 bits; portable across stdlibs.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    int bit() { return static_cast<int>(engine_() >> 63); }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

} // namespace wuhan
