#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>

namespace shuffleval {

// All randomness in the simulation engine flows through the generators
// below. The standard-library distributions are deliberately avoided:
// their output sequences are implementation-defined, and seeded runs must
// stay bit-identical across toolchains and worker counts.

inline constexpr std::uint64_t kGolden64 = 0x9E3779B97F4A7C15ull;

struct SplitMix64 {
    std::uint64_t state = 0;

    std::uint64_t next() {
        std::uint64_t z = (state += kGolden64);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
};

// SplitMix64 finalizer as a standalone 64-bit mixer.
inline std::uint64_t mix64(std::uint64_t z) {
    z += kGolden64;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Independent per-trial stream seed: a pure function of (root, index), so
// trial results cannot depend on scheduling order.
inline std::uint64_t trial_seed(std::uint64_t root, std::uint64_t index) {
    return mix64(mix64(root) ^ mix64(index + 1));
}

class Xoshiro256pp {
  public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        SplitMix64 sm{seed};
        for (auto& word : state_) word = sm.next();
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
};

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t u64() { return engine_.next(); }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // Unbiased uniform draw from {0..bound-1} (Lemire multiply-with-rejection).
    std::uint64_t below(std::uint64_t bound) {
        std::uint64_t x = u64();
        __uint128_t m = static_cast<__uint128_t>(x) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                x = u64();
                m = static_cast<__uint128_t>(x) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    double normal(double mean, double sd) {
        if (!have_spare_) {
            double u1 = uniform();
            while (u1 <= 0.0) u1 = uniform();
            const double u2 = uniform();
            const double r = std::sqrt(-2.0 * std::log(u1));
            const double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
            spare_ = r * std::sin(theta);
            have_spare_ = true;
            return mean + sd * r * std::cos(theta);
        }
        have_spare_ = false;
        return mean + sd * spare_;
    }

    double exponential(double mean) {
        double u = uniform();
        while (u <= 0.0) u = uniform();
        return -mean * std::log(u);
    }

    // Knuth multiplication method; fine for the arrival means in scope.
    std::int64_t poisson(double mean) {
        if (mean <= 0.0) return 0;
        const double limit = std::exp(-mean);
        std::int64_t count = -1;
        double prod = 1.0;
        do {
            prod *= uniform();
            ++count;
        } while (prod > limit);
        return count;
    }

    // Geometric number of whole periods with mean `mean_periods` (support
    // >= 1): the discrete-time analog of an exponential lifetime.
    std::int64_t geometric_lifetime(double mean_periods) {
        if (mean_periods <= 1.0) return 1;
        const double log_keep = std::log1p(-1.0 / mean_periods);
        double u = uniform();
        while (u <= 0.0) u = uniform();
        return 1 + static_cast<std::int64_t>(std::floor(std::log(u) / log_keep));
    }

    template <typename T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

  private:
    Xoshiro256pp engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace shuffleval
