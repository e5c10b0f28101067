#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace parity {

// Deterministic random source. Streams derived from (seed, stream_id) are
// independent of the order in which other streams are consumed, so replicated
// simulations can be parallelized or reordered without changing results.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(mix(mix(seed) ^ 0x9E3779B97F4A7C15ull)) {}

    static Rng stream(std::uint64_t seed, std::uint64_t stream_id) {
        return Rng(mix(seed) ^ mix(mix(stream_id) + 0x632BE59BD9B4E019ull));
    }

    std::uint64_t next_u64() { return gen_(); }

    // uniform on [0, 1)
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // standard normal via Box-Muller; consumes exactly two uniforms per call
    double normal() {
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    int bernoulli(double p) { return uniform01() < p ? 1 : 0; }

    // index sampled from an unnormalized nonnegative weight vector
    std::size_t categorical(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (!(total > 0.0)) throw std::invalid_argument("categorical: weights sum to zero");
        double u = uniform01() * total;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            u -= weights[i];
            if (u < 0.0) return i;
        }
        return weights.size() - 1;
    }

private:
    static constexpr double kPi = 3.14159265358979323846;

    // splitmix64 finalizer
    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ull;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        return x ^ (x >> 31);
    }

    std::mt19937_64 gen_;
};

}  // namespace parity
