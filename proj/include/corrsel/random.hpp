#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <random>

namespace corrsel {

// One step of the splitmix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Derives an independent stream seed from a base seed and a sequence of indices.
// derive_seed(s, {a, b}) is stable across platforms and releases.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) noexcept;

// Explicitly seeded generator. Distribution code is implemented here instead of
// relying on <random> distributions, whose output is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t uniform_index(std::uint64_t n);

    // Uniform real in [0, 1) with 53 random bits.
    double uniform01();

    double normal(double mean = 0.0, double sd = 1.0);

    bool bernoulli(double p) { return uniform01() < p; }

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_normal_;
};

}  // namespace corrsel
