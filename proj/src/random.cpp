#include "corrsel/random.hpp"

#include <cmath>

namespace corrsel {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t state = splitmix64(base);
    for (std::uint64_t step : path) {
        state = splitmix64(state ^ splitmix64(step + 0x632BE59BD9B4E019ULL));
    }
    return state;
}

std::uint64_t Rng::uniform_index(std::uint64_t n) {
    // Rejection sampling on the top of the range removes modulo bias.
    const std::uint64_t limit = std::uint64_t(-1) - (std::uint64_t(-1) % n);
    std::uint64_t draw;
    do {
        draw = engine_();
    } while (draw >= limit);
    return draw % n;
}

double Rng::uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal(double mean, double sd) {
    if (spare_normal_) {
        const double z = *spare_normal_;
        spare_normal_.reset();
        return mean + sd * z;
    }
    // Marsaglia polar method.
    double u, v, s;
    do {
        u = 2.0 * uniform01() - 1.0;
        v = 2.0 * uniform01() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_normal_ = v * factor;
    return mean + sd * u * factor;
}

}  // namespace corrsel
