#include "dcal/rng.hpp"

#include <cmath>

namespace dcal {

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t component) noexcept {
    std::uint64_t state = base;
    std::uint64_t h = splitmix64(state);
    state ^= component + 0x9E3779B97F4A7C15ull;
    return h ^ splitmix64(state);
}

std::uint64_t Rng::uniform_below(std::uint64_t bound) {
    // Reject draws from the tail that would bias the modulus.
    const std::uint64_t limit = bound * ((~std::uint64_t{0} / bound));
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % bound;
}

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform01() - 1.0;
        v = 2.0 * uniform01() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
}

} // namespace dcal
