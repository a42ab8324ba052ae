#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace dcal {

/// splitmix64 step; used both as a mixer for deriving independent stream
/// seeds and for hashing.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Derives a child seed from a base seed and a component (cell index,
/// purpose tag, ...). Chaining calls yields independent, reproducible
/// streams regardless of evaluation order elsewhere.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t component) noexcept;

/// Deterministic random source: 64-bit Mersenne Twister with explicitly
/// specified uniform/normal transforms, so that identical seeds yield
/// identical draws on every platform and compiler.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Derived sub-stream: the path components are mixed into the master
    /// seed one at a time.
    static Rng stream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> path) {
        std::uint64_t s = master_seed;
        for (std::uint64_t c : path) s = mix_seed(s, c);
        return Rng(s);
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer on [0, bound); unbiased via rejection.
    std::uint64_t uniform_below(std::uint64_t bound);

    /// Standard normal via the Marsaglia polar method (one spare cached).
    double normal();

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace dcal
