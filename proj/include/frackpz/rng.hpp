#ifndef FRACKPZ_RNG_HPP
#define FRACKPZ_RNG_HPP

#include <cmath>
#include <cstdint>

namespace frackpz {

// Counter-based generator: value(i) depends only on (seed, i), so any battery
// of random draws is reproducible across platforms and independent of call
// order elsewhere in the program.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed ^ (0x9e3779b97f4a7c15ull * (stream + 1))), counter_(0) {}

    std::uint64_t next_u64() { return mix(seed_ + 0x9e3779b97f4a7c15ull * ++counter_); }

    // uniform in [0,1)
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [a,b)
    double uniform(double a, double b) { return a + (b - a) * next_unit(); }

    // standard normal via Box-Muller (two counters per draw)
    double normal() {
        const double u1 = next_unit();
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1 + 0x1.0p-54));
        return r * std::cos(6.283185307179586476925286766559 * u2);
    }

    std::uint64_t counter() const { return counter_; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t seed_;
    std::uint64_t counter_;
};

} // namespace frackpz

#endif
