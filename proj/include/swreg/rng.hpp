#ifndef SWREG_RNG_HPP
#define SWREG_RNG_HPP

#include <cstdint>

namespace swreg::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter-based generator: the stream is fixed by a key, values are a pure
// function of (key, counter). Splitting derives an independent key, so
// per-restart / per-trial streams are order-independent and parallelizable.
class Counter {
public:
    explicit Counter(std::uint64_t seed)
        : key_(splitmix64(seed ^ 0x243f6a8885a308d3ULL)) {}

    // Independent child stream identified by `stream`.
    Counter split(std::uint64_t stream) const {
        Counter c(*this);
        c.key_ = splitmix64(key_ ^ splitmix64(stream ^ 0x452821e638d01377ULL));
        c.ctr_ = 0;
        return c;
    }

    std::uint64_t next_u64() { return splitmix64(key_ ^ splitmix64(ctr_++)); }

    // Uniform in [0, 1), 53-bit mantissa; bit-identical across platforms.
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * next_double(); }

    int next_sign() { return (next_u64() & 1u) ? 1 : -1; }

    std::uint64_t next_below(std::uint64_t m) { return next_u64() % m; }

private:
    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
};

} // namespace swreg::rng

#endif
