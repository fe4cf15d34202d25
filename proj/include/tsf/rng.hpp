#ifndef TSF_RNG_HPP
#define TSF_RNG_HPP

#include <cstdint>
#include <random>

namespace tsf {

// splitmix64 finalizer; used to derive independent per-task streams from one root seed.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Stream for task `index` under root `seed`: splitmix64(splitmix64(seed) ^ splitmix64(index + 1)).
// The derivation is a pure function of (seed, index), so results do not depend on scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ splitmix64(index + 1));
}

class Stream {
public:
    explicit Stream(std::uint64_t seed) : engine_(seed) {}
    Stream(std::uint64_t seed, std::uint64_t index) : engine_(derive_seed(seed, index)) {}

    // Uniform on [0, 1) with 53 random bits; portable across standard libraries.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    // Uniform on (0, 1].
    double uniform_open0() { return 1.0 - uniform(); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace tsf

#endif  // TSF_RNG_HPP
