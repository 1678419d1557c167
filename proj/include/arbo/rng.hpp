#pragma once

#include <cstdint>

namespace arbo {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based generator: the i-th draw of stream s under seed k is
// mix64(mix64(k ^ s * C1) + i * C2). Draws are independent of evaluation
// order, so any row of a sample can be regenerated on its own.
class CounterRng {
public:
    static constexpr std::uint64_t kStreamMul = 0x9e3779b97f4a7c15ULL;
    static constexpr std::uint64_t kCounterMul = 0xd1b54a32d192ed03ULL;

    CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(mix64(seed ^ (stream * kStreamMul))) {}

    std::uint64_t at(std::uint64_t i) const { return mix64(key_ + i * kCounterMul); }
    std::uint64_t next() { return at(counter_++); }

    // Uniform on [0, 1) with 53 bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace arbo
