#pragma once
#include <array>
#include <cstdint>
#include <utility>

namespace kronmde::rng {

// Philox 4x64-10 counter-based generator.  Each (key, counter) pair maps to
// four independent 64-bit words, so parallel consumers never share state:
// we address draws as key = (seed, stream) and counter = (trial, i, j, lane).
struct Counter {
    uint64_t c0 = 0, c1 = 0, c2 = 0, c3 = 0;
};
struct Key {
    uint64_t k0 = 0, k1 = 0;
};

std::array<uint64_t, 4> philox4x64(Counter c, Key k);

// Map to (0,1]: 53 top bits, never exactly 0 so log(u) is finite.
inline double to_unit(uint64_t x) {
    return (double((x >> 11)) + 1.0) * 0x1p-53;
}

// One stream of scalar draws addressed by a 4-word counter.  gauss_pair uses
// Box-Muller on the first two output words of one Philox block.
struct Stream {
    Key key;
    Stream(uint64_t seed, uint64_t stream_id) : key{seed, stream_id} {}

    std::array<uint64_t, 4> raw(uint64_t a, uint64_t b, uint64_t c, uint64_t d = 0) const {
        return philox4x64({a, b, c, d}, key);
    }
    std::pair<double, double> gauss_pair(uint64_t a, uint64_t b, uint64_t c, uint64_t d = 0) const;
    // +/-1 pair from sign bits of the first two words
    std::pair<double, double> sign_pair(uint64_t a, uint64_t b, uint64_t c, uint64_t d = 0) const {
        auto o = raw(a, b, c, d);
        return {o[0] >> 63 ? 1.0 : -1.0, o[1] >> 63 ? 1.0 : -1.0};
    }
    // uniform in (0,1]
    double uniform(uint64_t a, uint64_t b, uint64_t c, uint64_t d = 0) const {
        return to_unit(raw(a, b, c, d)[0]);
    }
};

}  // namespace kronmde::rng
