#include "kronmde/rng.hpp"

#include <cmath>

namespace kronmde::rng {

namespace {

// Philox 4x64 round constants (Salmon et al., "Parallel random numbers: as
// easy as 1, 2, 3"); same parameterization as the widely used reference
// implementations, which we pin with known-answer tests.
constexpr uint64_t M0 = 0xD2E7470EE14C6C93ULL;
constexpr uint64_t M1 = 0xCA5A826395121157ULL;
constexpr uint64_t W0 = 0x9E3779B97F4A7C15ULL;  // golden ratio
constexpr uint64_t W1 = 0xBB67AE8584CAA73BULL;  // sqrt(3) - 1

inline void mulhilo(uint64_t a, uint64_t b, uint64_t& hi, uint64_t& lo) {
    unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<uint64_t>(p >> 64);
    lo = static_cast<uint64_t>(p);
}

}  // namespace

std::array<uint64_t, 4> philox4x64(Counter c, Key k) {
    uint64_t x0 = c.c0, x1 = c.c1, x2 = c.c2, x3 = c.c3;
    uint64_t k0 = k.k0, k1 = k.k1;
    for (int round = 0; round < 10; ++round) {
        uint64_t hi0, lo0, hi1, lo1;
        mulhilo(M0, x0, hi0, lo0);
        mulhilo(M1, x2, hi1, lo1);
        uint64_t y0 = hi1 ^ x1 ^ k0;
        uint64_t y1 = lo1;
        uint64_t y2 = hi0 ^ x3 ^ k1;
        uint64_t y3 = lo0;
        x0 = y0; x1 = y1; x2 = y2; x3 = y3;
        k0 += W0;
        k1 += W1;
    }
    return {x0, x1, x2, x3};
}

std::pair<double, double> Stream::gauss_pair(uint64_t a, uint64_t b, uint64_t c, uint64_t d) const {
    auto o = raw(a, b, c, d);
    double u1 = to_unit(o[0]);
    double u2 = to_unit(o[1]);
    double r = std::sqrt(-2.0 * std::log(u1));
    double t = 2.0 * M_PI * u2;
    return {r * std::cos(t), r * std::sin(t)};
}

}  // namespace kronmde::rng
