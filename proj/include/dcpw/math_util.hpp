#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace dcpw {

inline constexpr double kLog2E = 1.4426950408889634074;

// log2 of the binomial coefficient C(a, b), extended to real arguments
// through lgamma. Returns -inf when b < 0 or b > a.
inline double log2_binomial(double a, double b) {
    if (b < 0.0 || b > a) return -std::numeric_limits<double>::infinity();
    if (b == 0.0 || b == a) return 0.0;
    return (std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0)) * kLog2E;
}

// Binary entropy h(x) = -x log2 x - (1-x) log2 (1-x) on [0,1].
inline double entropy(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

// log2(2^a + 2^b).
inline double log2_add(double a, double b) {
    if (std::isinf(a) && a < 0) return b;
    if (std::isinf(b) && b < 0) return a;
    double hi = a > b ? a : b;
    double lo = a > b ? b : a;
    return hi + std::log2(1.0 + std::exp2(lo - hi));
}

inline double log2_sum(const std::vector<double>& terms) {
    double acc = -std::numeric_limits<double>::infinity();
    for (double t : terms) acc = log2_add(acc, t);
    return acc;
}

inline uint64_t ceil_log2(uint64_t n) {
    if (n <= 1) return 0;
    uint64_t b = 0;
    uint64_t v = n - 1;
    while (v > 0) {
        v >>= 1;
        ++b;
    }
    return b;
}

inline int popcount32(uint32_t x) { return __builtin_popcount(x); }

// Exact binomial coefficient. r*(n-k+i) is divisible by i at every step,
// so the running value stays integral. Throws on uint64 overflow.
inline uint64_t binomial_u64(unsigned n, unsigned k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    uint64_t r = 1;
    for (unsigned i = 1; i <= k; ++i) {
        uint64_t num = n - k + i;
        if (r > UINT64_MAX / num) throw std::overflow_error("binomial_u64 overflow");
        r = r * num / i;
    }
    return r;
}

}  // namespace dcpw
