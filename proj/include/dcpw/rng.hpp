#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace dcpw {

// Deterministic random stream. All distribution logic is implemented here
// (rather than via std:: distributions) so that identical seeds give
// identical transcripts on every platform.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() { return state_(); }

    // Uniform integer in [0, bound), bound >= 1. Rejection sampling.
    uint64_t uniform(uint64_t bound) {
        if (bound <= 1) return 0;
        const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        uint64_t x;
        do {
            x = state_();
        } while (x >= limit);
        return x % bound;
    }

    // Uniform in [0,1) with 53 bits of precision.
    double uniform_real() {
        return static_cast<double>(state_() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform_real() < p; }

    // Fisher-Yates.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(uniform(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Derive an independent stream (e.g. one per trial).
    Rng fork() { return Rng(next_u64() ^ 0x9e3779b97f4a7c15ULL); }

private:
    std::mt19937_64 state_;
};

}  // namespace dcpw
