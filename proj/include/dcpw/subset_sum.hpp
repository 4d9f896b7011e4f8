#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dcpw/rng.hpp"

namespace dcpw {

// Component i of the solution vector b is bit i of the mask.
using BitMask = uint32_t;

struct SubsetSumInstance {
    uint64_t N = 0;
    uint32_t m = 0;
    std::vector<uint64_t> weights;
    uint64_t target = 0;
};

uint64_t knapsack_sum(BitMask b, const std::vector<uint64_t>& weights, uint64_t N);

// Lexicographic order on (b_1, ..., b_m).
bool lex_less(BitMask a, BitMask b, uint32_t m);

// All solutions, lexicographic order. Enumeration bound m <= 28.
std::vector<BitMask> brute_force_all(const SubsetSumInstance& inst);

// PF(a1, a2, m) = C(m - a1*m, a2*m) / C(m, a2*m) and its asymptotic
// log2-rate. The rate is the Stirling limit of (1/m) log2 PF,
// (1-a1) h(a2/(1-a1)) - h(a2); see the project notes on the printed form.
struct FilteringProbability {
    double exact;
    double rate;
};
FilteringProbability filtering_probability(double alpha1, double alpha2, uint64_t m);
double filtering_rate(double alpha1, double alpha2);

// Circular half-open interval [base, base + width) mod N over knapsack
// residues; width == N means unconditioned.
struct ModCondition {
    uint64_t base = 0;
    uint64_t width = 0;

    static ModCondition none(uint64_t N) { return {0, N}; }
    static ModCondition exact(uint64_t v) { return {v, 1}; }
    bool contains(uint64_t x, uint64_t N) const {
        uint64_t d = (x + N - base % N) % N;
        return d < width;
    }
};

// A list L[l, alpha, c]: fixed-weight vectors on a support satisfying a
// modular condition on their knapsack residue.
struct WeightedList {
    BitMask support = 0;
    uint32_t weight = 0;
    ModCondition condition;
    std::vector<BitMask> elements;
};

// count vectors sampled u.a.r. from weight-w vectors on [0, support_size).
WeightedList sample_distribution(uint32_t support_size, uint32_t weight, size_t count, Rng& rng);

// Merging-filtering step: pairwise sums with no colliding ones, total weight
// target_weight, and residue inside c_out. Sort-merge join on the residue of
// L2.
WeightedList merge_filter(const WeightedList& L1, const WeightedList& L2,
                          const std::vector<uint64_t>& k, uint64_t N, const ModCondition& c_out,
                          uint32_t target_weight);

// Classical representation-technique solver (HGJ-shaped depth-3 tree).
// Density about one (|m - ceil(log2 N)| small). Each outer iteration draws a
// fresh coordinate permutation and fresh condition targets and sweeps the
// solution weight, so every brute-force solution is found with constant
// probability per iteration.
struct ClassicalRepOptions {
    int outer_iterations = 6;
    size_t direct_enumeration_bound = 4096;  // enumerate C(m,w) below this
};
std::vector<BitMask> solve_classical_rep(const SubsetSumInstance& inst, Rng& rng,
                                         const ClassicalRepOptions& opts = {});

}  // namespace dcpw
