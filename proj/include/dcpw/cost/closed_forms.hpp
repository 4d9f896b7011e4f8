#pragma once

#include <cstdint>
#include <string>

#include "dcpw/cost/report.hpp"

namespace dcpw {

// Mean-field collimation-sieve cost: 2^sqrt(2n) queries over sqrt(2n) levels.
CostReport sieve_cost_simple(uint64_t n);

// Precise variant with the adjusting factor and per-level discard loss:
// h = c + sqrt(2n + 4c^2), queries = (1 - log2(1-delta)) * h.
CostReport sieve_cost_precise(uint64_t n, double delta = 0.02, double c = 0.757859);

// Direct check of the geometric-series bound on sum_{i=1}^n 2^(alpha sqrt(i)).
struct SumLemmaCheck {
    double lhs;  // log2 of the exact sum
    double rhs;  // log2 of (2^a/(2^a - 1)) (2 ceil(sqrt n) + 1) 2^(a ceil(sqrt n))
};
SumLemmaCheck sum_lemma_check(double alpha, uint64_t n);

enum class Algorithm {
    kuperberg2,
    regev,
    ettinger_hoyer,
    alg4_qracm,
    alg4_no_qracm,
};
Algorithm algorithm_from_string(const std::string& name);
std::string algorithm_name(Algorithm alg);

// Whole-secret cost rows (exponents, unrounded; formatting rounds up).
CostReport table_row(Algorithm alg, uint64_t n);

// Query/time/space trade-off of the interpolation algorithm at threshold t.
CostReport interpolation_cost(uint64_t n, uint64_t t, double c_dcp = CostConstants::c_dcp,
                              double c_qss = CostConstants::c_qss_qracm);

// log2 of p_m = 2^-m C(m, ceil(m/2)), the weight-guess proportion.
double log2_weight_guess_probability(uint64_t m);

}  // namespace dcpw
