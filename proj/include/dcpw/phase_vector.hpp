#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dcpw/rng.hpp"

namespace dcpw {

// A (possibly multi-labeled) phase vector over Z_N, tracked exactly:
// the simulated state is (1/sqrt(l)) sum_i w_N^(s*labels[i] + offsets[i]) |i>,
// with w_N = exp(2*pi*I/N). Phases are integer exponents mod N; no floating
// point ever enters the state.
//
// The single-label form (labels.size() == 1) stands for the two-amplitude
// state (|0> + w_N^(s*k + offset)|1>)/sqrt(2); lift_to_list() turns it into
// the equivalent explicit two-label form [0, k].
//
// Global phase is fixed by rotating offsets so that offsets[0] == 0.
class PhaseVector {
public:
    PhaseVector(uint64_t modulus, std::vector<uint64_t> labels, std::vector<uint64_t> offsets);

    // Oracle-style vector |psi_k>.
    static PhaseVector single(uint64_t label, uint64_t modulus);

    uint64_t modulus() const { return modulus_; }
    size_t size() const { return labels_.size(); }
    bool is_single() const { return labels_.size() == 1; }
    const std::vector<uint64_t>& labels() const { return labels_; }
    const std::vector<uint64_t>& offsets() const { return offsets_; }
    uint64_t label() const;   // single-label accessor
    uint64_t offset() const;  // single-label accessor

    // Single-label [k] -> two-label [0, k]; multi-label unchanged.
    PhaseVector lift_to_list() const;

    // Two-label [a, b] -> single-label [(b - a) mod N] with matching offset.
    PhaseVector collapse_to_single() const;

    void normalize_global_phase();

    bool operator==(const PhaseVector& other) const = default;

private:
    uint64_t modulus_;
    std::vector<uint64_t> labels_;
    std::vector<uint64_t> offsets_;
};

// A DCP instance of group order N with hidden secret s. Phase vectors are
// issued by the oracle with uniformly random labels; each issue bumps
// query_count. Solvers must reach s only through measurement routines;
// secret_for_verification() exists for the check step of the interpolation
// loop and for tests.
class DcpInstance {
public:
    // s_opt empty: secret drawn uniformly from the seed.
    DcpInstance(uint64_t N, std::optional<uint64_t> s_opt, uint64_t seed);

    uint64_t modulus() const { return N_; }
    uint64_t bit_length() const { return n_; }
    uint64_t query_count() const { return queries_; }
    bool modulus_is_power_of_two() const { return (N_ & (N_ - 1)) == 0; }

    PhaseVector sample_phase_vector();

    uint64_t secret_for_verification() const { return s_; }

    // Born statistics of Hadamard-then-measure on a single-label vector:
    // P(0) = cos^2(pi*(k*s + offset)/N).
    int measure_hadamard(const PhaseVector& pv, Rng& rng) const;
    double hadamard_zero_probability(const PhaseVector& pv) const;

private:
    uint64_t N_;
    uint64_t n_;
    uint64_t s_;
    uint64_t queries_ = 0;
    Rng rng_;
};

// CNOT combination of two single-label vectors |psi_p>, |psi_q>.
// Returns (|psi_(p-q)>, 0) or (|psi_(p+q)>, 1), each with probability 1/2.
struct CombineOutcome {
    PhaseVector vector;
    int branch;  // 0: difference, 1: sum
};
CombineOutcome combine_pair_cnot(const PhaseVector& pv_p, const PhaseVector& pv_q, Rng& rng);

}  // namespace dcpw
