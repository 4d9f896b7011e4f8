#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dcpw/phase_vector.hpp"
#include "dcpw/rng.hpp"

namespace dcpw {

// One combination step of the collimation sieve (interval form): inputs have
// all labels < 2^a, the output has all labels < 2^(a-r).
struct CollimationParams {
    uint32_t a;
    uint32_t r;
    size_t max_list = 512;  // discard threshold, applied by the sieve drivers

    CollimationParams(uint32_t a_, uint32_t r_, size_t max_list_ = 512)
        : a(a_), r(r_), max_list(max_list_) {
        if (r > a) throw std::invalid_argument("CollimationParams: r must be <= a");
        if (max_list < 2) throw std::invalid_argument("CollimationParams: max_list must be >= 2");
    }
};

// Level plan of a depth-first collimation tree. levels run leaf-to-root;
// level j merges two level-(j-1) vectors and removes r bits (interval mode
// shrinks the label bound from 2^a, congruence mode pins r more low bits).
struct SieveSchedule {
    struct Level {
        uint32_t a;  // label bound exponent (interval) / known low bits (congruence)
        uint32_t r;
    };
    std::vector<Level> levels;
    size_t leaf_list_size = 2;
    double discard_rate = 0.02;    // delta of the precise cost analysis
    double adjust_c = 0.757859;    // log2(1 + sqrt(3/(2*pi)))
    size_t max_list = 512;
    size_t min_list = 2;
    uint64_t retry_budget = 8;     // per-node retries before giving up

    // Plans the level gaps so list sizes grow roughly like 2^(level+1),
    // which keeps the leaf count near the 2^sqrt(2n) optimum.
    static SieveSchedule plan_interval(uint64_t n, size_t max_list = 512);
    static SieveSchedule plan_congruence(uint32_t bits, size_t max_list = 512);
};

struct SieveFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Algorithm-1 combination: measures V = floor((k_i + k'_j) / 2^(a-r)) by
// sampling one basis pair uniformly, then keeps exactly the pairs mapping to
// V. Output labels are stored reduced by V*2^(a-r); the dropped term
// contributes only a global phase. Sums are taken over the integers.
PhaseVector collimate(const PhaseVector& pv1, const PhaseVector& pv2,
                      const CollimationParams& params, Rng& rng);

// Congruence variant used to pin low bits: measures (k_i + k'_j) mod N
// modulo 2^known_bits_after and keeps the matching pairs.
PhaseVector collimate_low_bits(const PhaseVector& pv1, const PhaseVector& pv2,
                               uint32_t known_bits_after, Rng& rng);

// Projection of a multi-labeled vector onto a two-dimensional subspace: an
// ordered pair of basis states satisfying `valid` is marked and measured.
// Success probability is 2/l on the remaining support; on failure the two
// marked states are discarded and another pair is tried. Returns the
// two-label vector, or nullopt when no valid pair survives.
std::optional<PhaseVector> project_out_pair(
    const PhaseVector& pv, const std::function<bool(uint64_t, uint64_t)>& valid, Rng& rng);

struct SieveStats {
    uint64_t queries = 0;
    uint64_t discards = 0;
    uint64_t projection_failures = 0;
    uint64_t rebuilds = 0;
};

// Full interval sieve: collimates fresh oracle samples down to labels in
// {0,1} and extracts |psi_1>. This is the Kuperberg-II endpoint.
struct FullSieveResult {
    std::optional<PhaseVector> vector;  // single-label, label 1 on success
    SieveStats stats;
};
FullSieveResult sieve_collimate_full(DcpInstance& inst, const SieveSchedule& schedule, Rng& rng);

// Partially collimated production: returns a two-label vector whose label
// difference is target_residue mod 2^bits (bits = 0 returns a fresh sample
// unchanged). Requires a power-of-two group order for the congruence
// guarantee. Throws SieveFailure when the retry budget is exhausted.
struct PartialSieveResult {
    PhaseVector vector;
    SieveStats stats;
};
PartialSieveResult sieve_to_partial(DcpInstance& inst, uint32_t bits,
                                    const SieveSchedule& schedule, Rng& rng,
                                    uint64_t target_residue = 0);

// Regev's m-fold combination: tensors m single-label vectors, measures
// floor(<b,k>/B) and, when at least two solutions exist, returns the
// two-label vector on the two lexicographically smallest ones.
std::optional<PhaseVector> regev_combine(const std::vector<PhaseVector>& pvs, uint64_t B,
                                         Rng& rng);

// Kuperberg's first algorithm specialised to lsb(s), power-of-two N.
struct Kuperberg1Result {
    std::optional<int> lsb;
    uint64_t queries = 0;
    bool pool_exhausted = false;
};
Kuperberg1Result kuperberg1_find_lsb(DcpInstance& inst, Rng& rng, size_t pool_size = 0);

// Phase vectors arranged in the triangular configuration used by the
// interpolation algorithm: row i <= m-t has label = 2^(i-1) mod 2^i, rows
// above m-t have labels divisible by 2^(m-t).
struct ConfigMatrix {
    uint64_t N = 0;
    uint32_t m = 0;
    uint32_t t = 0;
    std::vector<PhaseVector> vectors;  // single-label
    std::vector<uint64_t> labels;
    SieveStats stats;

    std::vector<std::vector<int>> bit_matrix() const;  // m rows, n lsb-first columns
    bool triangular_invariant_holds() const;
};
ConfigMatrix build_config_matrix(DcpInstance& inst, uint32_t m, uint32_t t,
                                 const SieveSchedule& schedule, Rng& rng);

}  // namespace dcpw
