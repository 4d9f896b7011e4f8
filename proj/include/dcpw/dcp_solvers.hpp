#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dcpw/phase_vector.hpp"
#include "dcpw/qss_model.hpp"
#include "dcpw/sieve.hpp"
#include "dcpw/subset_sum.hpp"

namespace dcpw {

struct RunReport {
    std::optional<uint64_t> recovered_s;
    bool success = false;
    bool budget_exhausted = false;
    uint64_t queries_used = 0;
    uint64_t attempts = 0;   // full restarts of the algorithm, including the last
    uint64_t restarts = 0;   // attempts - 1 on success
    uint64_t step4_attempts = 0;
    uint64_t step4_successes = 0;
    uint64_t final_measurements = 0;
    std::map<std::string, double> wall_stats;
};

// Ettinger-Hoyer: Hadamard-measure `samples` fresh phase vectors, then take
// the maximum-likelihood secret over all of Z_N. Classical time Theta(N*samples).
struct EttingerHoyerResult {
    uint64_t s_hat = 0;
    RunReport report;
};
EttingerHoyerResult ettinger_hoyer(DcpInstance& inst, uint64_t samples, Rng& rng);

// Log-likelihood of a candidate secret given measured (label, bit) pairs.
double eh_log_likelihood(uint64_t candidate, const std::vector<std::pair<uint64_t, int>>& obs,
                         uint64_t N);

// One pass of the lsb-finding reduction to a classical subset-sum instance.
// The solver must return all solutions (lexicographic order is not required).
using ClassicalSolver = std::function<std::vector<BitMask>(const SubsetSumInstance&)>;
struct RegevLsbResult {
    std::optional<int> bit;
    RunReport report;
};
RegevLsbResult regev_lsb(DcpInstance& inst, const ClassicalSolver& solver, Rng& rng,
                         uint64_t attempt_budget = 64);

// Exact output distribution of the final inverse-QFT measurement:
// Pr[j] = |sum_{v in sums} mult(v) * w_N^((s-j)v)|^2 / (N * sum mult^2).
// `sums` may contain multiplicities (the ideal-algorithm case); for the
// Fact-2 solver they are distinct. Requires |sums| * N <= 2^28 unless N is a
// power of two (then an FFT path handles any desk-scale N).
std::vector<double> exact_output_distribution(const std::vector<uint64_t>& sums, uint64_t s,
                                              uint64_t N);

// Accept-reject sampler for the same distribution using the bound
// Pr[j] <= G/N; avoids materializing all N probabilities.
uint64_t sample_output_accept_reject(const std::vector<uint64_t>& sums, uint64_t s, uint64_t N,
                                     Rng& rng);

// A per-attempt quantum subset-sum solver: sums -> solution vector.
struct QuantumSolver {
    std::function<std::optional<BitMask>(uint64_t)> apply;
};
using QuantumSolverFactory =
    std::function<QuantumSolver(const std::vector<uint64_t>& k, uint64_t attempt_seed)>;

struct QssSolveOptions {
    double epsilon = 0.0;
    bool exact_final = true;   // false: accept-reject shortcut
    bool ideal = false;        // ideal-solver variant: no step-4 projection
    uint64_t model_seed = 1;
    uint64_t attempt_budget = 0;  // 0: 64 N^2 / (M (N - M + 1))
    std::function<bool(uint64_t)> verifier;  // defaults to the secret check
    QuantumSolverFactory solver_factory;     // defaults to build_qss_model
};

// The m-fold reduction with a quantum subset-sum solver: draws m fresh phase
// vectors per attempt, projects the solver's register onto 0^m (probability
// G(k)/M), applies the inverse QFT and measures. Restarts until the measured
// j passes the verifier.
RunReport qss_dcp_solve(DcpInstance& inst, uint32_t m, const QssSolveOptions& opts, Rng& rng);

// Interpolation run: configuration matrix from the sieve, Gaussian reduction
// to a t-dimensional instance, then the quantum-solver loop above.
struct InterpolationOptions {
    double epsilon = 0.0;
    bool exact_final = true;
    uint64_t model_seed = 1;
    uint64_t attempt_budget = 0;
    std::function<bool(uint64_t)> verifier;
};
RunReport interpolation_solve(DcpInstance& inst, uint32_t t, const SieveSchedule& schedule,
                              const InterpolationOptions& opts, Rng& rng);

// Lemma instrumentation -----------------------------------------------------

struct LemmaEZReport {
    double empirical_mean = 0;
    double analytic = 0;
    double std_error = 0;
    uint64_t trials = 0;
};
// Z(k) = sum_i i*C_i computed exactly per instance by bucketing all 2^m sums.
LemmaEZReport verify_lemma_ez(uint64_t n, uint32_t m, uint64_t trials, Rng& rng);

struct LemmaGBoundReport {
    uint64_t trials = 0;
    uint64_t violations = 0;   // of G >= (1-eps)(2M - Z)
    double mean_g = 0;
    double lemma5_bound = 0;   // (1-eps) M (1 - (M-1)/N)
    double std_error = 0;
};
LemmaGBoundReport verify_lemma_g_bound(uint64_t n, uint32_t m, double epsilon, uint64_t trials,
                                       Rng& rng);

}  // namespace dcpw
