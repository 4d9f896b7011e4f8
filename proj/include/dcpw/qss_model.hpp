#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "dcpw/subset_sum.hpp"

namespace dcpw {

// Desk-scale stand-in for the quantum subset-sum unitary
// |v>|b> -> |v>|b xor S(v)>: a seeded table mapping each achievable sum to
// one solution chosen uniformly at random, with an epsilon-fraction of
// achievable sums marked as failures. The table is a deterministic function
// of (k, seed), which is what makes the simulated unitary well-defined.
class QssModel {
public:
    QssModel() = default;

    uint64_t modulus() const { return N_; }
    uint32_t dimension() const { return m_; }
    const std::vector<uint64_t>& weights() const { return weights_; }
    double epsilon() const { return epsilon_; }

    std::optional<BitMask> apply(uint64_t v) const;  // S(v); nullopt on fail/unachievable

    size_t achievable_count() const { return achievable_; }
    size_t failed_count() const { return failed_; }
    // G(k) = #{b : S(<b,k>) = b} = number of non-failed achievable sums.
    uint64_t g_count() const { return achievable_ - failed_; }

    friend QssModel build_qss_model(std::vector<uint64_t> k, uint64_t N, double epsilon,
                                    uint64_t seed);

private:
    uint64_t N_ = 0;
    uint32_t m_ = 0;
    std::vector<uint64_t> weights_;
    double epsilon_ = 0.0;
    size_t achievable_ = 0;
    size_t failed_ = 0;
    std::unordered_map<uint64_t, BitMask> table_;  // successes only
};

QssModel build_qss_model(std::vector<uint64_t> k, uint64_t N, double epsilon, uint64_t seed);

// Exact peeling of the triangular configuration: rows 1..m-t are forced bit
// by bit from the low bits of the target, leaving a t-dimensional instance
// over modulus N >> (m-t). Requires N = 2^n and a conforming configuration.
class ConfigReduction {
public:
    ConfigReduction(std::vector<uint64_t> config_labels, uint32_t t, uint64_t N);

    uint32_t m() const { return m_; }
    uint32_t t() const { return t_; }
    uint64_t reduced_modulus() const { return reduced_N_; }
    const std::vector<uint64_t>& reduced_weights() const { return reduced_weights_; }

    // Reduced instance for target v (the weights never change).
    SubsetSumInstance reduced_instance(uint64_t v) const;

    struct Reduction {
        BitMask prefix;       // forced bits b_1..b_(m-t)
        uint64_t reduced_target;
    };
    // nullopt when the forced prefix leaves a residue not divisible by 2^(m-t)
    // (then v has no solution at all).
    std::optional<Reduction> reduce_target(uint64_t v) const;

    // Extends a solution of the reduced instance back to the full one;
    // verifies the composition and returns nullopt if it does not check out.
    std::optional<BitMask> extend(uint64_t v, BitMask tail) const;

private:
    std::vector<uint64_t> labels_;
    uint32_t m_ = 0;
    uint32_t t_ = 0;
    uint64_t N_ = 0;
    uint64_t reduced_N_ = 0;
    std::vector<uint64_t> reduced_weights_;
};

ConfigReduction gaussian_reduce(std::vector<uint64_t> config_labels, uint32_t t, uint64_t N);

}  // namespace dcpw
