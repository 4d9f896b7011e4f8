#include "dcpw/qss_model.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "dcpw/math_util.hpp"
#include "dcpw/rng.hpp"

namespace dcpw {

std::optional<BitMask> QssModel::apply(uint64_t v) const {
    auto it = table_.find(v % N_);
    if (it == table_.end()) return std::nullopt;
    return it->second;
}

QssModel build_qss_model(std::vector<uint64_t> k, uint64_t N, double epsilon, uint64_t seed) {
    const uint32_t m = static_cast<uint32_t>(k.size());
    if (m > 24) throw std::invalid_argument("build_qss_model: enumeration bound is m <= 24");
    if (epsilon < 0.0 || epsilon >= 1.0)
        throw std::invalid_argument("build_qss_model: epsilon must lie in [0,1)");

    // The stream is a function of (k, seed) only.
    uint64_t mixed = seed;
    for (uint64_t w : k) mixed = mixed * 0x100000001b3ULL + (w ^ 0xcbf29ce484222325ULL);
    Rng rng(mixed);

    // Bucket all 2^m sums. Sums are generated by doubling the prefix set.
    std::vector<uint64_t> sums{0};
    sums.reserve(size_t{1} << m);
    for (uint32_t i = 0; i < m; ++i) {
        size_t half = sums.size();
        for (size_t j = 0; j < half; ++j) sums.push_back((sums[j] + k[i]) % N);
    }
    // Index in `sums` is the mask itself: bit i toggles k_i.
    std::map<uint64_t, std::vector<BitMask>> buckets;
    for (size_t b = 0; b < sums.size(); ++b)
        buckets[sums[b]].push_back(static_cast<BitMask>(b));

    QssModel model;
    model.N_ = N;
    model.m_ = m;
    model.weights_ = std::move(k);
    model.epsilon_ = epsilon;
    model.achievable_ = buckets.size();

    std::vector<uint64_t> achievable;
    achievable.reserve(buckets.size());
    for (auto& [v, bs] : buckets) {
        achievable.push_back(v);
        model.table_[v] = bs[rng.uniform(bs.size())];
    }
    const size_t fail_count = static_cast<size_t>(epsilon * static_cast<double>(achievable.size()));
    rng.shuffle(achievable);
    for (size_t i = 0; i < fail_count; ++i) model.table_.erase(achievable[i]);
    model.failed_ = fail_count;
    return model;
}

ConfigReduction::ConfigReduction(std::vector<uint64_t> config_labels, uint32_t t, uint64_t N)
    : labels_(std::move(config_labels)),
      m_(static_cast<uint32_t>(labels_.size())),
      t_(t),
      N_(N) {
    if (t_ < 1 || t_ > m_) throw std::invalid_argument("ConfigReduction: need 1 <= t <= m");
    if ((N & (N - 1)) != 0) throw std::invalid_argument("ConfigReduction: N must be 2^n");
    const uint32_t head = m_ - t_;
    for (uint32_t i = 1; i <= m_; ++i) {
        uint64_t ki = labels_[i - 1];
        if (ki >= N) throw std::invalid_argument("ConfigReduction: label out of range");
        if (i <= head) {
            uint64_t low = ki & ((uint64_t{1} << i) - 1);
            if (low != (uint64_t{1} << (i - 1)))
                throw std::invalid_argument("ConfigReduction: non-conforming triangular row");
        } else if (head > 0 && (ki & ((uint64_t{1} << head) - 1)) != 0) {
            throw std::invalid_argument("ConfigReduction: trailing row not divisible");
        }
    }
    reduced_N_ = N >> head;
    for (uint32_t i = head; i < m_; ++i) reduced_weights_.push_back(labels_[i] >> head);
}

SubsetSumInstance ConfigReduction::reduced_instance(uint64_t v) const {
    auto red = reduce_target(v);
    SubsetSumInstance inst{reduced_N_, t_, reduced_weights_, red ? red->reduced_target : 0};
    return inst;
}

std::optional<ConfigReduction::Reduction> ConfigReduction::reduce_target(uint64_t v) const {
    const uint32_t head = m_ - t_;
    uint64_t cur = v % N_;
    BitMask prefix = 0;
    for (uint32_t i = 1; i <= head; ++i) {
        // Every term beyond row i is divisible by 2^i, so bit i-1 of the
        // residue forces b_i.
        if ((cur >> (i - 1)) & 1) {
            prefix |= BitMask{1} << (i - 1);
            cur = (cur + N_ - labels_[i - 1]) % N_;
        }
    }
    if (head > 0 && (cur & ((uint64_t{1} << head) - 1)) != 0) return std::nullopt;
    return Reduction{prefix, cur >> head};
}

std::optional<BitMask> ConfigReduction::extend(uint64_t v, BitMask tail) const {
    auto red = reduce_target(v);
    if (!red) return std::nullopt;
    const uint32_t head = m_ - t_;
    BitMask full = red->prefix | (tail << head);
    if (knapsack_sum(full, labels_, N_) != v % N_) return std::nullopt;
    return full;
}

ConfigReduction gaussian_reduce(std::vector<uint64_t> config_labels, uint32_t t, uint64_t N) {
    return ConfigReduction(std::move(config_labels), t, N);
}

}  // namespace dcpw
