#include "dcpw/subset_sum.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "dcpw/math_util.hpp"

namespace dcpw {

uint64_t knapsack_sum(BitMask b, const std::vector<uint64_t>& weights, uint64_t N) {
    uint64_t sum = 0;
    while (b) {
        int i = __builtin_ctz(b);
        sum += weights[i];
        b &= b - 1;
    }
    return sum % N;
}

bool lex_less(BitMask a, BitMask b, uint32_t m) {
    for (uint32_t i = 0; i < m; ++i) {
        int ai = (a >> i) & 1, bi = (b >> i) & 1;
        if (ai != bi) return ai < bi;
    }
    return false;
}

std::vector<BitMask> brute_force_all(const SubsetSumInstance& inst) {
    if (inst.m > 28) throw std::invalid_argument("brute_force_all: m must be <= 28");
    if (inst.weights.size() != inst.m)
        throw std::invalid_argument("brute_force_all: weight vector size mismatch");
    std::vector<BitMask> out;
    const uint64_t M = uint64_t{1} << inst.m;
    for (uint64_t key = 0; key < M; ++key) {
        // Ascending key with b_1 in the top digit walks tuples lexicographically.
        BitMask b = 0;
        for (uint32_t i = 0; i < inst.m; ++i)
            if ((key >> (inst.m - 1 - i)) & 1) b |= BitMask{1} << i;
        if (knapsack_sum(b, inst.weights, inst.N) == inst.target % inst.N) out.push_back(b);
    }
    return out;
}

double filtering_rate(double alpha1, double alpha2) {
    if (alpha1 < 0 || alpha2 < 0 || alpha1 + alpha2 > 1.0 + 1e-12)
        throw std::invalid_argument("filtering_rate: need alpha1 + alpha2 <= 1");
    if (alpha2 == 0.0 || alpha1 == 0.0) return 0.0;
    return (1.0 - alpha1) * entropy(alpha2 / (1.0 - alpha1)) - entropy(alpha2);
}

FilteringProbability filtering_probability(double alpha1, double alpha2, uint64_t m) {
    if (alpha1 < 0 || alpha2 < 0 || alpha1 + alpha2 > 1.0 + 1e-12)
        throw std::invalid_argument("filtering_probability: need alpha1 + alpha2 <= 1");
    const double md = static_cast<double>(m);
    const double w1 = alpha1 * md, w2 = alpha2 * md;
    if (std::abs(w1 - std::round(w1)) > 1e-9 || std::abs(w2 - std::round(w2)) > 1e-9)
        throw std::invalid_argument("filtering_probability: alpha*m must be integral");
    double log2pf = log2_binomial(md - w1, w2) - log2_binomial(md, w2);
    return {std::exp2(log2pf), filtering_rate(alpha1, alpha2)};
}

WeightedList sample_distribution(uint32_t support_size, uint32_t weight, size_t count, Rng& rng) {
    if (weight > support_size)
        throw std::invalid_argument("sample_distribution: weight exceeds support");
    if (support_size > 28) throw std::invalid_argument("sample_distribution: support too large");
    WeightedList list;
    list.support = support_size == 0 ? 0 : (BitMask{1} << support_size) - 1;
    list.weight = weight;
    list.condition = ModCondition{0, 0};
    list.elements.reserve(count);
    std::vector<uint32_t> idx(support_size);
    for (uint32_t i = 0; i < support_size; ++i) idx[i] = i;
    for (size_t c = 0; c < count; ++c) {
        // Partial Fisher-Yates: the first `weight` entries are the chosen positions.
        for (uint32_t i = 0; i < weight; ++i) {
            uint32_t j = i + static_cast<uint32_t>(rng.uniform(support_size - i));
            std::swap(idx[i], idx[j]);
        }
        BitMask b = 0;
        for (uint32_t i = 0; i < weight; ++i) b |= BitMask{1} << idx[i];
        list.elements.push_back(b);
    }
    return list;
}

WeightedList merge_filter(const WeightedList& L1, const WeightedList& L2,
                          const std::vector<uint64_t>& k, uint64_t N, const ModCondition& c_out,
                          uint32_t target_weight) {
    WeightedList out;
    out.support = L1.support | L2.support;
    out.weight = target_weight;
    out.condition = c_out;
    if (L1.elements.empty() || L2.elements.empty()) return out;

    std::vector<std::pair<uint64_t, BitMask>> sorted;
    sorted.reserve(L2.elements.size());
    for (BitMask e : L2.elements) sorted.emplace_back(knapsack_sum(e, k, N), e);
    std::sort(sorted.begin(), sorted.end());

    auto emit_range = [&](uint64_t lo, uint64_t len, BitMask e1, uint64_t s1) {
        // Residues in [lo, lo+len), no wrap (caller splits).
        auto it = std::lower_bound(sorted.begin(), sorted.end(),
                                   std::make_pair(lo, BitMask{0}));
        for (; it != sorted.end() && it->first < lo + len; ++it) {
            BitMask e2 = it->second;
            if ((e1 & e2) != 0) continue;
            BitMask merged = e1 | e2;
            if (static_cast<uint32_t>(popcount32(merged)) != target_weight) continue;
            out.elements.push_back(merged);
        }
        (void)s1;
    };

    const uint64_t width = std::min(c_out.width, N);
    for (BitMask e1 : L1.elements) {
        uint64_t s1 = knapsack_sum(e1, k, N);
        uint64_t lo = (c_out.base % N + N - s1) % N;
        if (lo + width <= N) {
            emit_range(lo, width, e1, s1);
        } else {
            emit_range(lo, N - lo, e1, s1);
            emit_range(0, lo + width - N, e1, s1);
        }
    }
    return out;
}

namespace {

// Enumerates all weight-w masks on the positions listed in `positions`.
void enumerate_weight(const std::vector<uint32_t>& positions, uint32_t w,
                      std::vector<BitMask>& out) {
    const uint32_t n = static_cast<uint32_t>(positions.size());
    if (w > n) return;
    std::vector<uint32_t> c(w);
    for (uint32_t i = 0; i < w; ++i) c[i] = i;
    while (true) {
        BitMask b = 0;
        for (uint32_t i = 0; i < w; ++i) b |= BitMask{1} << positions[c[i]];
        out.push_back(b);
        if (w == 0) break;
        int i = static_cast<int>(w) - 1;
        while (i >= 0 && c[i] == n - w + i) --i;
        if (i < 0) break;
        ++c[i];
        for (uint32_t j = i + 1; j < w; ++j) c[j] = c[j - 1] + 1;
    }
}

WeightedList full_distribution(const std::vector<uint32_t>& positions, uint32_t w) {
    WeightedList list;
    for (uint32_t p : positions) list.support |= BitMask{1} << p;
    list.weight = w;
    list.condition = ModCondition{0, 0};
    enumerate_weight(positions, w, list.elements);
    return list;
}

// One HGJ-shaped tree for a fixed solution weight w. Leaf lists are full
// enumerations on the two support halves; conditions are interval pairs that
// compose to the exact root target.
std::vector<BitMask> rep_tree_for_weight(const SubsetSumInstance& inst, uint32_t w, Rng& rng) {
    const uint64_t N = inst.N;
    const uint32_t m = inst.m;
    const auto& k = inst.weights;

    std::vector<uint32_t> left_half, right_half;
    for (uint32_t i = 0; i < m; ++i) (i < (m + 1) / 2 ? left_half : right_half).push_back(i);

    const uint32_t w1a = (w + 1) / 2, w1b = w / 2;
    auto level2_weights = [](uint32_t w1) {
        return std::pair<uint32_t, uint32_t>{(w1 + 1) / 2, w1 / 2};
    };

    const double r1 = log2_binomial(w, w1a);
    const int c1_bits = std::max(0, static_cast<int>(std::floor(r1)) - 2);
    const double r2 = log2_binomial(w1a, level2_weights(w1a).first);
    const int c2_bits = std::clamp(static_cast<int>(std::floor(r2)) - 2, 0, c1_bits);
    const uint64_t W1 = std::max<uint64_t>(1, N >> c1_bits);
    const uint64_t W2 = std::max<uint64_t>(1, N >> c2_bits);

    // Builds the level-2 list of weight w2 under interval `cond`, as a union
    // over near-balanced weight splits of the two support halves.
    auto build_level2 = [&](uint32_t w2, const ModCondition& cond) {
        WeightedList acc;
        acc.weight = w2;
        acc.condition = cond;
        for (int d = -1; d <= 1; ++d) {
            int wl = static_cast<int>((w2 + 1) / 2) + d;
            int wr = static_cast<int>(w2) - wl;
            if (wl < 0 || wr < 0 || wl > static_cast<int>(left_half.size()) ||
                wr > static_cast<int>(right_half.size()))
                continue;
            WeightedList la = full_distribution(left_half, static_cast<uint32_t>(wl));
            WeightedList lb = full_distribution(right_half, static_cast<uint32_t>(wr));
            WeightedList merged = merge_filter(la, lb, k, N, cond, w2);
            acc.support = merged.support;
            acc.elements.insert(acc.elements.end(), merged.elements.begin(),
                                merged.elements.end());
        }
        return acc;
    };

    auto build_level1 = [&](uint32_t w1, const ModCondition& cond) {
        auto [w2a, w2b] = level2_weights(w1);
        uint64_t beta2 = rng.uniform(N);
        ModCondition ca{beta2, W2};
        ModCondition cb{(cond.base + 2 * N - beta2 - W2 + 1) % N, W2};
        WeightedList l2a = build_level2(w2a, ca);
        WeightedList l2b = build_level2(w2b, cb);
        return merge_filter(l2a, l2b, k, N, cond, w1);
    };

    uint64_t beta1 = rng.uniform(N);
    ModCondition c1a{beta1, W1};
    ModCondition c1b{(inst.target % N + 2 * N - beta1 - W1 + 1) % N, W1};
    WeightedList l1a = build_level1(w1a, c1a);
    WeightedList l1b = build_level1(w1b, c1b);
    WeightedList root = merge_filter(l1a, l1b, k, N, ModCondition::exact(inst.target % N), w);
    return root.elements;
}

}  // namespace

std::vector<BitMask> solve_classical_rep(const SubsetSumInstance& inst, Rng& rng,
                                         const ClassicalRepOptions& opts) {
    if (inst.m > 28) throw std::invalid_argument("solve_classical_rep: m must be <= 28");
    const uint32_t m = inst.m;
    const uint64_t N = inst.N;
    std::set<BitMask> found;

    for (int iter = 0; iter < opts.outer_iterations; ++iter) {
        // Fresh coordinate permutation: balances the support split of every
        // solution weight class across iterations.
        std::vector<uint32_t> perm(m);
        for (uint32_t i = 0; i < m; ++i) perm[i] = i;
        rng.shuffle(perm);
        SubsetSumInstance permuted{N, m, std::vector<uint64_t>(m), inst.target};
        for (uint32_t i = 0; i < m; ++i) permuted.weights[i] = inst.weights[perm[i]];

        auto unpermute = [&](BitMask b) {
            BitMask out = 0;
            for (uint32_t i = 0; i < m; ++i)
                if ((b >> i) & 1) out |= BitMask{1} << perm[i];
            return out;
        };

        for (uint32_t w = 0; w <= m; ++w) {
            double size = log2_binomial(m, w);
            if (std::exp2(size) <= static_cast<double>(opts.direct_enumeration_bound)) {
                std::vector<uint32_t> all(m);
                for (uint32_t i = 0; i < m; ++i) all[i] = i;
                std::vector<BitMask> direct;
                enumerate_weight(all, w, direct);
                for (BitMask b : direct)
                    if (knapsack_sum(b, inst.weights, N) == inst.target % N) found.insert(b);
                continue;
            }
            for (BitMask b : rep_tree_for_weight(permuted, w, rng)) found.insert(unpermute(b));
        }
    }

    std::vector<BitMask> out(found.begin(), found.end());
    std::sort(out.begin(), out.end(), [&](BitMask a, BitMask b) { return lex_less(a, b, m); });
    return out;
}

}  // namespace dcpw
