#include "dcpw/sieve.hpp"

#include <algorithm>
#include <cmath>

#include "dcpw/math_util.hpp"

namespace dcpw {

namespace {

int trailing_zeros(uint64_t x) { return x == 0 ? 64 : __builtin_ctzll(x); }

// Size-target planner shared by both schedule builders. `drift` is the
// empirical per-level log2 shrink of measured list sizes relative to
// l*l'/2^r (about 0.585 for interval conditions, near 0 for congruence
// conditions).
std::vector<SieveSchedule::Level> plan_levels(uint64_t total_bits, uint32_t a_start,
                                              bool interval, double drift, size_t max_list) {
    std::vector<SieveSchedule::Level> levels;
    double x = 1.0;  // log2 expected list size (leaves hold 2 labels)
    uint64_t rem = total_bits;
    uint32_t a = a_start;
    double cap = std::log2(static_cast<double>(max_list)) - 1.0;
    int level = 0;
    while (rem > 0) {
        ++level;
        double x2 = 2.0 * x - drift;
        uint32_t g;
        if (x2 - static_cast<double>(rem) >= 1.3) {
            g = static_cast<uint32_t>(rem);  // affordable to finish now
        } else {
            double target = std::min(static_cast<double>(level) + 1.0, cap);
            double want = std::floor(x2 - target + 0.5);
            g = static_cast<uint32_t>(std::clamp(want, 0.0, static_cast<double>(rem)));
        }
        if (interval) {
            levels.push_back({a, g});
            a -= g;
        } else {
            levels.push_back({static_cast<uint32_t>(total_bits - rem), g});
        }
        x = x2 - static_cast<double>(g);
        rem -= g;
        if (level > 64) throw std::logic_error("plan_levels: failed to converge");
    }
    return levels;
}

}  // namespace

SieveSchedule SieveSchedule::plan_interval(uint64_t n, size_t max_list) {
    SieveSchedule s;
    s.max_list = max_list;
    s.levels = plan_levels(n - 1, static_cast<uint32_t>(n), true, 0.585, max_list);
    return s;
}

SieveSchedule SieveSchedule::plan_congruence(uint32_t bits, size_t max_list) {
    SieveSchedule s;
    s.max_list = max_list;
    if (bits > 0) s.levels = plan_levels(bits, 0, false, 0.1, max_list);
    return s;
}

PhaseVector collimate(const PhaseVector& pv1, const PhaseVector& pv2,
                      const CollimationParams& params, Rng& rng) {
    if (pv1.modulus() != pv2.modulus())
        throw std::invalid_argument("collimate: modulus mismatch");
    const uint64_t N = pv1.modulus();
    const uint64_t bound_in = params.a >= 64 ? UINT64_MAX : (uint64_t{1} << params.a);
    for (uint64_t k : pv1.labels())
        if (k >= bound_in) throw std::invalid_argument("collimate: pv1 label out of bound");
    for (uint64_t k : pv2.labels())
        if (k >= bound_in) throw std::invalid_argument("collimate: pv2 label out of bound");
    const uint32_t out_bits = params.a - params.r;
    const uint64_t chunk = uint64_t{1} << out_bits;
    if (chunk > N)
        throw std::invalid_argument("collimate: output bound exceeds group order");

    const size_t l1 = pv1.size(), l2 = pv2.size();
    const uint64_t pick = rng.uniform(static_cast<uint64_t>(l1) * l2);
    const size_t pi = static_cast<size_t>(pick / l2), pj = static_cast<size_t>(pick % l2);
    const uint64_t V = (pv1.labels()[pi] + pv2.labels()[pj]) >> out_bits;

    std::vector<uint64_t> labels, offsets;
    for (size_t i = 0; i < l1; ++i) {
        for (size_t j = 0; j < l2; ++j) {
            uint64_t sum = pv1.labels()[i] + pv2.labels()[j];
            if ((sum >> out_bits) != V) continue;
            labels.push_back(sum - (V << out_bits));
            offsets.push_back((pv1.offsets()[i] + pv2.offsets()[j]) % N);
        }
    }
    return PhaseVector(N, std::move(labels), std::move(offsets));
}

PhaseVector collimate_low_bits(const PhaseVector& pv1, const PhaseVector& pv2,
                               uint32_t known_bits_after, Rng& rng) {
    if (pv1.modulus() != pv2.modulus())
        throw std::invalid_argument("collimate_low_bits: modulus mismatch");
    const uint64_t N = pv1.modulus();
    const uint64_t mask = (uint64_t{1} << known_bits_after) - 1;

    const size_t l1 = pv1.size(), l2 = pv2.size();
    const uint64_t pick = rng.uniform(static_cast<uint64_t>(l1) * l2);
    const size_t pi = static_cast<size_t>(pick / l2), pj = static_cast<size_t>(pick % l2);
    const uint64_t W = ((pv1.labels()[pi] + pv2.labels()[pj]) % N) & mask;

    std::vector<uint64_t> labels, offsets;
    for (size_t i = 0; i < l1; ++i) {
        for (size_t j = 0; j < l2; ++j) {
            uint64_t sum = (pv1.labels()[i] + pv2.labels()[j]) % N;
            if ((sum & mask) != W) continue;
            labels.push_back(sum);
            offsets.push_back((pv1.offsets()[i] + pv2.offsets()[j]) % N);
        }
    }
    return PhaseVector(N, std::move(labels), std::move(offsets));
}

std::optional<PhaseVector> project_out_pair(
    const PhaseVector& pv, const std::function<bool(uint64_t, uint64_t)>& valid, Rng& rng) {
    std::vector<size_t> alive(pv.size());
    for (size_t i = 0; i < alive.size(); ++i) alive[i] = i;
    const auto& labels = pv.labels();
    const auto& offsets = pv.offsets();
    while (alive.size() >= 2) {
        bool found = false;
        size_t a = 0, b = 0;
        for (size_t i = 0; i < alive.size() && !found; ++i) {
            for (size_t j = 0; j < alive.size() && !found; ++j) {
                if (i == j) continue;
                if (valid(labels[alive[i]], labels[alive[j]])) {
                    a = i;
                    b = j;
                    found = true;
                }
            }
        }
        if (!found) return std::nullopt;
        if (rng.bernoulli(2.0 / static_cast<double>(alive.size()))) {
            size_t ia = alive[a], ib = alive[b];
            return PhaseVector(pv.modulus(), {labels[ia], labels[ib]},
                               {offsets[ia], offsets[ib]});
        }
        // Unmarked outcome: the two marked states drop out of the support.
        size_t hi = std::max(a, b), lo = std::min(a, b);
        alive.erase(alive.begin() + hi);
        alive.erase(alive.begin() + lo);
    }
    return std::nullopt;
}

namespace {

// Depth-first tree build; one in-flight node per level.
std::optional<PhaseVector> build_interval_node(DcpInstance& inst, const SieveSchedule& sched,
                                               size_t level, SieveStats& stats, Rng& rng) {
    if (level == 0) {
        stats.queries++;
        return inst.sample_phase_vector().lift_to_list();
    }
    const auto& lv = sched.levels[level - 1];
    for (uint64_t attempt = 0; attempt < sched.retry_budget; ++attempt) {
        auto left = build_interval_node(inst, sched, level - 1, stats, rng);
        if (!left) return std::nullopt;
        auto right = build_interval_node(inst, sched, level - 1, stats, rng);
        if (!right) return std::nullopt;
        PhaseVector out = collimate(*left, *right, {lv.a, lv.r, sched.max_list}, rng);
        if (out.size() >= sched.min_list && out.size() <= sched.max_list) return out;
        stats.discards++;
    }
    return std::nullopt;
}

std::optional<PhaseVector> build_congruence_node(DcpInstance& inst, const SieveSchedule& sched,
                                                 size_t level, SieveStats& stats, Rng& rng) {
    if (level == 0) {
        stats.queries++;
        return inst.sample_phase_vector().lift_to_list();
    }
    const auto& lv = sched.levels[level - 1];
    const uint32_t bits_after = lv.a + lv.r;
    for (uint64_t attempt = 0; attempt < sched.retry_budget; ++attempt) {
        auto left = build_congruence_node(inst, sched, level - 1, stats, rng);
        if (!left) return std::nullopt;
        auto right = build_congruence_node(inst, sched, level - 1, stats, rng);
        if (!right) return std::nullopt;
        PhaseVector out = collimate_low_bits(*left, *right, bits_after, rng);
        if (out.size() >= sched.min_list && out.size() <= sched.max_list) return out;
        stats.discards++;
    }
    return std::nullopt;
}

}  // namespace

FullSieveResult sieve_collimate_full(DcpInstance& inst, const SieveSchedule& schedule, Rng& rng) {
    FullSieveResult result;
    const SieveSchedule sched =
        schedule.levels.empty() ? SieveSchedule::plan_interval(inst.bit_length()) : schedule;
    for (uint64_t attempt = 0; attempt < sched.retry_budget; ++attempt) {
        auto top = build_interval_node(inst, sched, sched.levels.size(), result.stats, rng);
        if (!top) continue;
        // Labels now lie in {0,1}; |psi_1> needs one of each.
        auto pair = project_out_pair(
            *top, [](uint64_t x, uint64_t y) { return x == 0 && y == 1; }, rng);
        if (!pair) {
            result.stats.projection_failures++;
            result.stats.rebuilds++;
            continue;
        }
        result.vector = pair->collapse_to_single();
        return result;
    }
    return result;
}

PartialSieveResult sieve_to_partial(DcpInstance& inst, uint32_t bits,
                                    const SieveSchedule& schedule, Rng& rng,
                                    uint64_t target_residue) {
    if (bits > inst.bit_length() || bits > 63)
        throw std::invalid_argument("sieve_to_partial: bits exceeds group bit length");
    if (bits > 0 && !inst.modulus_is_power_of_two())
        throw std::invalid_argument("sieve_to_partial: congruence targets need N = 2^n");
    if (bits > 0 && target_residue >= (uint64_t{1} << bits))
        throw std::invalid_argument("sieve_to_partial: target residue out of range");

    SieveStats stats;
    if (bits == 0) {
        stats.queries++;
        return {inst.sample_phase_vector(), stats};
    }

    const uint64_t N = inst.modulus();
    const uint64_t mod = uint64_t{1} << bits;
    const uint32_t kappa =
        target_residue == 0 ? bits : static_cast<uint32_t>(trailing_zeros(target_residue));
    SieveSchedule sched = schedule;
    if (sched.levels.empty()) sched = SieveSchedule::plan_congruence(kappa, schedule.max_list);

    auto valid = [&](uint64_t x, uint64_t y) {
        uint64_t diff = (y + N - x) % N;
        return diff != 0 && (diff % mod) == target_residue;
    };

    for (uint64_t attempt = 0; attempt < sched.retry_budget; ++attempt) {
        auto top = build_congruence_node(inst, sched, sched.levels.size(), stats, rng);
        if (!top) continue;
        auto pair = project_out_pair(*top, valid, rng);
        if (!pair) {
            stats.projection_failures++;
            stats.rebuilds++;
            continue;
        }
        return {*pair, stats};
    }
    throw SieveFailure("sieve_to_partial: retry budget exhausted");
}

std::optional<PhaseVector> regev_combine(const std::vector<PhaseVector>& pvs, uint64_t B,
                                         Rng& rng) {
    const size_t m = pvs.size();
    if (m < 2) throw std::invalid_argument("regev_combine: need at least two vectors");
    if (m > 24) throw std::invalid_argument("regev_combine: enumeration bound is m <= 24");
    if (B < 1) throw std::invalid_argument("regev_combine: B must be >= 1");
    const uint64_t N = pvs[0].modulus();
    std::vector<uint64_t> k(m);
    for (size_t i = 0; i < m; ++i) {
        if (!pvs[i].is_single())
            throw std::invalid_argument("regev_combine: inputs must be single-label");
        if (pvs[i].modulus() != N) throw std::invalid_argument("regev_combine: modulus mismatch");
        k[i] = pvs[i].label();
    }

    const uint64_t M = uint64_t{1} << m;
    auto knapsack = [&](uint64_t key) {
        // key encodes (b_1..b_m) with b_1 as the most significant digit, so
        // ascending keys enumerate tuples in lexicographic order.
        uint64_t sum = 0;
        for (size_t i = 0; i < m; ++i)
            if ((key >> (m - 1 - i)) & 1) sum += k[i];
        return sum;
    };

    const uint64_t V = knapsack(rng.uniform(M)) / B;
    uint64_t first = M, second = M;
    for (uint64_t key = 0; key < M; ++key) {
        if (knapsack(key) / B != V) continue;
        if (first == M) {
            first = key;
        } else {
            second = key;
            break;
        }
    }
    if (second == M) return std::nullopt;
    return PhaseVector(N, {knapsack(first) % N, knapsack(second) % N}, {0, 0});
}

Kuperberg1Result kuperberg1_find_lsb(DcpInstance& inst, Rng& rng, size_t pool_size) {
    if (!inst.modulus_is_power_of_two())
        throw std::invalid_argument("kuperberg1_find_lsb: N must be a power of two");
    const uint64_t N = inst.modulus();
    const uint64_t n = inst.bit_length();
    if (pool_size == 0) {
        double suggested = 8.0 * std::pow(4.0 / 3.0, static_cast<double>(n));
        pool_size = static_cast<size_t>(std::max(64.0, std::ceil(suggested)));
    }

    Kuperberg1Result result;
    std::vector<uint64_t> pool;
    pool.reserve(pool_size);
    for (size_t i = 0; i < pool_size; ++i) {
        uint64_t k = inst.sample_phase_vector().label();
        result.queries++;
        if (k != 0) pool.push_back(k);
    }

    for (uint64_t stage = 0; stage + 1 < n; ++stage) {
        std::vector<uint64_t> current, next;
        for (uint64_t k : pool) {
            if (static_cast<uint64_t>(trailing_zeros(k)) == stage)
                current.push_back(k);
            else
                next.push_back(k);
        }
        rng.shuffle(current);
        for (size_t i = 0; i + 1 < current.size(); i += 2) {
            auto out = combine_pair_cnot(PhaseVector::single(current[i], N),
                                         PhaseVector::single(current[i + 1], N), rng);
            uint64_t label = out.vector.label();
            if (label != 0) next.push_back(label);
        }
        pool = std::move(next);
    }

    for (uint64_t k : pool) {
        if (k != N / 2) continue;
        result.lsb = inst.measure_hadamard(PhaseVector::single(k, N), rng);
        return result;
    }
    result.pool_exhausted = true;
    return result;
}

std::vector<std::vector<int>> ConfigMatrix::bit_matrix() const {
    const uint64_t n = ceil_log2(N);
    std::vector<std::vector<int>> bits(labels.size(), std::vector<int>(n, 0));
    for (size_t i = 0; i < labels.size(); ++i)
        for (uint64_t j = 0; j < n; ++j) bits[i][j] = static_cast<int>((labels[i] >> j) & 1);
    return bits;
}

bool ConfigMatrix::triangular_invariant_holds() const {
    for (uint32_t i = 1; i <= m; ++i) {
        uint64_t k = labels[i - 1];
        if (i <= m - t) {
            if (i > 1 && (k & ((uint64_t{1} << (i - 1)) - 1)) != 0) return false;
            if (((k >> (i - 1)) & 1) != 1) return false;
        } else if (m > t) {
            if ((k & ((uint64_t{1} << (m - t)) - 1)) != 0) return false;
        }
    }
    return true;
}

ConfigMatrix build_config_matrix(DcpInstance& inst, uint32_t m, uint32_t t,
                                 const SieveSchedule& schedule, Rng& rng) {
    if (t < 1 || t > m) throw std::invalid_argument("build_config_matrix: need 1 <= t <= m");
    if (m > inst.bit_length()) throw std::invalid_argument("build_config_matrix: m exceeds n");
    if (!inst.modulus_is_power_of_two())
        throw std::invalid_argument("build_config_matrix: requires N = 2^n");

    ConfigMatrix config;
    config.N = inst.modulus();
    config.m = m;
    config.t = t;
    const uint64_t q0 = inst.query_count();

    // Each row plans its own level stack; only the knobs are shared.
    SieveSchedule knobs = schedule;
    knobs.levels.clear();

    for (uint32_t i = 1; i <= m; ++i) {
        PhaseVector row = [&] {
            if (i <= m - t) {
                auto res = sieve_to_partial(inst, i, knobs, rng, uint64_t{1} << (i - 1));
                config.stats.discards += res.stats.discards;
                config.stats.projection_failures += res.stats.projection_failures;
                return res.vector.collapse_to_single();
            }
            if (m == t) {
                return inst.sample_phase_vector();  // kept fully random
            }
            auto res = sieve_to_partial(inst, m - t, knobs, rng, 0);
            config.stats.discards += res.stats.discards;
            config.stats.projection_failures += res.stats.projection_failures;
            return res.vector.collapse_to_single();
        }();
        config.labels.push_back(row.label());
        config.vectors.push_back(std::move(row));
    }
    config.stats.queries = inst.query_count() - q0;
    return config;
}

}  // namespace dcpw
