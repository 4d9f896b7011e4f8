#include "dcpw/dcp_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <stdexcept>

#include "dcpw/math_util.hpp"

namespace dcpw {

namespace {

using cplx = std::complex<double>;

std::vector<cplx> root_table(uint64_t N) {
    std::vector<cplx> w(N);
    for (uint64_t t = 0; t < N; ++t) {
        double ang = 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(N);
        w[t] = {std::cos(ang), std::sin(ang)};
    }
    return w;
}

// In-place iterative radix-2 FFT (forward: X[u] = sum_v x[v] e^{-2pi i uv/N}).
void fft_pow2(std::vector<cplx>& a) {
    const size_t n = a.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
        cplx wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (size_t j = 0; j < len / 2; ++j) {
                cplx u = a[i + j];
                cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

uint64_t sample_from_pmf(const std::vector<double>& p, Rng& rng) {
    double u = rng.uniform_real();
    double acc = 0.0;
    for (size_t j = 0; j < p.size(); ++j) {
        acc += p[j];
        if (u < acc) return j;
    }
    return p.size() - 1;
}

}  // namespace

double eh_log_likelihood(uint64_t candidate, const std::vector<std::pair<uint64_t, int>>& obs,
                         uint64_t N) {
    double score = 0.0;
    for (const auto& [k, bit] : obs) {
        uint64_t e = (static_cast<unsigned __int128>(k) * candidate) % N;
        double c = std::cos(std::numbers::pi * static_cast<double>(e) / static_cast<double>(N));
        double p0 = c * c;
        score += std::log(bit == 0 ? p0 : 1.0 - p0);
    }
    return score;
}

EttingerHoyerResult ettinger_hoyer(DcpInstance& inst, uint64_t samples, Rng& rng) {
    if (samples == 0) throw std::invalid_argument("ettinger_hoyer: samples must be >= 1");
    const uint64_t N = inst.modulus();
    const uint64_t q0 = inst.query_count();

    std::vector<std::pair<uint64_t, int>> obs;
    obs.reserve(samples);
    for (uint64_t i = 0; i < samples; ++i) {
        PhaseVector pv = inst.sample_phase_vector();
        obs.emplace_back(pv.label(), inst.measure_hadamard(pv, rng));
    }

    uint64_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (uint64_t cand = 0; cand < N; ++cand) {
        double score = eh_log_likelihood(cand, obs, N);
        if (score > best_score) {  // ties break toward the smaller candidate
            best_score = score;
            best = cand;
        }
    }

    EttingerHoyerResult result;
    result.s_hat = best;
    result.report.recovered_s = best;
    result.report.success = best == inst.secret_for_verification();
    result.report.queries_used = inst.query_count() - q0;
    result.report.attempts = 1;
    return result;
}

RegevLsbResult regev_lsb(DcpInstance& inst, const ClassicalSolver& solver, Rng& rng,
                         uint64_t attempt_budget) {
    const uint64_t N = inst.modulus();
    const uint32_t n = static_cast<uint32_t>(inst.bit_length());
    const uint64_t B = uint64_t{1} << (n - 1);
    const uint64_t q0 = inst.query_count();

    RegevLsbResult result;
    for (uint64_t attempt = 0; attempt < attempt_budget; ++attempt) {
        result.report.attempts++;
        std::vector<uint64_t> k(n);
        for (auto& ki : k) ki = inst.sample_phase_vector().label();

        // Measuring <b,k> mod 2^(n-1) lands on z with probability
        // #preimages / 2^n, i.e. the residue of a uniform b.
        BitMask probe = static_cast<BitMask>(rng.uniform(uint64_t{1} << n));
        uint64_t z = 0;
        for (uint32_t i = 0; i < n; ++i)
            if ((probe >> i) & 1) z += k[i];
        z %= B;

        SubsetSumInstance ss{B, n, std::vector<uint64_t>(n), z};
        for (uint32_t i = 0; i < n; ++i) ss.weights[i] = k[i] % B;
        std::vector<BitMask> sols = solver(ss);
        std::sort(sols.begin(), sols.end(),
                  [&](BitMask a, BitMask b) { return lex_less(a, b, n); });
        if (sols.size() < 2) continue;  // restart with fresh vectors

        // Step 5: mark a pair, measure; on the unmarked outcome those two
        // solutions drop out and the next pair is tried.
        std::optional<PhaseVector> projected;
        size_t lo = 0;
        size_t alive = sols.size();
        while (alive >= 2) {
            if (rng.bernoulli(2.0 / static_cast<double>(alive))) {
                uint64_t s1 = 0, s2 = 0;
                for (uint32_t i = 0; i < n; ++i) {
                    if ((sols[lo] >> i) & 1) s1 += k[i];
                    if ((sols[lo + 1] >> i) & 1) s2 += k[i];
                }
                projected = PhaseVector(N, {s1 % N, s2 % N}, {0, 0});
                break;
            }
            lo += 2;
            alive -= 2;
        }
        if (!projected) continue;

        PhaseVector relabeled = projected->collapse_to_single();
        int bit = inst.measure_hadamard(relabeled, rng);
        result.bit = bit;
        result.report.success = true;
        result.report.recovered_s = std::nullopt;
        result.report.restarts = result.report.attempts - 1;
        result.report.queries_used = inst.query_count() - q0;
        return result;
    }
    result.report.budget_exhausted = true;
    result.report.queries_used = inst.query_count() - q0;
    return result;
}

std::vector<double> exact_output_distribution(const std::vector<uint64_t>& sums, uint64_t s,
                                              uint64_t N) {
    if (sums.empty()) throw std::invalid_argument("exact_output_distribution: empty sum set");
    const bool pow2 = (N & (N - 1)) == 0;
    if (!pow2 && static_cast<double>(sums.size()) * static_cast<double>(N) > std::exp2(28))
        throw std::invalid_argument("exact_output_distribution: |G| * N exceeds 2^28");

    // Multiplicity vector; Z = sum mult^2 normalizes (equals |G| when the
    // sums are distinct).
    double Z = 0.0;
    std::vector<double> mult(pow2 ? N : 0, 0.0);
    if (pow2) {
        for (uint64_t v : sums) mult[v % N] += 1.0;
        for (double c : mult) Z += c * c;
    } else {
        std::vector<uint64_t> sorted(sums);
        for (auto& v : sorted) v %= N;
        std::sort(sorted.begin(), sorted.end());
        for (size_t i = 0; i < sorted.size();) {
            size_t j = i;
            while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
            Z += static_cast<double>(j - i) * static_cast<double>(j - i);
            i = j;
        }
    }

    std::vector<double> p(N);
    if (pow2) {
        std::vector<cplx> amp(N);
        for (uint64_t v = 0; v < N; ++v) amp[v] = mult[v];
        fft_pow2(amp);
        // sum_v mult[v] w^{(s-j)v} = conj(FFT(mult))[(s-j) mod N]
        for (uint64_t j = 0; j < N; ++j) {
            uint64_t u = (s + N - j % N) % N;
            p[j] = std::norm(amp[u]) / (static_cast<double>(N) * Z);
        }
    } else {
        auto w = root_table(N);
        for (uint64_t j = 0; j < N; ++j) {
            uint64_t d = (s + N - j) % N;
            cplx acc(0.0, 0.0);
            for (uint64_t v : sums) acc += w[(static_cast<unsigned __int128>(d) * v) % N];
            p[j] = std::norm(acc) / (static_cast<double>(N) * Z);
        }
    }
    return p;
}

uint64_t sample_output_accept_reject(const std::vector<uint64_t>& sums, uint64_t s, uint64_t N,
                                     Rng& rng) {
    const double G = static_cast<double>(sums.size());
    auto w = root_table(N);
    while (true) {
        uint64_t j = rng.uniform(N);
        uint64_t d = (s + N - j) % N;
        cplx acc(0.0, 0.0);
        for (uint64_t v : sums) acc += w[(static_cast<unsigned __int128>(d) * (v % N)) % N];
        double pj = std::norm(acc) / (static_cast<double>(N) * G);
        if (rng.bernoulli(pj / (G / static_cast<double>(N)))) return j;
    }
}

RunReport qss_dcp_solve(DcpInstance& inst, uint32_t m, const QssSolveOptions& opts, Rng& rng) {
    const uint64_t N = inst.modulus();
    if (m >= inst.bit_length()) throw std::invalid_argument("qss_dcp_solve: need m < n");
    if (m > 24) throw std::invalid_argument("qss_dcp_solve: enumeration bound is m <= 24");
    const uint64_t M = uint64_t{1} << m;
    const uint64_t q0 = inst.query_count();

    uint64_t budget = opts.attempt_budget;
    if (budget == 0) {
        double d = 64.0 * static_cast<double>(N) * static_cast<double>(N) /
                   (static_cast<double>(M) * static_cast<double>(N - M + 1));
        budget = static_cast<uint64_t>(std::max(16.0, std::ceil(d)));
    }
    auto verifier = opts.verifier
                        ? opts.verifier
                        : [&inst](uint64_t j) { return j == inst.secret_for_verification(); };
    auto factory = opts.solver_factory;
    if (!factory) {
        double eps = opts.ideal ? 0.0 : opts.epsilon;
        factory = [eps, N](const std::vector<uint64_t>& k, uint64_t seed) {
            auto model = std::make_shared<QssModel>(build_qss_model(k, N, eps, seed));
            return QuantumSolver{[model](uint64_t v) { return model->apply(v); }};
        };
    }

    RunReport report;
    const uint64_t s = inst.secret_for_verification();
    for (uint64_t attempt = 0; attempt < budget; ++attempt) {
        report.attempts++;
        std::vector<uint64_t> k(m);
        for (auto& ki : k) ki = inst.sample_phase_vector().label();

        QuantumSolver solver = factory(k, opts.model_seed + attempt);

        std::vector<uint64_t> g_sums;
        if (opts.ideal) {
            // Ideal variant: no projection; all 2^m branches survive with
            // multiplicity, normalized by Z(k).
            g_sums.resize(M);
            for (uint64_t b = 0; b < M; ++b)
                g_sums[b] = knapsack_sum(static_cast<BitMask>(b), k, N);
        } else {
            for (uint64_t b = 0; b < M; ++b) {
                uint64_t v = knapsack_sum(static_cast<BitMask>(b), k, N);
                auto found = solver.apply(v);
                if (found && *found == static_cast<BitMask>(b)) g_sums.push_back(v);
            }
            report.step4_attempts++;
            double g = static_cast<double>(g_sums.size());
            if (!rng.bernoulli(g / static_cast<double>(M))) continue;  // measured != 0^m
            report.step4_successes++;
        }
        if (g_sums.empty()) continue;

        uint64_t j;
        if (opts.exact_final) {
            auto p = exact_output_distribution(g_sums, s, N);
            j = sample_from_pmf(p, rng);
        } else {
            j = sample_output_accept_reject(g_sums, s, N, rng);
        }
        report.final_measurements++;
        report.wall_stats["g_over_n_sum"] += static_cast<double>(g_sums.size()) /
                                             static_cast<double>(N);
        if (j == s) report.wall_stats["j_equals_s"] += 1.0;

        if (verifier(j)) {
            report.recovered_s = j;
            report.success = true;
            report.restarts = report.attempts - 1;
            report.queries_used = inst.query_count() - q0;
            return report;
        }
    }
    report.budget_exhausted = true;
    report.restarts = report.attempts;
    report.queries_used = inst.query_count() - q0;
    return report;
}

RunReport interpolation_solve(DcpInstance& inst, uint32_t t, const SieveSchedule& schedule,
                              const InterpolationOptions& opts, Rng& rng) {
    const uint64_t N = inst.modulus();
    const uint32_t n = static_cast<uint32_t>(inst.bit_length());
    const uint32_t m = n - 1;
    if (t < 1 || t > m) throw std::invalid_argument("interpolation_solve: need 1 <= t <= n-1");
    const uint64_t q0 = inst.query_count();
    const uint64_t s = inst.secret_for_verification();
    const uint64_t M = uint64_t{1} << m;

    uint64_t budget = opts.attempt_budget;
    if (budget == 0) {
        double d = 64.0 * static_cast<double>(N) * static_cast<double>(N) /
                   (static_cast<double>(M) * static_cast<double>(N - M + 1));
        budget = static_cast<uint64_t>(std::max(16.0, std::ceil(d)));
    }
    auto verifier = opts.verifier
                        ? opts.verifier
                        : [&inst](uint64_t j) { return j == inst.secret_for_verification(); };

    RunReport report;
    for (uint64_t attempt = 0; attempt < budget; ++attempt) {
        report.attempts++;
        ConfigMatrix config;
        try {
            config = build_config_matrix(inst, m, t, schedule, rng);
        } catch (const SieveFailure&) {
            report.wall_stats["sieve_failures"] += 1.0;
            continue;
        }
        report.wall_stats["sieve_queries"] += static_cast<double>(config.stats.queries);

        ConfigReduction reduction(config.labels, t, N);
        QssModel tail_model = build_qss_model(reduction.reduced_weights(),
                                              reduction.reduced_modulus(), opts.epsilon,
                                              opts.model_seed + attempt);
        auto apply = [&](uint64_t v) -> std::optional<BitMask> {
            auto red = reduction.reduce_target(v);
            if (!red) return std::nullopt;
            auto tail = tail_model.apply(red->reduced_target);
            if (!tail) return std::nullopt;
            return reduction.extend(v, *tail);
        };

        std::vector<uint64_t> g_sums;
        for (uint64_t b = 0; b < M; ++b) {
            uint64_t v = knapsack_sum(static_cast<BitMask>(b), config.labels, N);
            auto found = apply(v);
            if (found && *found == static_cast<BitMask>(b)) g_sums.push_back(v);
        }
        report.step4_attempts++;
        double g = static_cast<double>(g_sums.size());
        if (!rng.bernoulli(g / static_cast<double>(M))) continue;
        report.step4_successes++;
        if (g_sums.empty()) continue;

        uint64_t j;
        if (opts.exact_final) {
            auto p = exact_output_distribution(g_sums, s, N);
            j = sample_from_pmf(p, rng);
        } else {
            j = sample_output_accept_reject(g_sums, s, N, rng);
        }
        report.final_measurements++;
        if (verifier(j)) {
            report.recovered_s = j;
            report.success = true;
            report.restarts = report.attempts - 1;
            report.queries_used = inst.query_count() - q0;
            return report;
        }
    }
    report.budget_exhausted = true;
    report.restarts = report.attempts;
    report.queries_used = inst.query_count() - q0;
    return report;
}

LemmaEZReport verify_lemma_ez(uint64_t n, uint32_t m, uint64_t trials, Rng& rng) {
    if (m > 20) throw std::invalid_argument("verify_lemma_ez: m must be <= 20");
    const uint64_t N = uint64_t{1} << n;
    const double M = std::exp2(static_cast<double>(m));

    std::vector<uint32_t> bucket(N, 0);
    std::vector<uint64_t> sums;
    sums.reserve(size_t{1} << m);
    double sum_z = 0.0, sum_z2 = 0.0;
    for (uint64_t trial = 0; trial < trials; ++trial) {
        sums.assign(1, 0);
        for (uint32_t i = 0; i < m; ++i) {
            uint64_t ki = rng.uniform(N);
            size_t half = sums.size();
            for (size_t j = 0; j < half; ++j) sums.push_back((sums[j] + ki) % N);
        }
        for (uint64_t v : sums) bucket[v]++;
        double z = 0.0;
        for (uint64_t v : sums) {
            if (bucket[v] == 0) continue;  // already counted
            double c = static_cast<double>(bucket[v]);
            z += c * c;
            bucket[v] = 0;
        }
        sum_z += z;
        sum_z2 += z * z;
    }

    LemmaEZReport report;
    report.trials = trials;
    report.empirical_mean = sum_z / static_cast<double>(trials);
    report.analytic = M * (1.0 + (M - 1.0) / static_cast<double>(N));
    double var = sum_z2 / static_cast<double>(trials) - report.empirical_mean * report.empirical_mean;
    report.std_error = std::sqrt(std::max(0.0, var) / static_cast<double>(trials));
    return report;
}

LemmaGBoundReport verify_lemma_g_bound(uint64_t n, uint32_t m, double epsilon, uint64_t trials,
                                       Rng& rng) {
    if (m > 20) throw std::invalid_argument("verify_lemma_g_bound: m must be <= 20");
    const uint64_t N = uint64_t{1} << n;
    const double M = std::exp2(static_cast<double>(m));

    LemmaGBoundReport report;
    report.trials = trials;
    double sum_g = 0.0, sum_g2 = 0.0;
    for (uint64_t trial = 0; trial < trials; ++trial) {
        std::vector<uint64_t> k(m);
        for (auto& ki : k) ki = rng.uniform(N);
        QssModel model = build_qss_model(k, N, epsilon, rng.next_u64());

        // Z from the multiplicity of each achievable sum.
        std::vector<uint64_t> sums{0};
        sums.reserve(size_t{1} << m);
        for (uint32_t i = 0; i < m; ++i) {
            size_t half = sums.size();
            for (size_t j = 0; j < half; ++j) sums.push_back((sums[j] + k[i]) % N);
        }
        std::sort(sums.begin(), sums.end());
        double z = 0.0;
        for (size_t i = 0; i < sums.size();) {
            size_t j = i;
            while (j < sums.size() && sums[j] == sums[i]) ++j;
            z += static_cast<double>(j - i) * static_cast<double>(j - i);
            i = j;
        }

        double g = static_cast<double>(model.g_count());
        if (g < (1.0 - epsilon) * (2.0 * M - z) - 1e-9) report.violations++;
        sum_g += g;
        sum_g2 += g * g;
    }
    report.mean_g = sum_g / static_cast<double>(trials);
    report.lemma5_bound = (1.0 - epsilon) * M * (1.0 - (M - 1.0) / static_cast<double>(N));
    double var = sum_g2 / static_cast<double>(trials) - report.mean_g * report.mean_g;
    report.std_error = std::sqrt(std::max(0.0, var) / static_cast<double>(trials));
    return report;
}

}  // namespace dcpw
