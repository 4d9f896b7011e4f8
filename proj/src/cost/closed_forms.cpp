#include "dcpw/cost/closed_forms.hpp"

#include <cmath>
#include <stdexcept>

#include "dcpw/math_util.hpp"

namespace dcpw {

CostReport sieve_cost_simple(uint64_t n) {
    if (n < 2) throw std::invalid_argument("sieve_cost_simple: n must be >= 2");
    CostReport r;
    double q = std::sqrt(2.0 * static_cast<double>(n));
    r.queries = q;
    r.classical_time = q + std::log2(q);
    r.quantum_time = q + std::log2(q);
    r.classical_space = q;
    r.quantum_space = std::log2(static_cast<double>(n));
    r.notes = {{"levels", q}, {"per_level_relabel", std::log2(q)}};
    return r;
}

CostReport sieve_cost_precise(uint64_t n, double delta, double c) {
    if (n < 2) throw std::invalid_argument("sieve_cost_precise: n must be >= 2");
    if (delta < 0.0 || delta >= 1.0)
        throw std::invalid_argument("sieve_cost_precise: delta must lie in [0,1)");
    CostReport r;
    double h = c + std::sqrt(2.0 * static_cast<double>(n) + 4.0 * c * c);
    double loss = 1.0 - std::log2(1.0 - delta);
    r.queries = loss * h;
    r.classical_time = r.queries + std::log2(h);
    r.quantum_time = r.queries + std::log2(h);
    r.classical_space = r.queries;
    r.quantum_space = std::log2(static_cast<double>(n));
    r.notes = {{"h", h}, {"discard_loss_factor", loss}};
    return r;
}

SumLemmaCheck sum_lemma_check(double alpha, uint64_t n) {
    if (alpha <= 0.0 || n < 1) throw std::invalid_argument("sum_lemma_check: need alpha > 0, n >= 1");
    double lhs = -std::numeric_limits<double>::infinity();
    for (uint64_t i = 1; i <= n; ++i)
        lhs = log2_add(lhs, alpha * std::sqrt(static_cast<double>(i)));
    double root = std::ceil(std::sqrt(static_cast<double>(n)));
    double rhs = std::log2(std::exp2(alpha) / (std::exp2(alpha) - 1.0)) +
                 std::log2(2.0 * root + 1.0) + alpha * root;
    return {lhs, rhs};
}

Algorithm algorithm_from_string(const std::string& name) {
    if (name == "kuperberg2") return Algorithm::kuperberg2;
    if (name == "regev") return Algorithm::regev;
    if (name == "ettinger-hoyer" || name == "ettinger_hoyer") return Algorithm::ettinger_hoyer;
    if (name == "alg4-qracm" || name == "alg4_qracm") return Algorithm::alg4_qracm;
    if (name == "alg4-no-qracm" || name == "alg4_no_qracm") return Algorithm::alg4_no_qracm;
    throw std::invalid_argument("unknown algorithm: " + name);
}

std::string algorithm_name(Algorithm alg) {
    switch (alg) {
        case Algorithm::kuperberg2: return "kuperberg2";
        case Algorithm::regev: return "regev";
        case Algorithm::ettinger_hoyer: return "ettinger-hoyer";
        case Algorithm::alg4_qracm: return "alg4-qracm";
        case Algorithm::alg4_no_qracm: return "alg4-no-qracm";
    }
    return "?";
}

CostReport table_row(Algorithm alg, uint64_t n) {
    if (n < 64) throw std::invalid_argument("table_row: n must be >= 64");
    const double nd = static_cast<double>(n);
    const double lg = std::log2(nd);
    CostReport r;
    r.quantum_space = lg;
    switch (alg) {
        case Algorithm::kuperberg2: {
            double e = std::sqrt(2.0 * nd) + 0.5 * lg + 3.0;
            r.queries = e;
            r.classical_time = e;
            r.quantum_time = e;
            r.classical_space = std::sqrt(2.0 * nd);
            break;
        }
        case Algorithm::regev:
            r.queries = 2.0 * lg + 3.0;
            r.quantum_time = 2.0 * lg + 3.0;
            r.classical_time = CostConstants::c_css * nd + CostConstants::kappa_regev;
            r.classical_space = CostConstants::c_css * nd;
            r.notes = {{"kappa_regev_fit", CostConstants::kappa_regev}};
            break;
        case Algorithm::ettinger_hoyer:
            r.queries = lg + 6.5;
            r.quantum_time = lg + 6.5;
            r.classical_time = nd;
            r.classical_space = lg;
            break;
        case Algorithm::alg4_qracm:
            r.queries = lg + 3.0;
            r.classical_time = 0.238 * nd + 12.0;
            r.quantum_time = 0.238 * nd + 1.5 * lg + 12.0;
            r.classical_space = 0.238 * nd;
            break;
        case Algorithm::alg4_no_qracm:
            r.queries = lg + 3.0;
            r.classical_time = 0.2324 * nd;
            r.quantum_time = 0.418 * nd + 1.5 * lg + 15.5;
            r.classical_space = 0.2324 * nd;
            break;
    }
    return r;
}

CostReport interpolation_cost(uint64_t n, uint64_t t, double c_dcp, double c_qss) {
    if (t < 1 || t > n - 1) throw std::invalid_argument("interpolation_cost: need 1 <= t <= n-1");
    const double nt = static_cast<double>(n - t);
    const double td = static_cast<double>(t);
    CostReport r;
    double sieve = std::sqrt(c_dcp * nt);
    r.queries = sieve + std::log2(std::sqrt(nt) + td);
    r.quantum_time = log2_add(r.queries, c_qss * td);
    r.classical_time = r.quantum_time;
    r.classical_space = std::max(sieve, c_qss * td);
    r.quantum_space = std::log2(static_cast<double>(n));
    r.notes = {{"sieve_term", r.queries}, {"subset_sum_term", c_qss * td}};
    return r;
}

double log2_weight_guess_probability(uint64_t m) {
    double md = static_cast<double>(m);
    return log2_binomial(md, std::ceil(md / 2.0)) - md;
}

}  // namespace dcpw
