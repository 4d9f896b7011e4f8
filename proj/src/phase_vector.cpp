#include "dcpw/phase_vector.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dcpw/math_util.hpp"

namespace dcpw {

namespace {

uint64_t mod_sub(uint64_t a, uint64_t b, uint64_t N) { return (a + N - b) % N; }

}  // namespace

PhaseVector::PhaseVector(uint64_t modulus, std::vector<uint64_t> labels,
                         std::vector<uint64_t> offsets)
    : modulus_(modulus), labels_(std::move(labels)), offsets_(std::move(offsets)) {
    if (modulus_ < 2) throw std::invalid_argument("PhaseVector: modulus must be >= 2");
    if (labels_.empty()) throw std::invalid_argument("PhaseVector: labels must be nonempty");
    if (labels_.size() != offsets_.size())
        throw std::invalid_argument("PhaseVector: labels/offsets size mismatch");
    for (uint64_t k : labels_)
        if (k >= modulus_) throw std::invalid_argument("PhaseVector: label out of range");
    for (uint64_t o : offsets_)
        if (o >= modulus_) throw std::invalid_argument("PhaseVector: offset out of range");
    normalize_global_phase();
}

PhaseVector PhaseVector::single(uint64_t label, uint64_t modulus) {
    return PhaseVector(modulus, {label}, {0});
}

uint64_t PhaseVector::label() const {
    if (!is_single()) throw std::logic_error("PhaseVector: label() on multi-label vector");
    return labels_[0];
}

uint64_t PhaseVector::offset() const {
    if (!is_single()) throw std::logic_error("PhaseVector: offset() on multi-label vector");
    return offsets_[0];
}

PhaseVector PhaseVector::lift_to_list() const {
    if (!is_single()) return *this;
    return PhaseVector(modulus_, {0, labels_[0]}, {0, offsets_[0]});
}

PhaseVector PhaseVector::collapse_to_single() const {
    if (labels_.size() != 2)
        throw std::logic_error("PhaseVector: collapse_to_single() needs exactly two labels");
    return PhaseVector(modulus_, {mod_sub(labels_[1], labels_[0], modulus_)},
                       {mod_sub(offsets_[1], offsets_[0], modulus_)});
}

void PhaseVector::normalize_global_phase() {
    // Single-label vectors already store the relative phase of |1> vs |0>.
    if (is_single()) return;
    uint64_t o0 = offsets_[0];
    if (o0 == 0) return;
    for (auto& o : offsets_) o = mod_sub(o, o0, modulus_);
}

DcpInstance::DcpInstance(uint64_t N, std::optional<uint64_t> s_opt, uint64_t seed)
    : N_(N), n_(ceil_log2(N)), s_(0), rng_(seed) {
    if (N < 4) throw std::invalid_argument("DcpInstance: N must be >= 4");
    if (s_opt) {
        if (*s_opt >= N) throw std::invalid_argument("DcpInstance: secret out of range");
        s_ = *s_opt;
    } else {
        s_ = rng_.uniform(N);
    }
}

PhaseVector DcpInstance::sample_phase_vector() {
    ++queries_;
    return PhaseVector::single(rng_.uniform(N_), N_);
}

double DcpInstance::hadamard_zero_probability(const PhaseVector& pv) const {
    if (!pv.is_single())
        throw std::invalid_argument("measure_hadamard: vector must be single-label");
    uint64_t e = (static_cast<unsigned __int128>(pv.label()) * s_ + pv.offset()) % N_;
    double c = std::cos(std::numbers::pi * static_cast<double>(e) / static_cast<double>(N_));
    return c * c;
}

int DcpInstance::measure_hadamard(const PhaseVector& pv, Rng& rng) const {
    return rng.bernoulli(hadamard_zero_probability(pv)) ? 0 : 1;
}

CombineOutcome combine_pair_cnot(const PhaseVector& pv_p, const PhaseVector& pv_q, Rng& rng) {
    if (!pv_p.is_single() || !pv_q.is_single())
        throw std::invalid_argument("combine_pair_cnot: inputs must be single-label");
    if (pv_p.modulus() != pv_q.modulus())
        throw std::invalid_argument("combine_pair_cnot: modulus mismatch");
    const uint64_t N = pv_p.modulus();
    uint64_t p = pv_p.label(), q = pv_q.label();
    uint64_t op = pv_p.offset(), oq = pv_q.offset();
    if (rng.bernoulli(0.5)) {
        // Difference branch; the eliminated qubit's phase w^(s*q+oq) is global.
        return {PhaseVector(N, {(p + N - q) % N}, {(op + N - oq) % N}), 0};
    }
    return {PhaseVector(N, {(p + q) % N}, {(op + oq) % N}), 1};
}

}  // namespace dcpw
