#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "dcpw/phase_vector.hpp"

using namespace dcpw;

TEST_CASE("instance construction and validation") {
    DcpInstance inst(8, 5, 1);
    CHECK(inst.bit_length() == 3);
    CHECK(inst.secret_for_verification() == 5);
    CHECK(inst.query_count() == 0);

    DcpInstance drawn(9, std::nullopt, 7);
    CHECK(drawn.bit_length() == 4);
    CHECK(drawn.secret_for_verification() < 9);

    CHECK_THROWS_AS(DcpInstance(2, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(DcpInstance(8, 8, 0), std::invalid_argument);
}

TEST_CASE("oracle determinism and query counting") {
    DcpInstance a(64, 11, 42);
    DcpInstance b(64, 11, 42);
    CHECK(a.sample_phase_vector() == b.sample_phase_vector());
    CHECK(a.query_count() == 1);
    a.sample_phase_vector();
    CHECK(a.query_count() == 2);
}

TEST_CASE("oracle labels are uniform (chi-square at N=16)") {
    const uint64_t N = 16;
    DcpInstance inst(N, 3, 2024);
    const int samples = 100000;
    std::map<uint64_t, int> counts;
    for (int i = 0; i < samples; ++i) counts[inst.sample_phase_vector().label()]++;
    // 5 sigma per cell around samples/N.
    double expect = static_cast<double>(samples) / N;
    double sigma = std::sqrt(expect * (1.0 - 1.0 / N));
    for (auto& [label, c] : counts) {
        CHECK(label < N);
        CHECK(std::abs(c - expect) < 5.0 * sigma);
    }
    double chi2 = 0;
    for (auto& [label, c] : counts) chi2 += (c - expect) * (c - expect) / expect;
    CHECK(chi2 < 50.0);  // 15 dof, far tail
}

TEST_CASE("hadamard measurement statistics") {
    Rng rng(7);

    SUBCASE("label N/2, even secret: deterministic zero") {
        DcpInstance inst(16, 6, 1);
        auto pv = PhaseVector::single(8, 16);
        CHECK(inst.hadamard_zero_probability(pv) == doctest::Approx(1.0));
        for (int i = 0; i < 50; ++i) CHECK(inst.measure_hadamard(pv, rng) == 0);
    }
    SUBCASE("label N/2, odd secret: deterministic one") {
        DcpInstance inst(16, 7, 1);
        auto pv = PhaseVector::single(8, 16);
        CHECK(inst.hadamard_zero_probability(pv) == doctest::Approx(0.0));
        for (int i = 0; i < 50; ++i) CHECK(inst.measure_hadamard(pv, rng) == 1);
    }
    SUBCASE("N=8, k=1, s=2: P(0) = cos^2(pi/4) = 1/2, Monte Carlo") {
        DcpInstance inst(8, 2, 1);
        auto pv = PhaseVector::single(1, 8);
        CHECK(inst.hadamard_zero_probability(pv) == doctest::Approx(0.5));
        int zeros = 0;
        const int trials = 100000;
        for (int i = 0; i < trials; ++i) zeros += inst.measure_hadamard(pv, rng) == 0;
        double sigma = std::sqrt(trials * 0.25);
        CHECK(std::abs(zeros - trials / 2.0) < 5.0 * sigma);
    }
    SUBCASE("multi-label vectors are rejected") {
        DcpInstance inst(16, 3, 1);
        PhaseVector multi(16, {1, 2}, {0, 5});
        CHECK_THROWS_AS(inst.measure_hadamard(multi, rng), std::invalid_argument);
    }
}

TEST_CASE("phase vector invariants") {
    CHECK_THROWS(PhaseVector(8, {}, {}));
    CHECK_THROWS(PhaseVector(8, {9}, {0}));
    CHECK_THROWS(PhaseVector(8, {1, 2}, {0}));

    // Global phase normalization pins the first offset.
    PhaseVector pv(8, {1, 2, 3}, {5, 6, 2});
    CHECK(pv.offsets()[0] == 0);
    CHECK(pv.offsets()[1] == 1);
    CHECK(pv.offsets()[2] == 5);

    PhaseVector single = PhaseVector::single(3, 8);
    PhaseVector lifted = single.lift_to_list();
    CHECK(lifted.size() == 2);
    CHECK(lifted.labels()[0] == 0);
    CHECK(lifted.labels()[1] == 3);
    CHECK(lifted.collapse_to_single() == single);
}

TEST_CASE("cnot combination branches") {
    Rng rng(99);
    const uint64_t N = 16;

    SUBCASE("labels land on p-q and p+q, branch is fair") {
        auto p = PhaseVector::single(6, N);
        auto q = PhaseVector::single(2, N);
        int diff_branch = 0;
        const int trials = 10000;
        for (int i = 0; i < trials; ++i) {
            auto out = combine_pair_cnot(p, q, rng);
            if (out.branch == 0) {
                ++diff_branch;
                CHECK(out.vector.label() == 4);
            } else {
                CHECK(out.vector.label() == 8);
            }
        }
        double sigma = std::sqrt(trials * 0.25);
        CHECK(std::abs(diff_branch - trials / 2.0) < 5.0 * sigma);
    }
    SUBCASE("p = q gives label 0 on the difference branch") {
        auto p = PhaseVector::single(5, N);
        for (int i = 0; i < 50; ++i) {
            auto out = combine_pair_cnot(p, p, rng);
            if (out.branch == 0)
                CHECK(out.vector.label() == 0);
            else
                CHECK(out.vector.label() == 10);
        }
    }
    SUBCASE("multi-label inputs rejected") {
        PhaseVector multi(N, {1, 2}, {0, 0});
        CHECK_THROWS_AS(combine_pair_cnot(multi, multi, rng), std::invalid_argument);
    }
}
