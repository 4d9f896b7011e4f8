#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "dcpw/math_util.hpp"
#include "dcpw/sieve.hpp"

using namespace dcpw;

namespace {

PhaseVector random_list(uint64_t N, uint32_t a, size_t len, Rng& rng) {
    std::vector<uint64_t> labels(len), offsets(len, 0);
    for (auto& k : labels) k = rng.uniform(uint64_t{1} << a);
    return PhaseVector(N, labels, offsets);
}

}  // namespace

TEST_CASE("collimate on single pairs and label bounds") {
    Rng rng(5);
    const uint64_t N = 1 << 16;

    SUBCASE("l = l' = 1 reduces the single sum") {
        PhaseVector a(N, {711}, {0});
        PhaseVector b(N, {302}, {0});
        PhaseVector out = collimate(a, b, {10, 3}, rng);
        REQUIRE(out.size() == 1);
        CHECK(out.labels()[0] == (711 + 302) % (1 << 7));
    }
    SUBCASE("output labels always below 2^(a-r)") {
        for (int trial = 0; trial < 200; ++trial) {
            PhaseVector v1 = random_list(N, 12, 8, rng);
            PhaseVector v2 = random_list(N, 12, 8, rng);
            PhaseVector out = collimate(v1, v2, {12, 4}, rng);
            for (uint64_t k : out.labels()) CHECK(k < (uint64_t{1} << 8));
        }
    }
    SUBCASE("bound violations are rejected") {
        PhaseVector big(N, {uint64_t{1} << 13}, {0});
        CHECK_THROWS_AS(collimate(big, big, {12, 4}, rng), std::invalid_argument);
    }
    SUBCASE("works for non-power-of-two group orders") {
        const uint64_t M = 1000;
        PhaseVector v1(M, {900, 123, 47}, {0, 0, 0});
        PhaseVector v2(M, {513, 700, 2}, {0, 0, 0});
        PhaseVector out = collimate(v1, v2, {10, 3}, rng);
        for (uint64_t k : out.labels()) CHECK(k < (uint64_t{1} << 7));
    }
}

TEST_CASE("collimate pair set matches a brute-force recomputation") {
    Rng rng(17);
    const uint64_t N = 1 << 12;
    for (int trial = 0; trial < 100; ++trial) {
        PhaseVector v1 = random_list(N, 9, 6, rng);
        PhaseVector v2 = random_list(N, 9, 7, rng);
        PhaseVector out = collimate(v1, v2, {9, 3}, rng);
        // The output must equal the full pair multiset of one V value.
        std::multiset<uint64_t> got(out.labels().begin(), out.labels().end());
        bool matched = false;
        for (uint64_t V = 0; V < (1 << 4) && !matched; ++V) {
            std::multiset<uint64_t> expect;
            for (uint64_t ka : v1.labels())
                for (uint64_t kb : v2.labels())
                    if (((ka + kb) >> 6) == V) expect.insert((ka + kb) - (V << 6));
            if (!expect.empty() && expect == got) matched = true;
        }
        CHECK(matched);
    }
}

TEST_CASE("collimate V statistics follow the pair counts") {
    Rng rng(23);
    const uint64_t N = 1 << 10;
    PhaseVector v1 = random_list(N, 8, 5, rng);
    PhaseVector v2 = random_list(N, 8, 5, rng);
    std::map<uint64_t, int> pair_count;  // V -> #pairs
    for (uint64_t ka : v1.labels())
        for (uint64_t kb : v2.labels()) pair_count[(ka + kb) >> 5]++;
    const int trials = 20000;
    std::map<uint64_t, int> seen;  // output size -> count
    for (int t = 0; t < trials; ++t) seen[collimate(v1, v2, {8, 3}, rng).size()]++;
    std::map<uint64_t, double> expect;  // size -> expected count (sizes may repeat across V)
    for (auto& [V, c] : pair_count)
        expect[c] += static_cast<double>(c) / (v1.size() * v2.size()) * trials;
    double chi2 = 0;
    for (auto& [size, c] : seen) {
        REQUIRE(expect.count(size));
        chi2 += (c - expect[size]) * (c - expect[size]) / expect[size];
    }
    CHECK(chi2 < 4.0 * static_cast<double>(expect.size()) + 30.0);
}

TEST_CASE("collimation merge sizes show the sub-1 adjusting factor") {
    Rng rng(31);
    const uint64_t N = 1 << 20;
    const uint32_t i = 6, a = 18, r = i - 1;
    const size_t len = size_t{1} << i;
    const double naive = std::exp2(double(i) + 1.0);  // l l' / 2^r
    std::vector<double> sizes;
    for (int t = 0; t < 1000; ++t) {
        PhaseVector v1 = random_list(N, a, len, rng);
        PhaseVector v2 = random_list(N, a, len, rng);
        sizes.push_back(static_cast<double>(collimate(v1, v2, {a, r, 1 << 14}, rng).size()));
    }
    std::sort(sizes.begin(), sizes.end());
    double mean = 0;
    for (double s : sizes) mean += s / static_cast<double>(sizes.size());
    double median = sizes[sizes.size() / 2];

    double adjusted = std::sqrt(3.0 / (2.0 * std::numbers::pi)) * naive;
    CHECK(mean > 0.8 * adjusted);
    CHECK(mean < 1.2 * adjusted);
    double mean_ratio = mean / naive;
    double median_ratio = median / naive;
    CHECK(mean_ratio >= 0.5);
    CHECK(mean_ratio <= 1.0);
    CHECK(median_ratio >= 0.5);
    CHECK(median_ratio <= 1.0);
    MESSAGE("adjusting factors: mean ", mean_ratio, " median ", median_ratio);
}

TEST_CASE("kuperberg1 recovers the least significant bit") {
    SUBCASE("N = 2^10: at least 90 of 100 runs") {
        int correct = 0, exhausted = 0;
        for (int run = 0; run < 100; ++run) {
            DcpInstance inst(1 << 10, std::nullopt, 4000 + run);
            Rng rng(900 + run);
            auto res = kuperberg1_find_lsb(inst, rng);
            if (res.pool_exhausted) {
                ++exhausted;
                continue;
            }
            if (*res.lsb == int(inst.secret_for_verification() & 1)) ++correct;
        }
        CHECK(correct >= 90);
        MESSAGE("correct ", correct, " exhausted ", exhausted);
    }
    SUBCASE("s = 0 always measures 0") {
        int zeros = 0;
        for (int run = 0; run < 100; ++run) {
            DcpInstance inst(1 << 4, 0, 100 + run);
            Rng rng(run);
            auto res = kuperberg1_find_lsb(inst, rng);
            if (res.lsb && *res.lsb == 0) ++zeros;
        }
        CHECK(zeros == 100);
    }
    SUBCASE("non-power-of-two order rejected") {
        DcpInstance inst(100, std::nullopt, 1);
        Rng rng(1);
        CHECK_THROWS_AS(kuperberg1_find_lsb(inst, rng), std::invalid_argument);
    }
}

TEST_CASE("regev combination") {
    Rng rng(77);
    const uint64_t N = 1 << 12;

    SUBCASE("degenerate all-zero labels") {
        std::vector<PhaseVector> pvs(4, PhaseVector::single(0, N));
        auto out = regev_combine(pvs, 1, rng);
        REQUIRE(out.has_value());
        CHECK(out->labels()[0] == 0);
        CHECK(out->labels()[1] == 0);
    }
    SUBCASE("difference bounded by B, failure rate in band") {
        const uint64_t B = 1 << 6;
        const uint32_t m = static_cast<uint32_t>(ceil_log2(N / B)) + 1;
        int failures = 0;
        const int trials = 10000;
        DcpInstance inst(N, std::nullopt, 99);
        for (int t = 0; t < trials; ++t) {
            std::vector<PhaseVector> pvs;
            for (uint32_t i = 0; i < m; ++i) pvs.push_back(inst.sample_phase_vector());
            auto out = regev_combine(pvs, B, rng);
            if (!out) {
                ++failures;
                continue;
            }
            uint64_t d = (out->labels()[1] + N - out->labels()[0]) % N;
            uint64_t mag = std::min(d, N - d);
            CHECK(mag <= B);
        }
        double rate = failures / double(trials);
        CHECK(rate >= 0.1);
        CHECK(rate <= 0.6);
        MESSAGE("regev_combine failure rate ", rate);
    }
}

TEST_CASE("full interval sieve reaches label 1") {
    int ok = 0;
    double queries = 0;
    for (int run = 0; run < 30; ++run) {
        DcpInstance inst(1 << 16, std::nullopt, 7000 + run);
        Rng rng(800 + run);
        SieveSchedule sched;
        auto res = sieve_collimate_full(inst, sched, rng);
        if (res.vector && res.vector->label() == 1) {
            ++ok;
            queries += static_cast<double>(res.stats.queries);
        }
    }
    CHECK(ok >= 27);
    double per_run = queries / ok;
    double target = std::exp2(std::sqrt(32.0));
    CHECK(per_run <= 4.0 * target);
    CHECK(per_run >= target / 4.0);
}

TEST_CASE("partially collimated production") {
    SUBCASE("bits = 0 returns a fresh sample") {
        DcpInstance inst(1 << 10, std::nullopt, 3);
        Rng rng(3);
        SieveSchedule knobs;
        auto res = sieve_to_partial(inst, 0, knobs, rng);
        CHECK(res.vector.is_single());
        CHECK(res.stats.queries == 1);
        CHECK(inst.query_count() == 1);
    }
    SUBCASE("one collimated bit gives an equal-parity pair") {
        int ok = 0;
        for (int run = 0; run < 100; ++run) {
            DcpInstance inst(1 << 8, std::nullopt, 600 + run);
            Rng rng(run);
            SieveSchedule knobs;
            auto res = sieve_to_partial(inst, 1, knobs, rng, 0);
            REQUIRE(res.vector.size() == 2);
            uint64_t a = res.vector.labels()[0], b = res.vector.labels()[1];
            if ((a & 1) == (b & 1) && a != b) ++ok;
        }
        CHECK(ok >= 99);
    }
    SUBCASE("prescribed residue with trailing zeros") {
        for (int run = 0; run < 50; ++run) {
            DcpInstance inst(1 << 10, std::nullopt, 1700 + run);
            Rng rng(run);
            SieveSchedule knobs;
            auto res = sieve_to_partial(inst, 3, knobs, rng, 4);  // diff = 4 mod 8
            uint64_t diff = res.vector.collapse_to_single().label();
            CHECK(diff % 8 == 4);
        }
    }
    SUBCASE("query scaling at full collimation depth") {
        double queries = 0;
        const int runs = 50;
        for (int run = 0; run < runs; ++run) {
            DcpInstance inst(uint64_t{1} << 24, std::nullopt, 2200 + run);
            Rng rng(run);
            SieveSchedule knobs;
            auto res = sieve_to_partial(inst, 24, knobs, rng, 0);
            queries += static_cast<double>(res.stats.queries);
        }
        double per_run = queries / runs;
        double target = std::exp2(std::sqrt(48.0));
        CHECK(per_run <= 4.0 * target);
        CHECK(per_run >= target / 4.0);
        MESSAGE("partial sieve queries/run ", per_run, " vs 2^sqrt(2n) ", target);
    }
}

TEST_CASE("configuration matrix") {
    SUBCASE("t = m keeps fresh samples") {
        DcpInstance inst(1 << 10, std::nullopt, 11);
        Rng rng(11);
        SieveSchedule knobs;
        ConfigMatrix cfg = build_config_matrix(inst, 6, 6, knobs, rng);
        CHECK(cfg.stats.queries == 6);
        CHECK(inst.query_count() == 6);
        CHECK(cfg.triangular_invariant_holds());
    }
    SUBCASE("triangular invariant bit-for-bit") {
        for (uint32_t t : {1u, 3u, 7u}) {
            DcpInstance inst(1 << 10, std::nullopt, 500 + t);
            Rng rng(t);
            SieveSchedule knobs;
            ConfigMatrix cfg = build_config_matrix(inst, 9, t, knobs, rng);
            REQUIRE(cfg.labels.size() == 9);
            CHECK(cfg.triangular_invariant_holds());
            auto bits = cfg.bit_matrix();
            for (uint32_t i = 1; i <= 9; ++i) {
                if (i <= 9 - t) {
                    CHECK(bits[i - 1][i - 1] == 1);
                    for (uint32_t j = 0; j + 1 < i; ++j) CHECK(bits[i - 1][j] == 0);
                } else if (9 > t) {
                    for (uint32_t j = 0; j < 9 - t; ++j) CHECK(bits[i - 1][j] == 0);
                }
            }
        }
    }
    SUBCASE("t = 1 rows carry scaled power-of-two patterns") {
        DcpInstance inst(1 << 10, std::nullopt, 77);
        Rng rng(77);
        SieveSchedule knobs;
        ConfigMatrix cfg = build_config_matrix(inst, 9, 1, knobs, rng);
        for (uint32_t i = 1; i <= 8; ++i)
            CHECK(cfg.labels[i - 1] % (uint64_t{1} << i) == (uint64_t{1} << (i - 1)));
    }
}
