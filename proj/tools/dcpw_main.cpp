// Command-line front end: simulation drivers, lemma verification, and cost
// estimation with CSV/JSON output.

#include <CLI11.hpp>

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "dcpw/cost/closed_forms.hpp"
#include "dcpw/cost/merging_tree.hpp"
#include "dcpw/dcp_solvers.hpp"
#include "dcpw/math_util.hpp"
#include "dcpw/phase_vector.hpp"
#include "dcpw/qss_model.hpp"
#include "dcpw/sieve.hpp"
#include "dcpw/subset_sum.hpp"

using json = nlohmann::ordered_json;
using namespace dcpw;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitBudget = 3;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// One row of output; values keep insertion order for stable CSV columns.
struct Row {
    std::vector<std::pair<std::string, std::string>> cells;
    void add(const std::string& key, const std::string& v) { cells.emplace_back(key, v); }
    void add(const std::string& key, double v) { add(key, format_double(v)); }
    void add(const std::string& key, uint64_t v) { add(key, std::to_string(v)); }
    void add(const std::string& key, int64_t v) { add(key, std::to_string(v)); }
};

struct OutputSink {
    std::string format = "csv";
    std::string path;

    void write(const std::vector<Row>& rows) const {
        std::ostringstream out;
        if (format == "json") {
            json arr = json::array();
            for (const auto& row : rows) {
                json obj = json::object();
                for (const auto& [k, v] : row.cells) obj[k] = v;
                arr.push_back(obj);
            }
            out << arr.dump(2) << "\n";
        } else {
            if (!rows.empty()) {
                for (size_t i = 0; i < rows[0].cells.size(); ++i)
                    out << (i ? "," : "") << rows[0].cells[i].first;
                out << "\n";
            }
            for (const auto& row : rows) {
                for (size_t i = 0; i < row.cells.size(); ++i)
                    out << (i ? "," : "") << row.cells[i].second;
                out << "\n";
            }
        }
        if (path.empty()) {
            std::cout << out.str();
        } else {
            std::ofstream f(path, std::ios::binary);
            f << out.str();
        }
    }
};

std::string default_output_dir() {
    const char* env = std::getenv("DCPW_OUTPUT_DIR");
    return env ? env : "";
}

std::string resolve_path(const std::string& p) {
    if (p.empty()) return p;
    std::string dir = default_output_dir();
    if (dir.empty() || p.find('/') != std::string::npos) return p;
    return dir + "/" + p;
}

// Runs `trials` seeded jobs, possibly in parallel; records are ordered by
// seed regardless of completion order.
template <typename Fn>
std::vector<Row> run_seeded(uint64_t seed, uint64_t trials, unsigned jobs, Fn&& fn) {
    std::vector<Row> rows(trials);
    if (jobs <= 1) {
        for (uint64_t i = 0; i < trials; ++i) rows[i] = fn(seed + i);
        return rows;
    }
    std::vector<std::thread> pool;
    std::mutex next_mutex;
    uint64_t next = 0;
    for (unsigned t = 0; t < jobs; ++t) {
        pool.emplace_back([&] {
            while (true) {
                uint64_t i;
                {
                    std::lock_guard<std::mutex> lock(next_mutex);
                    if (next >= trials) return;
                    i = next++;
                }
                rows[i] = fn(seed + i);
            }
        });
    }
    for (auto& th : pool) th.join();
    return rows;
}

struct SimulateConfig {
    std::string algorithm;
    uint64_t n = 0;
    uint64_t N = 0;  // overrides n when set
    uint64_t m = 0;
    uint64_t t = 0;
    double epsilon = 0.0;
    uint64_t trials = 10;
    uint64_t seed = 1;
    uint64_t samples = 0;
    unsigned jobs = 1;
    bool exact_final = true;
};

uint64_t group_order(const SimulateConfig& cfg) {
    if (cfg.N) return cfg.N;
    return uint64_t{1} << cfg.n;
}

int cmd_simulate(const SimulateConfig& cfg, OutputSink& sink) {
    const uint64_t N = group_order(cfg);
    std::mutex tally_mutex;
    uint64_t completed = 0;

    auto record = [&](uint64_t seed, std::optional<int64_t> recovered, bool success,
                      uint64_t queries, uint64_t restarts, bool counted) {
        Row row;
        row.add("seed", seed);
        row.add("recovered_s", recovered ? *recovered : int64_t(-1));
        row.add("success", uint64_t(success));
        row.add("queries", queries);
        row.add("restarts", restarts);
        std::lock_guard<std::mutex> lock(tally_mutex);
        if (counted) ++completed;
        return row;
    };

    auto rows = [&]() -> std::vector<Row> {
        if (cfg.algorithm == "ettinger-hoyer") {
            return run_seeded(cfg.seed, cfg.trials, cfg.jobs, [&](uint64_t seed) {
                DcpInstance inst(N, std::nullopt, seed);
                Rng rng(seed ^ 0x5eedULL);
                uint64_t samples = cfg.samples ? cfg.samples : 8 * inst.bit_length();
                auto res = ettinger_hoyer(inst, samples, rng);
                return record(seed, int64_t(res.s_hat), res.report.success,
                              res.report.queries_used, res.report.restarts, true);
            });
        }
        if (cfg.algorithm == "regev-lsb") {
            return run_seeded(cfg.seed, cfg.trials, cfg.jobs, [&](uint64_t seed) {
                DcpInstance inst(N, std::nullopt, seed);
                Rng rng(seed ^ 0x5eedULL);
                Rng solver_rng(seed ^ 0xf00dULL);
                ClassicalSolver solver = [&](const SubsetSumInstance& ss) {
                    return solve_classical_rep(ss, solver_rng);
                };
                auto res = regev_lsb(inst, solver, rng);
                int lsb = static_cast<int>(inst.secret_for_verification() & 1);
                return record(seed,
                              res.bit ? std::optional<int64_t>(*res.bit) : std::nullopt,
                              res.bit && *res.bit == lsb, res.report.queries_used,
                              res.report.restarts, !res.report.budget_exhausted);
            });
        }
        if (cfg.algorithm == "qss-solve") {
            return run_seeded(cfg.seed, cfg.trials, cfg.jobs, [&](uint64_t seed) {
                DcpInstance inst(N, std::nullopt, seed);
                Rng rng(seed ^ 0x5eedULL);
                QssSolveOptions opts;
                opts.epsilon = cfg.epsilon;
                opts.exact_final = cfg.exact_final;
                opts.model_seed = seed ^ 0xabcdULL;
                uint32_t m = cfg.m ? static_cast<uint32_t>(cfg.m)
                                   : static_cast<uint32_t>(inst.bit_length() - 1);
                RunReport rep = qss_dcp_solve(inst, m, opts, rng);
                return record(seed,
                              rep.recovered_s ? std::optional<int64_t>(*rep.recovered_s)
                                              : std::nullopt,
                              rep.success, rep.queries_used, rep.restarts,
                              !rep.budget_exhausted);
            });
        }
        if (cfg.algorithm == "interpolate") {
            return run_seeded(cfg.seed, cfg.trials, cfg.jobs, [&](uint64_t seed) {
                DcpInstance inst(N, std::nullopt, seed);
                Rng rng(seed ^ 0x5eedULL);
                InterpolationOptions opts;
                opts.epsilon = cfg.epsilon;
                opts.model_seed = seed ^ 0xabcdULL;
                SieveSchedule knobs;
                RunReport rep =
                    interpolation_solve(inst, static_cast<uint32_t>(cfg.t), knobs, opts, rng);
                return record(seed,
                              rep.recovered_s ? std::optional<int64_t>(*rep.recovered_s)
                                              : std::nullopt,
                              rep.success, rep.queries_used, rep.restarts,
                              !rep.budget_exhausted);
            });
        }
        if (cfg.algorithm == "kuperberg1") {
            return run_seeded(cfg.seed, cfg.trials, cfg.jobs, [&](uint64_t seed) {
                DcpInstance inst(N, std::nullopt, seed);
                Rng rng(seed ^ 0x5eedULL);
                auto res = kuperberg1_find_lsb(inst, rng);
                int lsb = static_cast<int>(inst.secret_for_verification() & 1);
                return record(seed,
                              res.lsb ? std::optional<int64_t>(*res.lsb) : std::nullopt,
                              res.lsb && *res.lsb == lsb, res.queries,
                              uint64_t(res.pool_exhausted), !res.pool_exhausted);
            });
        }
        if (cfg.algorithm == "sieve") {
            return run_seeded(cfg.seed, cfg.trials, cfg.jobs, [&](uint64_t seed) {
                DcpInstance inst(N, std::nullopt, seed);
                Rng rng(seed ^ 0x5eedULL);
                SieveSchedule sched;
                auto res = sieve_collimate_full(inst, sched, rng);
                bool ok = res.vector && res.vector->label() == 1;
                return record(seed, ok ? std::optional<int64_t>(1) : std::nullopt, ok,
                              res.stats.queries, res.stats.rebuilds, bool(res.vector));
            });
        }
        throw CLI::ValidationError("unknown simulate algorithm: " + cfg.algorithm);
    }();

    // Summary: means plus a normal-approximation 95% binomial interval.
    uint64_t successes = 0;
    double mean_queries = 0, mean_restarts = 0;
    for (auto& row : rows) {
        successes += row.cells[2].second == "1";
        mean_queries += std::stod(row.cells[3].second);
        mean_restarts += std::stod(row.cells[4].second);
    }
    double n_tr = static_cast<double>(cfg.trials);
    double p = successes / n_tr;
    double half = 1.96 * std::sqrt(std::max(p * (1 - p), 1e-12) / n_tr);
    for (auto& row : rows) {
        row.add("success_ci_low", std::string(""));
        row.add("success_ci_high", std::string(""));
    }
    Row summary;
    summary.add("seed", std::string("summary"));
    summary.add("recovered_s", std::string(""));
    summary.add("success", p);
    summary.add("queries", mean_queries / n_tr);
    summary.add("restarts", mean_restarts / n_tr);
    summary.add("success_ci_low", std::max(0.0, p - half));
    summary.add("success_ci_high", std::min(1.0, p + half));
    rows.push_back(summary);
    sink.write(rows);
    return completed > 0 || cfg.trials == 0 ? kExitOk : kExitBudget;
}

struct VerifyConfig {
    std::string lemma;
    uint64_t n = 10;
    uint64_t m = 0;
    double epsilon = 0.0;
    uint64_t trials = 1000;
    uint64_t seed = 1;
    double alpha = 1.414213562;
};

int cmd_verify(const VerifyConfig& cfg, OutputSink& sink) {
    std::vector<Row> rows;
    bool pass = true;
    Rng rng(cfg.seed);
    uint32_t m = cfg.m ? static_cast<uint32_t>(cfg.m) : static_cast<uint32_t>(cfg.n - 1);

    if (cfg.lemma == "EZ") {
        auto rep = verify_lemma_ez(cfg.n, m, cfg.trials, rng);
        double z = std::abs(rep.empirical_mean - rep.analytic) / std::max(rep.std_error, 1e-12);
        pass = z <= 3.0;
        Row row;
        row.add("lemma", std::string("EZ"));
        row.add("analytic", rep.analytic);
        row.add("empirical", rep.empirical_mean);
        row.add("sigma", rep.std_error);
        row.add("z", z);
        row.add("pass", uint64_t(pass));
        rows.push_back(row);
    } else if (cfg.lemma == "Gbound") {
        auto rep = verify_lemma_g_bound(cfg.n, m, cfg.epsilon, cfg.trials, rng);
        pass = rep.violations == 0 && rep.mean_g >= rep.lemma5_bound - 3.0 * rep.std_error;
        Row row;
        row.add("lemma", std::string("Gbound"));
        row.add("analytic", rep.lemma5_bound);
        row.add("empirical", rep.mean_g);
        row.add("sigma", rep.std_error);
        row.add("violations", rep.violations);
        row.add("pass", uint64_t(pass));
        rows.push_back(row);
    } else if (cfg.lemma == "success-prob") {
        // Pr[j = s] = G/N per attempt reaching the final measurement.
        const uint64_t N = uint64_t{1} << cfg.n;
        double expected = 0.0, var = 0.0;
        uint64_t hits = 0, measured = 0;
        for (uint64_t i = 0; i < cfg.trials; ++i) {
            DcpInstance inst(N, std::nullopt, cfg.seed + i);
            Rng run_rng(cfg.seed * 7919 + i);
            QssSolveOptions opts;
            opts.epsilon = cfg.epsilon;
            opts.model_seed = cfg.seed ^ (i << 20);
            opts.attempt_budget = 1;
            RunReport rep = qss_dcp_solve(inst, m, opts, run_rng);
            if (rep.final_measurements == 0) continue;
            ++measured;
            double gn = rep.wall_stats["g_over_n_sum"];
            expected += gn;
            var += gn * (1.0 - gn);
            if (rep.wall_stats.count("j_equals_s"))
                hits += uint64_t(rep.wall_stats["j_equals_s"]);
        }
        double sigma = std::sqrt(std::max(var, 1e-12));
        double z = std::abs(static_cast<double>(hits) - expected) / sigma;
        pass = z <= 3.0;
        Row row;
        row.add("lemma", std::string("success-prob"));
        row.add("analytic", expected);
        row.add("empirical", static_cast<double>(hits));
        row.add("sigma", sigma);
        row.add("measured_attempts", measured);
        row.add("pass", uint64_t(pass));
        rows.push_back(row);
    } else if (cfg.lemma == "sum-lemma") {
        auto chk = sum_lemma_check(cfg.alpha, cfg.n);
        pass = chk.lhs <= chk.rhs + 1e-9;
        Row row;
        row.add("lemma", std::string("sum-lemma"));
        row.add("analytic", chk.rhs);
        row.add("empirical", chk.lhs);
        row.add("sigma", 0.0);
        row.add("pass", uint64_t(pass));
        rows.push_back(row);
    } else if (cfg.lemma == "pf-exact") {
        // PF formula vs brute-force pair counting over every valid weight pair.
        uint64_t checked = 0, bad = 0;
        for (uint32_t mm = 2; mm <= 12; ++mm) {
            for (uint32_t w1 = 0; w1 <= mm; ++w1) {
                for (uint32_t w2 = 0; w1 + w2 <= mm; ++w2) {
                    double pf =
                        filtering_probability(double(w1) / mm, double(w2) / mm, mm).exact;
                    uint64_t disjoint = 0, total = 0;
                    for (uint32_t a = 0; a < (1u << mm); ++a) {
                        if (popcount32(a) != int(w1)) continue;
                        for (uint32_t b = 0; b < (1u << mm); ++b) {
                            if (popcount32(b) != int(w2)) continue;
                            ++total;
                            if ((a & b) == 0) ++disjoint;
                        }
                    }
                    double exact = total ? double(disjoint) / double(total) : 1.0;
                    ++checked;
                    if (std::abs(pf - exact) > 1e-9) ++bad;
                }
            }
        }
        pass = bad == 0;
        Row row;
        row.add("lemma", std::string("pf-exact"));
        row.add("analytic", static_cast<double>(checked));
        row.add("empirical", static_cast<double>(checked - bad));
        row.add("sigma", 0.0);
        row.add("pass", uint64_t(pass));
        rows.push_back(row);
    } else {
        throw CLI::ValidationError("unknown lemma: " + cfg.lemma);
    }
    sink.write(rows);
    return pass ? kExitOk : kExitVerifyFailed;
}

struct EstimateConfig {
    std::string what;
    uint64_t n = 256;
    uint64_t t = 0;
    uint64_t m = 255;
    std::string shape = "qracm";
    double root = 2.0;
    bool rounded = false;
    uint64_t m_lo = 128, m_hi = 1024, step = 32;
    double c_qss = CostConstants::c_qss_qracm;
};

int cmd_estimate(const EstimateConfig& cfg, OutputSink& sink) {
    std::vector<Row> rows;
    auto fmt_exp = [&](double v) {
        return cfg.rounded ? format_double(std::ceil(v - 1e-9)) : format_double(v);
    };

    if (cfg.what == "table1") {
        for (auto alg : {Algorithm::kuperberg2, Algorithm::regev, Algorithm::ettinger_hoyer,
                         Algorithm::alg4_qracm, Algorithm::alg4_no_qracm}) {
            CostReport r = table_row(alg, cfg.n);
            Row row;
            row.add("algorithm", algorithm_name(alg));
            row.add("n", cfg.n);
            row.add("queries", fmt_exp(r.queries));
            row.add("classical_time", fmt_exp(r.classical_time));
            row.add("quantum_time", fmt_exp(r.quantum_time));
            row.add("classical_space", fmt_exp(r.classical_space));
            row.add("quantum_space", fmt_exp(r.quantum_space));
            rows.push_back(row);
        }
    } else if (cfg.what == "table2") {
        for (uint64_t n : {256, 512, 896, 1536, 2048}) {
            for (auto alg : {Algorithm::regev, Algorithm::alg4_qracm}) {
                CostReport r = table_row(alg, n);
                Row row;
                row.add("csidh", std::string("CSIDH-") + std::to_string(2 * n));
                row.add("n", n);
                row.add("algorithm", algorithm_name(alg));
                row.add("queries", fmt_exp(r.queries));
                row.add("classical_time", fmt_exp(r.classical_time));
                row.add("quantum_time", fmt_exp(r.quantum_time));
                row.add("classical_space", fmt_exp(r.classical_space));
                rows.push_back(row);
            }
        }
    } else if (cfg.what == "interpolation") {
        auto emit = [&](uint64_t t) {
            CostReport r = interpolation_cost(cfg.n, t, CostConstants::c_dcp, cfg.c_qss);
            Row row;
            row.add("n", cfg.n);
            row.add("t", t);
            row.add("queries", fmt_exp(r.queries));
            row.add("quantum_time", fmt_exp(r.quantum_time));
            row.add("classical_space", fmt_exp(r.classical_space));
            rows.push_back(row);
        };
        if (cfg.t) {
            emit(cfg.t);
        } else {
            for (uint64_t t = 1; t <= cfg.n - 1; t += std::max<uint64_t>(1, (cfg.n - 2) / 64))
                emit(t);
        }
    } else if (cfg.what == "tree") {
        TreeShape shape = shape_from_string(cfg.shape);
        ExactOptimum opt = optimize_tree_exact(static_cast<uint32_t>(cfg.m), shape, cfg.root);
        json out;
        out["m"] = cfg.m;
        out["shape"] = shape_name(shape);
        out["root_size_log2"] = cfg.root;
        out["continuous_max_step"] = opt.continuous_time;
        out["rounded_max_step"] = opt.rounded.time;
        out["rounded_total"] = opt.rounded.total;
        out["stored_side_total"] = opt.rounded.stored_build;
        out["sample_cost"] = opt.rounded.sample_cost;
        out["memory"] = opt.rounded.memory;
        out["root_size"] = opt.rounded.root_size;
        out["log2_pm"] = opt.log2_pm;
        out["total_with_pm"] = opt.total_with_pm;
        out["converged"] = opt.converged;
        json params = json::object();
        for (auto& [k, v] : opt.rounded_params) params[k] = v;
        out["params"] = params;
        json nodes = json::array();
        for (auto& node : opt.rounded.nodes) {
            nodes.push_back({{"name", node.name},
                             {"ell", node.ell},
                             {"weight", node.alpha},
                             {"condition", node.cond},
                             {"support", node.support},
                             {"stored", node.stored}});
        }
        out["nodes"] = nodes;
        json steps = json::array();
        for (auto& [name, cost] : opt.rounded.steps)
            if (name != "constraint_penalty")
                steps.push_back({{"step", name}, {"log2_cost", cost}});
        out["steps"] = steps;
        if (sink.path.empty())
            std::cout << out.dump(2) << "\n";
        else
            std::ofstream(sink.path, std::ios::binary) << out.dump(2) << "\n";
        return kExitOk;
    } else if (cfg.what == "asymptotic") {
        TreeShape shape = shape_from_string(cfg.shape);
        AsymptoticOptimum opt = optimize_tree_asymptotic(shape);
        Row row;
        row.add("shape", shape_name(shape));
        row.add("time_exponent", opt.time_exponent);
        row.add("memory_exponent", opt.memory_exponent);
        row.add("max_violation", opt.max_violation);
        row.add("converged", uint64_t(opt.converged));
        rows.push_back(row);
    } else if (cfg.what == "fit") {
        TreeShape shape = shape_from_string(cfg.shape);
        CostFit fit = fit_cost_line(shape, static_cast<uint32_t>(cfg.m_lo),
                                    static_cast<uint32_t>(cfg.m_hi),
                                    static_cast<uint32_t>(cfg.step));
        Row row;
        row.add("shape", shape_name(shape));
        row.add("slope", fit.slope);
        row.add("intercept", fit.intercept);
        row.add("grover_crossover", grover_crossover(fit));
        rows.push_back(row);
    } else if (cfg.what == "sieve-cost") {
        CostReport simple = sieve_cost_simple(cfg.n);
        CostReport precise = sieve_cost_precise(cfg.n);
        Row r1;
        r1.add("model", std::string("simple"));
        r1.add("n", cfg.n);
        r1.add("queries", simple.queries);
        r1.add("quantum_time", simple.quantum_time);
        rows.push_back(r1);
        Row r2;
        r2.add("model", std::string("precise"));
        r2.add("n", cfg.n);
        r2.add("queries", precise.queries);
        r2.add("quantum_time", precise.quantum_time);
        rows.push_back(r2);
    } else {
        throw CLI::ValidationError("unknown estimate target: " + cfg.what);
    }
    sink.write(rows);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dihedral coset problem workbench"};
    app.require_subcommand(1);

    SimulateConfig sim;
    OutputSink sim_sink;
    auto* simulate = app.add_subcommand("simulate", "Run seeded algorithm simulations");
    simulate->add_option("algorithm", sim.algorithm,
                         "ettinger-hoyer|regev-lsb|qss-solve|interpolate|kuperberg1|sieve")
        ->required();
    simulate->add_option("--n", sim.n, "group bit length (N = 2^n)");
    simulate->add_option("--N", sim.N, "explicit group order");
    simulate->add_option("--m", sim.m, "phase-vector count");
    simulate->add_option("--t", sim.t, "interpolation threshold");
    simulate->add_option("--epsilon", sim.epsilon, "solver failure rate");
    simulate->add_option("--trials", sim.trials, "number of seeded runs");
    simulate->add_option("--seed", sim.seed, "base seed");
    simulate->add_option("--samples", sim.samples, "samples for ettinger-hoyer");
    simulate->add_option("--jobs", sim.jobs, "parallel jobs");
    simulate->add_flag("--approx-final", [&sim](int64_t) { sim.exact_final = false; },
                       "use the accept-reject final sampler");
    simulate->add_option("--format", sim_sink.format, "csv|json");
    simulate->add_option("--output", sim_sink.path, "output file (default stdout)");

    VerifyConfig ver;
    OutputSink ver_sink;
    auto* verify = app.add_subcommand("verify", "Verify the probability lemmas");
    verify->add_option("lemma", ver.lemma, "EZ|Gbound|success-prob|sum-lemma|pf-exact")
        ->required();
    verify->add_option("--n", ver.n, "group bit length");
    verify->add_option("--m", ver.m, "dimension (default n-1)");
    verify->add_option("--epsilon", ver.epsilon, "solver failure rate");
    verify->add_option("--trials", ver.trials, "trials");
    verify->add_option("--seed", ver.seed, "base seed");
    verify->add_option("--alpha", ver.alpha, "alpha for sum-lemma");
    verify->add_option("--format", ver_sink.format, "csv|json");
    verify->add_option("--output", ver_sink.path, "output file");

    EstimateConfig est;
    OutputSink est_sink;
    auto* estimate = app.add_subcommand("estimate", "Cost models and optimizers");
    estimate
        ->add_option("what", est.what,
                     "table1|table2|interpolation|tree|asymptotic|fit|sieve-cost")
        ->required();
    estimate->add_option("--n", est.n, "bit length");
    estimate->add_option("--t", est.t, "interpolation threshold");
    estimate->add_option("--m", est.m, "subset-sum dimension");
    estimate->add_option("--shape", est.shape, "qracm|no-qracm");
    estimate->add_option("--root", est.root, "root list size (log2)");
    estimate->add_flag("--rounded", est.rounded, "round exponents up for table views");
    estimate->add_option("--m-lo", est.m_lo, "fit range start");
    estimate->add_option("--m-hi", est.m_hi, "fit range end");
    estimate->add_option("--step", est.step, "fit range step");
    estimate->add_option("--c-qss", est.c_qss, "subset-sum exponent for interpolation");
    estimate->add_option("--format", est_sink.format, "csv|json");
    estimate->add_option("--output", est_sink.path, "output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (simulate->parsed()) {
            if (!sim.n && !sim.N) throw CLI::ValidationError("--n or --N is required");
            if (sim.algorithm == "interpolate" && !sim.t)
                throw CLI::ValidationError("--t is required for interpolate");
            sim_sink.path = resolve_path(sim_sink.path);
            return cmd_simulate(sim, sim_sink);
        }
        if (verify->parsed()) {
            ver_sink.path = resolve_path(ver_sink.path);
            return cmd_verify(ver, ver_sink);
        }
        if (estimate->parsed()) {
            est_sink.path = resolve_path(est_sink.path);
            return cmd_estimate(est, est_sink);
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBudget;
    }
    return kExitConfig;
}
