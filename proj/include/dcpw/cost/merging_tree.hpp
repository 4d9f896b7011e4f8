#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dcpw/cost/report.hpp"

namespace dcpw {

// The tree shape is fixed (the unbalanced depth-3 layout with a Grover-
// explored left branch); only its parameters are optimized. `qracm` keeps
// the extra left-left support split and unit-cost lookups; `no_qracm`
// samples the left level-2 list directly and pays sequential-access costs.
enum class TreeShape { qracm, no_qracm };
TreeShape shape_from_string(const std::string& name);
std::string shape_name(TreeShape shape);

// One node of the merging tree: list-size exponent, weight, modular
// condition. Asymptotic mode expresses everything relative to m; exact mode
// uses absolute weights, support sizes and condition bits.
struct TreeNodeParams {
    std::string name;
    double ell = 0.0;
    double alpha = 0.0;   // weight (relative or absolute)
    double cond = 0.0;    // modular condition (fraction of m, or bits)
    double support = 0.0; // support size (fraction of m, or positions)
    bool stored = false;  // stored lists vs Grover-sampled search spaces
};

struct TreeEvaluation {
    double time = 0.0;           // max over steps
    double total = 0.0;          // log-sum-exp over steps
    double memory = 0.0;         // max stored list
    double sample_cost = 0.0;    // tau(L0), the left-branch sampling cost
    double stored_build = 0.0;   // log-sum of the stored-side build steps
    double root_size = 0.0;      // log2 E|L0|
    double max_violation = 0.0;  // largest constraint residual
    std::vector<TreeNodeParams> nodes;
    std::vector<std::pair<std::string, double>> steps;
};

struct TreeCostModel {
    bool quantum_stored_builds = true;  // fill stored lists by quantum sampling
    bool grover_constant = false;       // add log2(pi/2) per Grover stage
    bool leaf_saturation = true;        // bound leaf samples by their distribution
};

// Evaluates the asymptotic (per-m) tree for an explicit full parameter
// vector; used by the optimizer and exposed for tests.
//   qracm:    x = {aR, aM, b1, r, c12, c02, c1, b0}
//   no_qracm: x = {aR, aM, c12, c02, c1, a02}
TreeEvaluation evaluate_asymptotic(TreeShape shape, const std::vector<double>& x,
                                   const TreeCostModel& model = {});

// Exact (absolute) evaluation at dimension m, modulus 2^(m+1). Leaf list
// sizes are free parameters: leaves are sampled from their distributions,
// not enumerated, so their sizes are not pinned to the binomial count.
//   qracm:    x = {wR, wM, w1, sigma, c12, c02, c1, w0, lR3, lM3, l13, l03}
//   no_qracm: x = {wR, wM, c12, c02, c1, w02, lR3, lM3}
TreeEvaluation evaluate_exact(TreeShape shape, uint32_t m, const std::vector<double>& x,
                              const TreeCostModel& model = {});

struct AsymptoticOptimum {
    TreeShape shape = TreeShape::qracm;
    double time_exponent = 0.0;
    double memory_exponent = 0.0;
    double max_violation = 0.0;
    bool converged = false;
    TreeEvaluation evaluation;
    std::vector<double> params;
};
AsymptoticOptimum optimize_tree_asymptotic(TreeShape shape, const TreeCostModel& model = {});

struct ExactOptimum {
    TreeShape shape = TreeShape::qracm;
    uint32_t m = 0;
    double root_size_log2 = 0.0;
    double continuous_time = 0.0;     // max step before rounding
    std::vector<double> continuous_params;
    TreeEvaluation rounded;           // integer weights/conditions
    std::map<std::string, double> rounded_params;
    double log2_pm = 0.0;             // log2 p_m
    double total_with_pm = 0.0;       // rounded total + log2(1/p_m)
    double max_violation = 0.0;
    bool converged = false;
};
ExactOptimum optimize_tree_exact(uint32_t m, TreeShape shape, double root_size_log2,
                                 const TreeCostModel& model = {},
                                 const std::vector<double>* warm_start = nullptr);

struct CostFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::vector<std::pair<uint32_t, double>> points;  // (m, total log2 cost)
};
CostFit fit_cost_line(TreeShape shape, uint32_t m_lo, uint32_t m_hi, uint32_t step = 32,
                      double root_size_log2 = 1.0, const TreeCostModel& model = {});

// Solves slope*m + intercept = m/2.
double grover_crossover(const CostFit& fit);

}  // namespace dcpw
