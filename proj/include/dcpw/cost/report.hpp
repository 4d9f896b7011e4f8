#pragma once

#include <string>
#include <vector>

namespace dcpw {

// All entries are log2 exponents.
struct CostReport {
    double queries = 0.0;
    double classical_time = 0.0;
    double quantum_time = 0.0;
    double classical_space = 0.0;
    double quantum_space = 0.0;  // polynomial regimes report log2(n)
    std::vector<std::pair<std::string, double>> notes;
};

// Named constants of the cost analysis.
struct CostConstants {
    static constexpr double c_dcp = 2.0;
    static constexpr double c_css = 0.283;
    static constexpr double c_qss_qracm = 0.2356;
    static constexpr double c_qss_no_qracm = 0.4165;
    // Regev restart constant back-solved from the CSIDH table; a fit, not a
    // paper value.
    static constexpr double kappa_regev = 3.5;
};

}  // namespace dcpw
