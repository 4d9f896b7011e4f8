#pragma once

#include <functional>
#include <vector>

namespace dcpw {

struct NelderMeadOptions {
    size_t max_iterations = 4000;
    double f_tolerance = 1e-13;
    double initial_step = 0.02;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    size_t iterations = 0;
};

// Standard downhill simplex (reflection/expansion/contraction/shrink).
// Deterministic for a given start.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> start, const NelderMeadOptions& opts = {});

}  // namespace dcpw
