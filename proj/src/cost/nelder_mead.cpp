#include "dcpw/cost/nelder_mead.hpp"

#include <algorithm>
#include <cmath>

namespace dcpw {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> start, const NelderMeadOptions& opts) {
    const size_t n = start.size();
    std::vector<std::vector<double>> simplex(n + 1, start);
    std::vector<double> values(n + 1);
    for (size_t i = 0; i < n; ++i) {
        double step = opts.initial_step * std::max(1.0, std::abs(start[i]));
        simplex[i + 1][i] += step;
    }
    for (size_t i = 0; i <= n; ++i) values[i] = f(simplex[i]);

    auto order = [&] {
        std::vector<size_t> idx(n + 1);
        for (size_t i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return values[a] < values[b]; });
        std::vector<std::vector<double>> sx(n + 1);
        std::vector<double> sv(n + 1);
        for (size_t i = 0; i <= n; ++i) {
            sx[i] = simplex[idx[i]];
            sv[i] = values[idx[i]];
        }
        simplex = std::move(sx);
        values = std::move(sv);
    };

    NelderMeadResult result;
    size_t iter = 0;
    for (; iter < opts.max_iterations; ++iter) {
        order();
        if (std::abs(values[n] - values[0]) < opts.f_tolerance) break;

        std::vector<double> centroid(n, 0.0);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / static_cast<double>(n);

        auto point = [&](double coef) {
            std::vector<double> p(n);
            for (size_t j = 0; j < n; ++j) p[j] = centroid[j] + coef * (simplex[n][j] - centroid[j]);
            return p;
        };

        std::vector<double> xr = point(-1.0);
        double fr = f(xr);
        if (fr < values[0]) {
            std::vector<double> xe = point(-2.0);
            double fe = f(xe);
            if (fe < fr) {
                simplex[n] = std::move(xe);
                values[n] = fe;
            } else {
                simplex[n] = std::move(xr);
                values[n] = fr;
            }
        } else if (fr < values[n - 1]) {
            simplex[n] = std::move(xr);
            values[n] = fr;
        } else {
            std::vector<double> xc = point(fr < values[n] ? -0.5 : 0.5);
            double fc = f(xc);
            if (fc < std::min(fr, values[n])) {
                simplex[n] = std::move(xc);
                values[n] = fc;
            } else {
                for (size_t i = 1; i <= n; ++i) {
                    for (size_t j = 0; j < n; ++j)
                        simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
                    values[i] = f(simplex[i]);
                }
            }
        }
    }
    order();
    result.x = simplex[0];
    result.value = values[0];
    result.iterations = iter;
    return result;
}

}  // namespace dcpw
