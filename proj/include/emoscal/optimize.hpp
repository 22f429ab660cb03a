#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace emoscal {

struct SimplexOptions {
    // Stop when max |f_i - f_best| falls below this and the simplex has
    // collapsed. Mean-score objectives sit on flat ridges where 1e-6 of
    // objective still spans large parameter moves, hence the tight default.
    double spread_tol = 1e-9;
    std::size_t max_evals = 0;    // 0 means 500 * dimension
};

struct SimplexResult {
    std::vector<double> x;
    double fx = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

/// Derivative-free Nelder-Mead simplex minimization. Objectives may return
/// +infinity for infeasible points; the simplex contracts away from them.
/// Fully deterministic: no randomization, stable tie-breaking.
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                          const std::vector<double>& start, const SimplexOptions& options = {});

}  // namespace emoscal
