#include "emoscal/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace emoscal {

namespace {

struct Vertex {
    std::vector<double> x;
    double f;
};

}  // namespace

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                          const std::vector<double>& start, const SimplexOptions& options)
{
    const std::size_t dim = start.size();
    if (dim == 0) throw std::invalid_argument("nelder_mead: empty start vector");
    const std::size_t max_evals = options.max_evals > 0 ? options.max_evals : 500 * dim;

    std::size_t evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        const double f = objective(x);
        return std::isnan(f) ? std::numeric_limits<double>::infinity() : f;
    };

    std::vector<Vertex> simplex;
    simplex.reserve(dim + 1);
    simplex.push_back({start, eval(start)});
    for (std::size_t j = 0; j < dim; ++j) {
        std::vector<double> x = start;
        x[j] += std::max(0.05 * std::abs(x[j]), 0.1);
        simplex.push_back({std::move(x), 0.0});
        simplex.back().f = eval(simplex.back().x);
    }

    SimplexResult best{simplex.front().x, simplex.front().f, 0, false};
    auto note_best = [&](const Vertex& v) {
        if (v.f < best.fx) {
            best.fx = v.f;
            best.x = v.x;
        }
    };
    for (const auto& v : simplex) note_best(v);

    auto order = [&] {
        std::stable_sort(simplex.begin(), simplex.end(),
                         [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    };
    order();

    std::vector<double> centroid(dim), candidate(dim);
    while (evals < max_evals) {
        const double spread = simplex.back().f - simplex.front().f;
        if (std::isnan(spread)) break;  // every vertex infeasible; nothing to contract toward
        bool shrink = false;
        if (spread < options.spread_tol) {
            // Equal function values alone are not enough: a simplex straddling
            // the minimum symmetrically has zero spread at finite width. Only
            // stop once the vertices have collapsed; otherwise shrink them.
            double diameter = 0.0;
            double scale = 1.0;
            for (std::size_t i = 1; i <= dim; ++i)
                for (std::size_t j = 0; j < dim; ++j)
                    diameter = std::max(diameter, std::abs(simplex[i].x[j] - simplex[0].x[j]));
            for (const double v : simplex[0].x) scale = std::max(scale, std::abs(v));
            if (diameter <= 1e-8 * scale) {
                best.converged = true;
                break;
            }
            shrink = true;
        }

        if (!shrink) {
            std::fill(centroid.begin(), centroid.end(), 0.0);
            for (std::size_t i = 0; i < dim; ++i)
                for (std::size_t j = 0; j < dim; ++j) centroid[j] += simplex[i].x[j];
            for (double& c : centroid) c /= static_cast<double>(dim);
            const Vertex& worst = simplex.back();

            auto blend = [&](const double t) {
                for (std::size_t j = 0; j < dim; ++j)
                    candidate[j] = centroid[j] + t * (centroid[j] - worst.x[j]);
                return eval(candidate);
            };

            const double f_reflect = blend(1.0);
            std::vector<double> reflect = candidate;

            if (f_reflect < simplex.front().f) {
                const double f_expand = blend(2.0);
                if (f_expand < f_reflect)
                    simplex.back() = {candidate, f_expand};
                else
                    simplex.back() = {std::move(reflect), f_reflect};
            } else if (f_reflect < simplex[dim - 1].f) {
                simplex.back() = {std::move(reflect), f_reflect};
            } else if (f_reflect < worst.f) {
                const double f_outside = blend(0.5);
                if (f_outside <= f_reflect)
                    simplex.back() = {candidate, f_outside};
                else
                    shrink = true;
            } else {
                const double f_inside = blend(-0.5);
                if (f_inside < worst.f)
                    simplex.back() = {candidate, f_inside};
                else
                    shrink = true;
            }
        }

        if (shrink) {
            for (std::size_t i = 1; i <= dim; ++i) {
                for (std::size_t j = 0; j < dim; ++j)
                    simplex[i].x[j] = simplex[0].x[j] + 0.5 * (simplex[i].x[j] - simplex[0].x[j]);
                simplex[i].f = eval(simplex[i].x);
                note_best(simplex[i]);
                if (evals >= max_evals) break;
            }
        } else {
            note_best(simplex.back());
        }
        order();
    }

    note_best(simplex.front());
    best.evaluations = evals;
    return best;
}

}  // namespace emoscal
