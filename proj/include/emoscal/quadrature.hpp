#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>

namespace emoscal {

/// Thrown when an adaptive integral fails to reach its tolerance within the
/// evaluation budget; usually a sign of pathological distribution parameters.
class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

template <typename F>
double simpson_recurse(F& f, double a, double b, double fa, double fm, double fb,
                       double whole, double tol, int depth, std::size_t& evals,
                       std::size_t max_evals)
{
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    evals += 2;
    if (evals > max_evals) throw QuadratureError("adaptive quadrature: evaluation budget exhausted");
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, evals, max_evals)
           + simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, evals, max_evals);
}

}  // namespace detail

/// Adaptive Simpson integral of f over [a, b] to absolute tolerance abs_tol.
template <typename F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-9,
                 std::size_t max_evals = 1u << 20)
{
    if (!(b > a)) return 0.0;
    const double fa = f(a);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double fb = f(b);
    std::size_t evals = 3;
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_recurse(f, a, b, fa, fm, fb, whole, abs_tol, 52, evals, max_evals);
}

/// Same, but forces subdivision at the supplied interior breakpoints, which
/// protects the error estimate when the integrand has narrow features.
template <typename F>
double integrate_with_breakpoints(F&& f, double a, double b, std::span<const double> breakpoints,
                                  double abs_tol = 1e-9, std::size_t max_evals = 1u << 20)
{
    if (!(b > a)) return 0.0;
    double total = 0.0;
    double lo = a;
    std::size_t evals = 0;
    auto piece = [&](double x0, double x1) {
        const double fa = f(x0);
        const double m = 0.5 * (x0 + x1);
        const double fm = f(m);
        const double fb = f(x1);
        evals += 3;
        const double whole = (x1 - x0) / 6.0 * (fa + 4.0 * fm + fb);
        const double seg_tol = abs_tol * std::max((x1 - x0) / (b - a), 1e-3);
        total += detail::simpson_recurse(f, x0, x1, fa, fm, fb, whole, seg_tol, 52, evals, max_evals);
    };
    for (const double bp : breakpoints) {
        if (bp > lo && bp < b) {
            piece(lo, bp);
            lo = bp;
        }
    }
    piece(lo, b);
    return total;
}

}  // namespace emoscal
