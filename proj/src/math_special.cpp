#include "emoscal/math_special.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

namespace emoscal {

namespace {
constexpr double kInvSqrt2 = 0.7071067811865475244008443621048490;
constexpr double kLogSqrt2Pi = 0.9189385332046727417803297364056176;
}  // namespace

double norm_pdf(const double x) { return std::exp(-0.5 * x * x - kLogSqrt2Pi); }

double norm_cdf(const double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double log_norm_cdf(const double x)
{
    if (x > -37.0) {
        const double c = 0.5 * std::erfc(-x * kInvSqrt2);
        if (c > 1e-300) return std::log(c);
    }
    // Asymptotic expansion of the Mills ratio for the far lower tail.
    const double x2 = x * x;
    const double series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
    return -0.5 * x2 - kLogSqrt2Pi - std::log(-x) + std::log(series);
}

double norm_quantile(const double p)
{
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("norm_quantile: p must lie in (0,1)");
    static const boost::math::normal_distribution<double> unit{};
    return boost::math::quantile(unit, p);
}

double chi_square_sf_even(const double x, const int dof)
{
    if (dof < 2 || dof % 2 != 0) throw std::invalid_argument("chi_square_sf_even: dof must be positive and even");
    if (x <= 0.0) return 1.0;
    // For even dof the survival function is a finite Poisson sum.
    const double half = 0.5 * x;
    double term = 1.0;
    double sum = 1.0;
    for (int j = 1; j < dof / 2; ++j) {
        term *= half / j;
        sum += term;
    }
    return std::exp(-half) * sum;
}

}  // namespace emoscal
