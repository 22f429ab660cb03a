#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "emoscal/math_special.hpp"
#include "oracle.hpp"

using namespace emoscal;

TEST_CASE("standard normal density and CDF")
{
    CHECK(norm_pdf(0.0) == doctest::Approx(0.39894228040143268).epsilon(1e-15));
    CHECK(norm_pdf(2.0) == doctest::Approx(std::exp(-2.0) * 0.39894228040143268).epsilon(1e-14));
    CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    for (const double x : {-8.0, -3.5, -1.0, -0.2, 0.3, 1.7, 4.0, 7.5}) {
        CHECK(norm_cdf(x) == doctest::Approx(oracle::normal_cdf(x)).epsilon(5e-15));
        CHECK(norm_cdf(x) + norm_cdf(-x) == doctest::Approx(1.0).epsilon(1e-14));
    }
    // far left tail stays positive and accurate relative to Boost
    CHECK(norm_cdf(-30.0) == doctest::Approx(oracle::normal_cdf(-30.0)).epsilon(1e-13));
    CHECK(norm_cdf(-30.0) > 0.0);
}

TEST_CASE("log CDF stays finite and accurate far into the left tail")
{
    // frozen high-precision references
    CHECK(log_norm_cdf(-5.0) == doctest::Approx(-15.064998393988725736).epsilon(1e-14));
    CHECK(log_norm_cdf(-15.0) == doctest::Approx(-116.13138484571169524).epsilon(1e-13));
    CHECK(log_norm_cdf(-40.0) == doctest::Approx(-804.60844201375378817).epsilon(1e-13));
    // consistency with the plain CDF wherever that is representable
    for (double x = -30.0; x <= 3.0; x += 0.7)
        CHECK(std::exp(log_norm_cdf(x)) == doctest::Approx(norm_cdf(x)).epsilon(1e-12));
    CHECK(log_norm_cdf(8.0) == doctest::Approx(std::log(norm_cdf(8.0))).epsilon(1e-12));
    // monotone through the series/erfc switchover
    double prev = log_norm_cdf(-45.0);
    for (double x = -44.5; x <= -30.0; x += 0.5) {
        const double cur = log_norm_cdf(x);
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("normal quantile")
{
    CHECK(norm_quantile(0.75) == doctest::Approx(0.6744897501960817).epsilon(1e-15));
    CHECK(norm_quantile(0.5) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
    for (const double p : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.77, 0.999, 1.0 - 1e-9})
        CHECK(norm_cdf(norm_quantile(p)) == doctest::Approx(p).epsilon(1e-11));
}

TEST_CASE("chi-square upper tail, even degrees of freedom")
{
    // frozen high-precision references for 4 dof
    CHECK(chi_square_sf_even(3.2, 4) == doctest::Approx(0.52493094678610406206).epsilon(1e-14));
    CHECK(chi_square_sf_even(11.5, 4) == doctest::Approx(0.021483770376440252709).epsilon(1e-14));
    for (const int dof : {2, 4, 6, 8})
        for (const double x : {0.1, 1.0, 3.7, 9.0, 25.0, 60.0})
            CHECK(chi_square_sf_even(x, dof) ==
                  doctest::Approx(oracle::chi2_sf(x, dof)).epsilon(1e-12));
    CHECK(chi_square_sf_even(0.0, 4) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS((void)chi_square_sf_even(1.0, 3), std::invalid_argument);
    CHECK_THROWS_AS((void)chi_square_sf_even(1.0, 0), std::invalid_argument);
    // Negative arguments are saturated, not rejected: the statistic is
    // nonnegative by construction and P(X > x) = 1 for any x <= 0.
    CHECK(chi_square_sf_even(-1.0, 4) == 1.0);
}
