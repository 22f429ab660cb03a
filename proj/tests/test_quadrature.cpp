#include <cmath>

#include <doctest.h>

#include "emoscal/quadrature.hpp"

using namespace emoscal;

TEST_CASE("known integrals")
{
    CHECK(integrate([](double x) { return x * x; }, 0.0, 1.0, 1e-12) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(integrate([](double x) { return std::sin(x); }, 0.0, 3.141592653589793, 1e-11) ==
          doctest::Approx(2.0).epsilon(1e-10));
    const auto normal_pdf = [](double x) {
        return std::exp(-0.5 * x * x) * 0.39894228040143268;
    };
    CHECK(integrate(normal_pdf, -8.0, 8.0, 1e-10) == doctest::Approx(1.0).epsilon(1e-9));
    // degenerate interval
    CHECK(integrate([](double) { return 5.0; }, 2.0, 2.0) == 0.0);
    CHECK(integrate([](double) { return 5.0; }, 2.0, 1.0) == 0.0);
}

TEST_CASE("breakpoints rescue narrow features the plain rule cannot see")
{
    // Gaussian spike of width 1e-3 centered away from the initial sample
    // points; its true mass over [0,1] is essentially the full integral.
    const double c = 0.3;
    const double w = 1e-3;
    const auto spike = [&](double x) {
        const double z = (x - c) / w;
        return std::exp(-0.5 * z * z);
    };
    const double exact = w * std::sqrt(2.0 * 3.141592653589793);  // both tails negligible
    // The plain adaptive rule samples 0, 0.25, 0.5, 0.75, 1 first and sees
    // zeros everywhere, so it terminates immediately with a wrong answer.
    CHECK(integrate(spike, 0.0, 1.0, 1e-10) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    const double marks[] = {c};
    CHECK(integrate_with_breakpoints(spike, 0.0, 1.0, marks, 1e-10) ==
          doctest::Approx(exact).epsilon(1e-8));
    // breakpoints outside the interval are ignored
    const double outside[] = {-1.0, 2.0};
    CHECK(integrate_with_breakpoints([](double x) { return x; }, 0.0, 1.0, outside, 1e-12) ==
          doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("evaluation budget is enforced")
{
    const auto wild = [](double x) { return std::sin(1000.0 * x * x); };
    CHECK_THROWS_AS((void)integrate(wild, 0.0, 3.0, 1e-12, 64), QuadratureError);
}
