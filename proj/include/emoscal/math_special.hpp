#pragma once

namespace emoscal {

/// Standard normal density.
double norm_pdf(double x);

/// Standard normal CDF, computed through the complementary error function.
double norm_cdf(double x);

/// log(norm_cdf(x)), stable for arbitrarily negative x.
double log_norm_cdf(double x);

/// Standard normal quantile function.
double norm_quantile(double p);

/// Upper-tail probability of a chi-square distribution with even dof.
double chi_square_sf_even(double x, int dof);

}  // namespace emoscal
