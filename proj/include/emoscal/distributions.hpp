#pragma once

#include <cstddef>
#include <variant>
#include <vector>

namespace emoscal {

class Rng;

/// Normal distribution truncated to [0, inf) and renormalized.
/// Parameterized by the location and scale of the parent normal; the location
/// may be negative, in which case most mass sits just above zero.
class TruncatedNormal {
public:
    TruncatedNormal(double location, double scale);

    double location() const { return location_; }
    double scale() const { return scale_; }

    double pdf(double x) const;
    double cdf(double x) const;
    double quantile(double p) const;
    double crps(double obs) const;
    double log_score(double obs) const;
    double mean() const;
    double variance() const;
    double sample(Rng& rng) const;

private:
    double location_;
    double scale_;
};

/// Log-normal distribution with location/shape parameters of log X.
class LogNormal {
public:
    LogNormal(double location, double shape);

    /// Builds the log-normal whose mean and variance are exactly (m, v).
    /// Throws std::domain_error unless m > 0 and v > 0.
    static LogNormal from_mean_variance(double m, double v);

    double location() const { return location_; }
    double shape() const { return shape_; }

    double pdf(double x) const;
    double cdf(double x) const;
    double quantile(double p) const;
    double crps(double obs) const;
    double log_score(double obs) const;
    double mean() const;
    double variance() const;
    double sample(Rng& rng) const;

private:
    double location_;
    double shape_;
};

/// Two-component mixture weight * TN + (1 - weight) * LN.
/// CRPS is evaluated by adaptive quadrature of the integral
/// int F^2 below the observation plus int (1-F)^2 above it; the quantile
/// inverts the CDF by bracketed bisection between the component quantiles.
class TnLnMixture {
public:
    TnLnMixture(double weight, TruncatedNormal tn, LogNormal ln);

    double weight() const { return weight_; }
    const TruncatedNormal& tn() const { return tn_; }
    const LogNormal& ln() const { return ln_; }

    double pdf(double x) const;
    double cdf(double x) const;
    double quantile(double p) const;
    double crps(double obs) const;
    double log_score(double obs) const;
    double mean() const;
    double sample(Rng& rng) const;

private:
    double weight_;
    TruncatedNormal tn_;
    LogNormal ln_;
};

/// Step-function distribution placing mass 1/n on each supplied value.
/// Used for raw-ensemble and climatology forecasts. Quantiles follow the
/// order-statistic convention q(p) = x_(ceil(n*p)); CRPS uses the exact
/// finite-sample identity E|X - y| - E|X - X'| / 2.
class EmpiricalDistribution {
public:
    explicit EmpiricalDistribution(std::vector<double> values);

    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }

    double cdf(double x) const;
    double quantile(double p) const;
    double crps(double obs) const;
    double mean() const;
    double sample(Rng& rng) const;

private:
    std::vector<double> values_;  // sorted ascending
    double mean_;
    double half_mean_abs_diff_;
};

using PredictiveDistribution =
    std::variant<TruncatedNormal, LogNormal, TnLnMixture, EmpiricalDistribution>;

double density(const PredictiveDistribution& d, double x);
double cdf(const PredictiveDistribution& d, double x);
double quantile(const PredictiveDistribution& d, double p);
double crps(const PredictiveDistribution& d, double obs);
double log_score(const PredictiveDistribution& d, double obs);
double mean_of(const PredictiveDistribution& d);
double sample(const PredictiveDistribution& d, Rng& rng);
std::vector<double> sample_many(const PredictiveDistribution& d, Rng& rng, std::size_t n);

}  // namespace emoscal
