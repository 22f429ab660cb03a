#include "emoscal/distributions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <type_traits>

#include "emoscal/math_special.hpp"
#include "emoscal/quadrature.hpp"
#include "emoscal/rng.hpp"

namespace emoscal {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244008443621048490;
constexpr double kInvSqrtPi = 0.5641895835477562869480794515607726;
constexpr double kLogSqrt2Pi = 0.9189385332046727417803297364056176;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Ratio below which the truncated normal is numerically indistinguishable
// from its exponential tail limit. The log-ratio CRPS form stays accurate
// far deeper than direct evaluation, so this only guards absurd inputs.
constexpr double kExpTailRatio = -300.0;

// Below this ratio erfc underflows and the moment formulas switch to an
// asymptotic series in 1/k^2; above it the hazard-based closed forms hold.
constexpr double kMomentSeriesRatio = -37.0;

double log_norm_pdf(const double z) { return -0.5 * z * z - kLogSqrt2Pi; }

}  // namespace

TruncatedNormal::TruncatedNormal(const double location, const double scale)
    : location_(location), scale_(scale)
{
    if (!(scale > 0.0) || !std::isfinite(scale) || !std::isfinite(location))
        throw std::invalid_argument("TruncatedNormal: scale must be positive and finite");
}

double TruncatedNormal::pdf(const double x) const
{
    if (x < 0.0) return 0.0;
    const double z = (x - location_) / scale_;
    const double k = location_ / scale_;
    return std::exp(log_norm_pdf(z) - std::log(scale_) - log_norm_cdf(k));
}

double TruncatedNormal::cdf(const double x) const
{
    if (x <= 0.0) return 0.0;
    const double z = (x - location_) / scale_;
    const double k = location_ / scale_;
    return -std::expm1(log_norm_cdf(-z) - log_norm_cdf(k));
}

double TruncatedNormal::quantile(const double p) const
{
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("TruncatedNormal::quantile: p must lie in (0,1)");
    const double k = location_ / scale_;
    const double phi_k = norm_cdf(k);
    double x;
    if (phi_k > 1e-250) {
        // Exact inverse through the parent normal; the complement form keeps
        // the upper tail well conditioned.
        const double tail = phi_k * (1.0 - p);
        x = tail < 0.5 ? location_ - scale_ * norm_quantile(tail)
                       : location_ + scale_ * norm_quantile(norm_cdf(-k) + p * phi_k);
        if (x < 0.0) x = 0.0;
    } else {
        x = -std::log1p(-p) * scale_ / -k;  // exponential tail limit as a start
    }

    // Safeguarded Newton polish on the exact CDF.
    double lo = 0.0;
    double hi = std::max(x, scale_);
    while (cdf(hi) < p) {
        lo = hi;
        hi = 2.0 * hi + scale_;
    }
    x = std::clamp(x, lo, hi);
    for (int it = 0; it < 100; ++it) {
        const double f = cdf(x) - p;
        // Relative residual target so that deep-tail probabilities round-trip.
        if (std::abs(f) <= 1e-15 * p) return x;
        if (f > 0.0) hi = x; else lo = x;
        const double g = pdf(x);
        double next = g > 0.0 ? x - f / g : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (hi - lo <= 1e-15 * (1.0 + std::abs(x))) return x;
        x = next;
    }
    return x;
}

double TruncatedNormal::crps(const double obs) const
{
    const double y = std::max(obs, 0.0);
    const double z = (y - location_) / scale_;
    const double k = location_ / scale_;
    if (k < kExpTailRatio) {
        const double rate = -k / scale_;
        return y + 2.0 / rate * std::exp(-rate * y) - 1.5 / rate + (y - obs);
    }
    // Every normal probability enters as a ratio against the truncation mass,
    // evaluated in log space so that deep truncation never underflows.
    const double lp = log_norm_cdf(k);
    const double r_upper = std::exp(log_norm_cdf(-z) - lp);           // Phi(-z)/Phi(k)
    const double r_dens = std::exp(log_norm_pdf(z) - lp);             // phi(z)/Phi(k)
    const double r_self = std::exp(log_norm_cdf(k * std::sqrt(2.0)) - 2.0 * lp);
    return scale_ * (z * (1.0 - 2.0 * r_upper) + 2.0 * r_dens - r_self * kInvSqrtPi)
           + (y - obs);
}

double TruncatedNormal::log_score(const double obs) const
{
    if (obs < 0.0) return kInf;
    const double z = (obs - location_) / scale_;
    const double k = location_ / scale_;
    return -log_norm_pdf(z) + std::log(scale_) + log_norm_cdf(k);
}

double TruncatedNormal::mean() const
{
    const double k = location_ / scale_;
    if (k < kMomentSeriesRatio) {
        const double u = 1.0 / (k * k);
        return scale_ / -k * (1.0 - u * (2.0 - u * (10.0 - 74.0 * u)));
    }
    const double hazard = std::exp(log_norm_pdf(k) - log_norm_cdf(k));
    return location_ + scale_ * hazard;
}

double TruncatedNormal::variance() const
{
    const double k = location_ / scale_;
    if (k < kMomentSeriesRatio) {
        const double u = 1.0 / (k * k);
        return scale_ * scale_ * u * (1.0 - u * (6.0 - u * (50.0 - 518.0 * u)));
    }
    const double hazard = std::exp(log_norm_pdf(k) - log_norm_cdf(k));
    return scale_ * scale_ * (1.0 - k * hazard - hazard * hazard);
}

double TruncatedNormal::sample(Rng& rng) const
{
    const double a = -location_ / scale_;  // standardized lower bound
    double z;
    if (a < 0.5) {
        do {
            z = rng.normal();
        } while (z < a);
    } else {
        // Translated-exponential rejection for the normal tail.
        const double rate = 0.5 * (a + std::sqrt(a * a + 4.0));
        for (;;) {
            z = a - std::log(rng.uniform01()) / rate;
            const double diff = z - rate;
            if (rng.uniform01() <= std::exp(-0.5 * diff * diff)) break;
        }
    }
    return location_ + scale_ * z;
}

LogNormal::LogNormal(const double location, const double shape)
    : location_(location), shape_(shape)
{
    if (!(shape > 0.0) || !std::isfinite(shape) || !std::isfinite(location))
        throw std::invalid_argument("LogNormal: shape must be positive and finite");
}

LogNormal LogNormal::from_mean_variance(const double m, const double v)
{
    if (!(m > 0.0) || !(v > 0.0))
        throw std::domain_error("LogNormal::from_mean_variance: mean and variance must be positive");
    const double location = 2.0 * std::log(m) - 0.5 * std::log(v + m * m);
    const double shape = std::sqrt(std::log1p(v / (m * m)));
    return LogNormal(location, shape);
}

double LogNormal::pdf(const double x) const
{
    if (x <= 0.0) return 0.0;
    const double w = (std::log(x) - location_) / shape_;
    return norm_pdf(w) / (x * shape_);
}

double LogNormal::cdf(const double x) const
{
    if (x <= 0.0) return 0.0;
    return norm_cdf((std::log(x) - location_) / shape_);
}

double LogNormal::quantile(const double p) const
{
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("LogNormal::quantile: p must lie in (0,1)");
    return std::exp(location_ + shape_ * norm_quantile(p));
}

double LogNormal::crps(const double obs) const
{
    const double y = std::max(obs, 0.0);
    const double m = mean();
    if (y == 0.0) return 2.0 * m * norm_cdf(-shape_ * kInvSqrt2) + (y - obs);
    const double w = (std::log(y) - location_) / shape_;
    return y * (2.0 * norm_cdf(w) - 1.0)
           - 2.0 * m * (norm_cdf(shape_ * kInvSqrt2) - norm_cdf(shape_ - w)) + (y - obs);
}

double LogNormal::log_score(const double obs) const
{
    if (obs <= 0.0) return kInf;
    const double lx = std::log(obs);
    const double w = (lx - location_) / shape_;
    return 0.5 * w * w + kLogSqrt2Pi + lx + std::log(shape_);
}

double LogNormal::mean() const { return std::exp(location_ + 0.5 * shape_ * shape_); }

double LogNormal::variance() const
{
    const double s2 = shape_ * shape_;
    return std::expm1(s2) * std::exp(2.0 * location_ + s2);
}

double LogNormal::sample(Rng& rng) const { return std::exp(location_ + shape_ * rng.normal()); }

TnLnMixture::TnLnMixture(const double weight, TruncatedNormal tn, LogNormal ln)
    : weight_(weight), tn_(tn), ln_(ln)
{
    if (!(weight >= 0.0 && weight <= 1.0))
        throw std::invalid_argument("TnLnMixture: weight must lie in [0,1]");
}

double TnLnMixture::pdf(const double x) const
{
    if (weight_ == 1.0) return tn_.pdf(x);
    if (weight_ == 0.0) return ln_.pdf(x);
    return weight_ * tn_.pdf(x) + (1.0 - weight_) * ln_.pdf(x);
}

double TnLnMixture::cdf(const double x) const
{
    if (weight_ == 1.0) return tn_.cdf(x);
    if (weight_ == 0.0) return ln_.cdf(x);
    return weight_ * tn_.cdf(x) + (1.0 - weight_) * ln_.cdf(x);
}

double TnLnMixture::quantile(const double p) const
{
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("TnLnMixture::quantile: p must lie in (0,1)");
    if (weight_ == 1.0) return tn_.quantile(p);
    if (weight_ == 0.0) return ln_.quantile(p);
    // The component quantiles always bracket the mixture quantile.
    double lo = tn_.quantile(p);
    double hi = ln_.quantile(p);
    if (lo > hi) std::swap(lo, hi);
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double c = cdf(mid);
        if (std::abs(c - p) <= 1e-14 * p) return mid;
        if (c < p) lo = mid; else hi = mid;
        if (hi - lo <= 1e-14 * (1.0 + std::abs(mid))) return 0.5 * (lo + hi);
    }
    return mid;
}

double TnLnMixture::crps(const double obs) const
{
    if (weight_ == 1.0) return tn_.crps(obs);
    if (weight_ == 0.0) return ln_.crps(obs);
    const double y = std::max(obs, 0.0);

    // Coarse component landmarks guide the adaptive subdivision.
    const double tl = tn_.location();
    const double ts = tn_.scale();
    const double el = std::exp(ln_.location());
    const double es = std::exp(ln_.shape());
    std::array<double, 8> marks{tl - 2.0 * ts, tl - ts,      tl,      tl + 2.0 * ts,
                                el / (es * es), el / es, el * es, el * es * es};
    std::sort(marks.begin(), marks.end());

    double total = y - obs;
    if (y > 0.0) {
        auto f2 = [this](double x) {
            const double c = cdf(x);
            return c * c;
        };
        total += integrate_with_breakpoints(f2, 0.0, y, marks, 5e-10);
    }
    const double upper = std::max({tn_.quantile(1.0 - 1e-10),
                                   std::exp(ln_.location() + 6.4 * ln_.shape()), y});
    if (upper > y) {
        auto s2 = [this](double x) {
            const double s = 1.0 - cdf(x);
            return s * s;
        };
        total += integrate_with_breakpoints(s2, y, upper, marks, 5e-10);
    }
    return total;
}

double TnLnMixture::log_score(const double obs) const
{
    const double p = pdf(obs);
    return p > 0.0 ? -std::log(p) : kInf;
}

double TnLnMixture::mean() const
{
    if (weight_ == 1.0) return tn_.mean();
    if (weight_ == 0.0) return ln_.mean();
    return weight_ * tn_.mean() + (1.0 - weight_) * ln_.mean();
}

double TnLnMixture::sample(Rng& rng) const
{
    if (weight_ == 1.0) return tn_.sample(rng);
    if (weight_ == 0.0) return ln_.sample(rng);
    return rng.uniform01() < weight_ ? tn_.sample(rng) : ln_.sample(rng);
}

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> values)
    : values_(std::move(values))
{
    if (values_.empty())
        throw std::invalid_argument("EmpiricalDistribution: needs at least one value");
    std::sort(values_.begin(), values_.end());
    const double n = static_cast<double>(values_.size());
    mean_ = std::accumulate(values_.begin(), values_.end(), 0.0) / n;
    double acc = 0.0;
    double prefix = 0.0;
    for (std::size_t j = 0; j < values_.size(); ++j) {
        acc += static_cast<double>(j) * values_[j] - prefix;
        prefix += values_[j];
    }
    half_mean_abs_diff_ = acc / (n * n);
}

double EmpiricalDistribution::cdf(const double x) const
{
    const auto it = std::upper_bound(values_.begin(), values_.end(), x);
    return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

double EmpiricalDistribution::quantile(const double p) const
{
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("EmpiricalDistribution::quantile: p must lie in (0,1)");
    const double n = static_cast<double>(values_.size());
    auto idx = static_cast<std::size_t>(std::ceil(n * p));
    idx = std::clamp<std::size_t>(idx, 1, values_.size());
    return values_[idx - 1];
}

double EmpiricalDistribution::crps(const double obs) const
{
    double acc = 0.0;
    for (const double v : values_) acc += std::abs(v - obs);
    return acc / static_cast<double>(values_.size()) - half_mean_abs_diff_;
}

double EmpiricalDistribution::mean() const { return mean_; }

double EmpiricalDistribution::sample(Rng& rng) const
{
    return values_[rng.uniform_below(values_.size())];
}

namespace {

template <typename F>
double visit_continuous(const PredictiveDistribution& d, F&& f, const char* op)
{
    return std::visit(
        [&](const auto& v) -> double {
            if constexpr (std::is_same_v<std::decay_t<decltype(v)>, EmpiricalDistribution>)
                throw std::domain_error(std::string(op) + ": not defined for empirical forecasts");
            else
                return f(v);
        },
        d);
}

}  // namespace

double density(const PredictiveDistribution& d, const double x)
{
    return visit_continuous(d, [x](const auto& v) { return v.pdf(x); }, "density");
}

double cdf(const PredictiveDistribution& d, const double x)
{
    return std::visit([x](const auto& v) { return v.cdf(x); }, d);
}

double quantile(const PredictiveDistribution& d, const double p)
{
    return std::visit([p](const auto& v) { return v.quantile(p); }, d);
}

double crps(const PredictiveDistribution& d, const double obs)
{
    return std::visit([obs](const auto& v) { return v.crps(obs); }, d);
}

double log_score(const PredictiveDistribution& d, const double obs)
{
    return visit_continuous(d, [obs](const auto& v) { return v.log_score(obs); }, "log_score");
}

double mean_of(const PredictiveDistribution& d)
{
    return std::visit([](const auto& v) { return v.mean(); }, d);
}

double sample(const PredictiveDistribution& d, Rng& rng)
{
    return std::visit([&rng](const auto& v) { return v.sample(rng); }, d);
}

std::vector<double> sample_many(const PredictiveDistribution& d, Rng& rng, const std::size_t n)
{
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(sample(d, rng));
    return out;
}

}  // namespace emoscal
