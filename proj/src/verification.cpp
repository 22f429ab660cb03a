#include "emoscal/verification.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <variant>

#include "emoscal/math_special.hpp"
#include "emoscal/parallel.hpp"
#include "emoscal/quadrature.hpp"
#include "emoscal/rng.hpp"

namespace emoscal {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244008443621048490;
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Stream offset separating per-case PIT randomization from the per-case
// rank-histogram tie-breaking streams, which use the raw case index.
constexpr std::uint64_t kPitStreamOffset = 0x8000000000000000ULL;

double upper_tail_bound(const TruncatedNormal& d) { return d.quantile(1.0 - 1e-10); }
double upper_tail_bound(const LogNormal& d) { return std::exp(d.location() + 6.4 * d.shape()); }
double upper_tail_bound(const TnLnMixture& d)
{
    return std::max(upper_tail_bound(d.tn()), upper_tail_bound(d.ln()));
}

/// Exact threshold-weighted CRPS of a step-function CDF: the integrand is
/// piecewise constant between the knots {threshold, obs, ensemble values}.
double empirical_tw_crps(const EmpiricalDistribution& e, const double obs, const double threshold)
{
    std::vector<double> knots;
    knots.reserve(e.size() + 2);
    knots.push_back(threshold);
    if (obs > threshold) knots.push_back(obs);
    for (const double v : e.values())
        if (v > threshold) knots.push_back(v);
    std::sort(knots.begin(), knots.end());

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double x0 = knots[i];
        const double x1 = knots[i + 1];
        if (x1 <= x0) continue;
        const double diff = e.cdf(x0) - (x0 >= obs ? 1.0 : 0.0);
        total += diff * diff * (x1 - x0);
    }
    return total;
}

template <typename Dist>
double parametric_tw_crps(const Dist& d, const double obs, const double threshold)
{
    const double split = std::max(obs, threshold);
    const std::array<double, 3> marks{d.quantile(0.1), d.quantile(0.5), d.quantile(0.9)};
    double total = 0.0;
    if (obs > threshold) {
        auto f2 = [&d](double x) {
            const double c = d.cdf(x);
            return c * c;
        };
        total += integrate_with_breakpoints(f2, threshold, obs, marks, 5e-11);
    }
    const double upper = std::max(upper_tail_bound(d), split);
    if (upper > split) {
        auto s2 = [&d](double x) {
            const double s = 1.0 - d.cdf(x);
            return s * s;
        };
        total += integrate_with_breakpoints(s2, split, upper, marks, 5e-11);
    }
    return total;
}

}  // namespace

std::string to_string(const ScoreKind kind)
{
    switch (kind) {
        case ScoreKind::CRPS: return "CRPS";
        case ScoreKind::LOG_SCORE: return "LOG_SCORE";
        case ScoreKind::TW_CRPS: return "TW_CRPS";
    }
    throw std::logic_error("to_string: unknown ScoreKind");
}

ScoreKind score_kind_from_string(const std::string& text)
{
    if (text == "CRPS") return ScoreKind::CRPS;
    if (text == "LOG_SCORE") return ScoreKind::LOG_SCORE;
    if (text == "TW_CRPS") return ScoreKind::TW_CRPS;
    throw std::invalid_argument("unknown score kind '" + text + "'");
}

std::vector<double> score_cases(const std::vector<PredictiveDistribution>& forecasts,
                                const std::vector<double>& observations, const ScoreKind kind,
                                const std::optional<double> threshold)
{
    if (forecasts.size() != observations.size())
        throw std::invalid_argument("score_cases: forecast/observation length mismatch");
    if (kind == ScoreKind::TW_CRPS && !threshold)
        throw std::invalid_argument("score_cases: TW_CRPS needs a threshold");

    std::vector<double> out;
    out.reserve(forecasts.size());
    for (std::size_t i = 0; i < forecasts.size(); ++i) {
        switch (kind) {
            case ScoreKind::CRPS: out.push_back(crps(forecasts[i], observations[i])); break;
            case ScoreKind::LOG_SCORE:
                out.push_back(log_score(forecasts[i], observations[i]));
                break;
            case ScoreKind::TW_CRPS:
                out.push_back(tw_crps(forecasts[i], observations[i], *threshold));
                break;
        }
    }
    return out;
}

double tw_crps(const PredictiveDistribution& forecast, const double obs, const double threshold)
{
    if (threshold < 0.0) throw std::invalid_argument("tw_crps: threshold must be nonnegative");
    return std::visit(
        [&](const auto& d) -> double {
            if constexpr (std::is_same_v<std::decay_t<decltype(d)>, EmpiricalDistribution>)
                return empirical_tw_crps(d, obs, threshold);
            else
                return parametric_tw_crps(d, obs, threshold);
        },
        forecast);
}

double twcrpss(const double mean_tw_forecast, const double mean_tw_reference)
{
    if (!(mean_tw_reference > 0.0))
        throw std::domain_error("twcrpss: reference score must be positive");
    return 1.0 - mean_tw_forecast / mean_tw_reference;
}

PointScores point_scores(const std::vector<PredictiveDistribution>& forecasts,
                         const std::vector<double>& observations)
{
    if (forecasts.size() != observations.size())
        throw std::invalid_argument("point_scores: forecast/observation length mismatch");
    if (forecasts.empty()) throw std::invalid_argument("point_scores: empty input");
    double abs_sum = 0.0;
    double sq_sum = 0.0;
    for (std::size_t i = 0; i < forecasts.size(); ++i) {
        abs_sum += std::abs(quantile(forecasts[i], 0.5) - observations[i]);
        const double d = mean_of(forecasts[i]) - observations[i];
        sq_sum += d * d;
    }
    const double n = static_cast<double>(forecasts.size());
    return {abs_sum / n, std::sqrt(sq_sum / n)};
}

double pit(const PredictiveDistribution& forecast, const double obs) { return cdf(forecast, obs); }

int verification_rank(const std::vector<double>& members, const double obs, Rng& rng)
{
    if (members.empty()) throw std::invalid_argument("verification_rank: empty ensemble");
    int below = 0;
    int tied = 0;
    for (const double v : members) {
        if (v < obs) ++below;
        else if (v == obs) ++tied;
    }
    int rank = 1 + below;
    if (tied > 0) rank += static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(tied) + 1));
    return rank;
}

CoverageResult coverage_and_width(const std::vector<PredictiveDistribution>& forecasts,
                                  const std::vector<double>& observations,
                                  const double nominal_pct)
{
    if (!(nominal_pct > 0.0 && nominal_pct < 100.0))
        throw std::domain_error("coverage_and_width: nominal_pct must lie in (0,100)");
    if (forecasts.size() != observations.size())
        throw std::invalid_argument("coverage_and_width: forecast/observation length mismatch");
    if (forecasts.empty()) throw std::invalid_argument("coverage_and_width: empty input");

    const double alpha = 1.0 - nominal_pct / 100.0;
    const double lo_p = 0.5 * alpha;
    const double hi_p = 1.0 - 0.5 * alpha;
    int inside = 0;
    double width_sum = 0.0;
    for (std::size_t i = 0; i < forecasts.size(); ++i) {
        const double lo = quantile(forecasts[i], lo_p);
        const double hi = quantile(forecasts[i], hi_p);
        if (observations[i] >= lo && observations[i] <= hi) ++inside;
        width_sum += hi - lo;
    }
    const double n = static_cast<double>(forecasts.size());
    return {100.0 * inside / n, width_sum / n};
}

DmResult dm_test(const std::vector<double>& scores_f, const std::vector<double>& scores_g,
                 const int lag)
{
    if (scores_f.size() != scores_g.size())
        throw std::invalid_argument("dm_test: score series length mismatch");
    const std::size_t n = scores_f.size();
    if (lag < 1 || n < static_cast<std::size_t>(lag))
        throw std::invalid_argument("dm_test: need series length >= lag >= 1");

    std::vector<double> d(n);
    for (std::size_t t = 0; t < n; ++t) d[t] = scores_f[t] - scores_g[t];
    double mean = 0.0;
    for (const double v : d) mean += v;
    mean /= static_cast<double>(n);

    auto autocov = [&](const std::size_t k) {
        double acc = 0.0;
        for (std::size_t t = k; t < n; ++t) acc += (d[t] - mean) * (d[t - k] - mean);
        return acc / static_cast<double>(n);
    };

    const double gamma0 = autocov(0);
    double variance = gamma0;
    for (int k = 1; k < lag; ++k) variance += 2.0 * autocov(static_cast<std::size_t>(k));

    DmResult result;
    result.lag = lag;
    if (variance <= 0.0 && lag > 1) {
        variance = gamma0;  // truncated HAC sum went nonpositive
        result.degenerate = true;
    }
    if (variance <= 0.0) {
        result.degenerate = true;
        if (mean == 0.0) {
            result.t_stat = 0.0;
            result.p_value = 1.0;
        } else {
            result.t_stat = mean > 0.0 ? std::numeric_limits<double>::infinity()
                                       : -std::numeric_limits<double>::infinity();
            result.p_value = 0.0;
        }
        return result;
    }
    result.t_stat = std::sqrt(static_cast<double>(n)) * mean / std::sqrt(variance);
    result.p_value = std::erfc(std::abs(result.t_stat) * kInvSqrt2);
    return result;
}

UniformityResult uniformity_test(const std::vector<double>& pit_values, const int lag_truncation)
{
    const std::size_t n = pit_values.size();
    if (n < 50) throw std::invalid_argument("uniformity_test: need at least 50 PIT values");
    if (lag_truncation < 0)
        throw std::invalid_argument("uniformity_test: negative lag truncation");

    // Exact moments of u - 1/2 under uniformity: 0, 1/12, 0, 1/80.
    std::vector<std::array<double, 4>> g(n);
    std::array<double, 4> gbar{0.0, 0.0, 0.0, 0.0};
    for (std::size_t t = 0; t < n; ++t) {
        const double c = pit_values[t] - 0.5;
        const double c2 = c * c;
        g[t] = {c, c2 - 1.0 / 12.0, c2 * c, c2 * c2 - 1.0 / 80.0};
        for (int j = 0; j < 4; ++j) gbar[j] += g[t][j];
    }
    for (int j = 0; j < 4; ++j) gbar[j] /= static_cast<double>(n);

    auto gamma = [&](const std::size_t k) {
        std::array<std::array<double, 4>, 4> acc{};
        for (std::size_t t = k; t < n; ++t)
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c)
                    acc[r][c] += (g[t][r] - gbar[r]) * (g[t - k][c] - gbar[c]);
        for (auto& row : acc)
            for (double& v : row) v /= static_cast<double>(n);
        return acc;
    };

    std::array<std::array<double, 4>, 4> omega = gamma(0);
    const int max_lag = std::min<int>(lag_truncation, static_cast<int>(n) - 1);
    for (int k = 1; k <= max_lag; ++k) {
        const double w = 1.0 - static_cast<double>(k) / (max_lag + 1.0);
        const auto gk = gamma(static_cast<std::size_t>(k));
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) omega[r][c] += w * (gk[r][c] + gk[c][r]);
    }

    // Solve omega * s = gbar by Gaussian elimination with partial pivoting.
    std::array<std::array<double, 5>, 4> aug{};
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) aug[r][c] = omega[r][c];
        aug[r][4] = gbar[r];
    }
    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::abs(aug[r][col]) > std::abs(aug[pivot][col])) pivot = r;
        if (std::abs(aug[pivot][col]) < 1e-30)
            throw std::runtime_error("uniformity_test: singular moment covariance estimate");
        std::swap(aug[col], aug[pivot]);
        for (int r = 0; r < 4; ++r) {
            if (r == col) continue;
            const double factor = aug[r][col] / aug[col][col];
            for (int c = col; c < 5; ++c) aug[r][c] -= factor * aug[col][c];
        }
    }
    double statistic = 0.0;
    for (int r = 0; r < 4; ++r) statistic += gbar[r] * (aug[r][4] / aug[r][r]);
    statistic *= static_cast<double>(n);

    return {statistic, chi_square_sf_even(statistic, 4)};
}

double bootstrap_rejection_rate(const std::vector<double>& pit_values, const int n_samples,
                                const int sample_size, const double level,
                                const std::uint64_t seed, const unsigned threads)
{
    if (n_samples < 1) throw std::invalid_argument("bootstrap_rejection_rate: need n_samples >= 1");
    if (sample_size < 50)
        throw std::invalid_argument("bootstrap_rejection_rate: need sample_size >= 50");
    if (pit_values.size() < static_cast<std::size_t>(sample_size))
        throw std::invalid_argument(
            "bootstrap_rejection_rate: sample_size exceeds the number of PIT values");
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("bootstrap_rejection_rate: level must lie in (0,1)");

    const std::size_t population = pit_values.size();
    std::vector<char> rejected(static_cast<std::size_t>(n_samples), 0);
    parallel_for(static_cast<std::size_t>(n_samples), threads, [&](const std::size_t s) {
        Rng rng(Rng::derive(seed, s));
        // Partial Fisher-Yates: the first sample_size entries form the draw.
        std::vector<std::uint32_t> idx(population);
        for (std::size_t i = 0; i < population; ++i) idx[i] = static_cast<std::uint32_t>(i);
        std::vector<double> sample(static_cast<std::size_t>(sample_size));
        for (int i = 0; i < sample_size; ++i) {
            const std::size_t j = i + rng.uniform_below(population - i);
            std::swap(idx[i], idx[j]);
            sample[i] = pit_values[idx[i]];
        }
        const UniformityResult r = uniformity_test(sample, 0);
        rejected[s] = r.p_value < level ? 1 : 0;
    });
    int count = 0;
    for (const char r : rejected) count += r;
    return static_cast<double>(count) / static_cast<double>(n_samples);
}

double series_correlation(const std::vector<double>& a, const std::vector<double>& b)
{
    if (a.size() != b.size()) throw std::invalid_argument("series_correlation: length mismatch");
    if (a.size() < 3) throw std::invalid_argument("series_correlation: need at least 3 points");
    const double n = static_cast<double>(a.size());
    double ma = 0.0;
    double mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double saa = 0.0;
    double sbb = 0.0;
    double sab = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    if (saa <= 0.0 || sbb <= 0.0)
        throw std::domain_error("series_correlation: a series has zero variance");
    return sab / std::sqrt(saa * sbb);
}

std::vector<int> histogram_counts(const std::vector<double>& values, const int bins,
                                  const double lo, const double hi)
{
    if (bins < 1) throw std::invalid_argument("histogram_counts: need at least one bin");
    if (!(hi > lo)) throw std::invalid_argument("histogram_counts: empty range");
    std::vector<int> counts(static_cast<std::size_t>(bins), 0);
    const double width = (hi - lo) / bins;
    for (const double v : values) {
        auto bin = static_cast<long>(std::floor((v - lo) / width));
        bin = std::clamp<long>(bin, 0, bins - 1);
        ++counts[static_cast<std::size_t>(bin)];
    }
    return counts;
}

VerificationReport build_report(const std::vector<PredictiveDistribution>& forecasts,
                                const std::vector<double>& observations,
                                const std::vector<double>& tw_thresholds,
                                const double nominal_pct,
                                const std::vector<std::vector<double>>& members_per_case,
                                const std::uint64_t seed)
{
    if (forecasts.size() != observations.size())
        throw std::invalid_argument("build_report: forecast/observation length mismatch");
    if (forecasts.empty()) throw std::invalid_argument("build_report: empty input");
    if (!members_per_case.empty() && members_per_case.size() != forecasts.size())
        throw std::invalid_argument("build_report: member list length mismatch");

    VerificationReport report;
    const double n = static_cast<double>(forecasts.size());

    const auto crps_series = score_cases(forecasts, observations, ScoreKind::CRPS);
    double acc = 0.0;
    for (const double s : crps_series) acc += s;
    report.mean_crps = acc / n;

    for (const double r : tw_thresholds) {
        const auto tw = score_cases(forecasts, observations, ScoreKind::TW_CRPS, r);
        acc = 0.0;
        for (const double s : tw) acc += s;
        report.mean_twcrps.emplace_back(r, acc / n);
    }

    const bool any_empirical =
        std::any_of(forecasts.begin(), forecasts.end(), [](const PredictiveDistribution& f) {
            return std::holds_alternative<EmpiricalDistribution>(f);
        });
    if (any_empirical) {
        report.mean_logs = kNan;
    } else {
        const auto logs = score_cases(forecasts, observations, ScoreKind::LOG_SCORE);
        acc = 0.0;
        for (const double s : logs) {
            if (std::isinf(s)) report.logs_infinite = true;
            acc += s;
        }
        report.mean_logs = acc / n;
    }

    const PointScores points = point_scores(forecasts, observations);
    report.mae_median = points.mae_median;
    report.rmse_mean = points.rmse_mean;

    const CoverageResult cov = coverage_and_width(forecasts, observations, nominal_pct);
    report.coverage_pct = cov.coverage_pct;
    report.avg_width = cov.avg_width;

    report.pit_values.reserve(forecasts.size());
    for (std::size_t i = 0; i < forecasts.size(); ++i) {
        if (const auto* emp = std::get_if<EmpiricalDistribution>(&forecasts[i])) {
            // An m-member empirical forecast has a step CDF taking only m + 1
            // levels, so the plain PIT stays discrete even for continuous
            // observations and moment-based uniformity testing degenerates on
            // it. The randomized PIT spreads the observation uniformly over
            // its rank interval: with c_lo members strictly below and c_hi at
            // or below the observation, (c_lo + V (c_hi - c_lo + 1)) / (m + 1)
            // is exactly standard uniform when the observation and the members
            // are exchangeable draws. The stream offset keeps these draws
            // independent of the rank-histogram tie-breaking below.
            const auto& v = emp->values();
            const double m = static_cast<double>(v.size());
            const double c_lo = static_cast<double>(
                std::lower_bound(v.begin(), v.end(), observations[i]) - v.begin());
            const double c_hi = static_cast<double>(
                std::upper_bound(v.begin(), v.end(), observations[i]) - v.begin());
            Rng rng(Rng::derive(seed, kPitStreamOffset + i));
            report.pit_values.push_back(
                (c_lo + rng.uniform01() * (c_hi - c_lo + 1.0)) / (m + 1.0));
        } else {
            report.pit_values.push_back(pit(forecasts[i], observations[i]));
        }
    }

    if (!members_per_case.empty()) {
        const std::size_t m = members_per_case.front().size();
        report.rank_counts.assign(m + 1, 0);
        for (std::size_t i = 0; i < members_per_case.size(); ++i) {
            Rng rng(Rng::derive(seed, i));
            const int rank = verification_rank(members_per_case[i], observations[i], rng);
            ++report.rank_counts[static_cast<std::size_t>(rank - 1)];
        }
    }
    return report;
}

}  // namespace emoscal
