#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "emoscal/distributions.hpp"

namespace emoscal {

class Rng;

enum class ScoreKind { CRPS, LOG_SCORE, TW_CRPS };

std::string to_string(ScoreKind kind);
ScoreKind score_kind_from_string(const std::string& text);

/// Per-case scores, aligned with the forecast/observation sequence.
/// TW_CRPS requires a threshold and integrates the squared CDF-indicator
/// discrepancy over [threshold, infinity) only.
std::vector<double> score_cases(const std::vector<PredictiveDistribution>& forecasts,
                                const std::vector<double>& observations, ScoreKind kind,
                                std::optional<double> threshold = std::nullopt);

/// Threshold-weighted CRPS of one forecast; exact piecewise evaluation for
/// empirical forecasts, adaptive quadrature otherwise.
double tw_crps(const PredictiveDistribution& forecast, double obs, double threshold);

/// Skill score 1 - tw/tw_ref; positive means better than the reference.
double twcrpss(double mean_tw_forecast, double mean_tw_reference);

struct PointScores {
    double mae_median;
    double rmse_mean;
};

PointScores point_scores(const std::vector<PredictiveDistribution>& forecasts,
                         const std::vector<double>& observations);

/// Probability integral transform: predictive CDF at the observation.
double pit(const PredictiveDistribution& forecast, double obs);

/// Rank of the observation among the ensemble members, in 1..M+1, with ties
/// resolved by uniform randomization over the admissible ranks.
int verification_rank(const std::vector<double>& members, double obs, Rng& rng);

struct CoverageResult {
    double coverage_pct;
    double avg_width;
};

/// Central prediction interval [q(alpha/2), q(1-alpha/2)], closed at both
/// ends, with alpha = 1 - nominal_pct/100.
CoverageResult coverage_and_width(const std::vector<PredictiveDistribution>& forecasts,
                                  const std::vector<double>& observations, double nominal_pct);

struct DmResult {
    double t_stat = 0.0;
    double p_value = 1.0;
    int lag = 1;
    bool degenerate = false;  // variance estimate fell back or collapsed
};

/// Diebold-Mariano test of equal predictive performance. Negative statistics
/// favor the first score series. The variance uses autocovariances up to
/// lag-1; a nonpositive truncated sum falls back to the lag-0 term alone.
DmResult dm_test(const std::vector<double>& scores_f, const std::vector<double>& scores_g,
                 int lag);

struct UniformityResult {
    double statistic;
    double p_value;
};

/// Wald test comparing the first four sample moments of the centered PIT
/// values against the exact uniform moments, with a Bartlett-kernel
/// autocorrelation-consistent covariance truncated at lag_truncation;
/// referred to chi-square with 4 degrees of freedom.
UniformityResult uniformity_test(const std::vector<double>& pit_values, int lag_truncation);

/// Fraction of n_samples random subsamples (drawn without replacement) whose
/// uniformity test rejects at the given level.
double bootstrap_rejection_rate(const std::vector<double>& pit_values, int n_samples,
                                int sample_size, double level, std::uint64_t seed,
                                unsigned threads = 1);

double series_correlation(const std::vector<double>& a, const std::vector<double>& b);

/// Bin counts over [lo, hi); values on the upper edge land in the last bin.
std::vector<int> histogram_counts(const std::vector<double>& values, int bins, double lo,
                                  double hi);

struct VerificationReport {
    double mean_crps = 0.0;
    std::vector<std::pair<double, double>> mean_twcrps;  // (threshold, mean score)
    double mean_logs = 0.0;
    bool logs_infinite = false;  // some case had infinite log score
    double mae_median = 0.0;
    double rmse_mean = 0.0;
    double coverage_pct = 0.0;
    double avg_width = 0.0;
    std::vector<double> pit_values;
    std::vector<int> rank_counts;  // empty unless ensemble members were supplied
};

/// Full scoring battery over one forecast sequence. members_per_case feeds
/// the rank histogram and may be empty; log scores are reported as NaN when
/// any forecast is empirical (no density).
VerificationReport build_report(const std::vector<PredictiveDistribution>& forecasts,
                                const std::vector<double>& observations,
                                const std::vector<double>& tw_thresholds, double nominal_pct,
                                const std::vector<std::vector<double>>& members_per_case,
                                std::uint64_t seed);

}  // namespace emoscal
