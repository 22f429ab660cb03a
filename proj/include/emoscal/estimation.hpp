#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "emoscal/emos.hpp"

namespace emoscal {

enum class Objective { MIN_CRPS, MAX_LIKELIHOOD };
enum class Pooling { REGIONAL, LOCAL };

std::string to_string(Objective objective);
Objective objective_from_string(const std::string& text);
std::string to_string(Pooling pooling);
Pooling pooling_from_string(const std::string& text);

struct TrainingConfig {
    int window_days = 20;
    Objective objective = Objective::MIN_CRPS;
    ModelKind model_kind = ModelKind::TN;
    Pooling pooling = Pooling::REGIONAL;
    std::optional<double> threshold;

    void validate() const;
};

struct FitResult {
    CoefficientSet coefficients;
    double objective_value = 0.0;
    std::size_t iterations = 0;  // objective evaluations spent
    bool converged = false;
};

/// Arithmetic mean of the per-case score of the linked distribution at the
/// verifying observation; +infinity as soon as any link is infeasible.
double mean_objective(const CoefficientSet& coeffs, const std::vector<ForecastCase>& cases,
                      const ExchangeableGrouping& grouping, Objective objective);

/// Documented default starting coefficients: intercepts zero, location weights
/// spreading unit mass over the groups so the start tracks the ensemble mean,
/// unit variance coefficients, weight one half.
CoefficientSet default_start(ModelKind kind, const ExchangeableGrouping& grouping,
                             std::optional<double> threshold);

/// Minimizes the mean training score over the unconstrained internal
/// parameterization (variance coefficients squared, weight through a
/// logistic). The returned objective value never exceeds the value at the
/// warm start or at the default start.
FitResult fit(const std::vector<ForecastCase>& cases, const ExchangeableGrouping& grouping,
              const TrainingConfig& config,
              const std::optional<CoefficientSet>& warm_start = std::nullopt);

enum class WarmStartMode {
    CHAINED,     // warm-start each date from the previous date's fit (sequential)
    INDEPENDENT  // every date starts from the default; dates may run in parallel
};

struct CasePrediction {
    std::size_t case_index;  // index into the dataset passed in
    PredictiveDistribution distribution;
};

struct DateCalibration {
    Date date;
    // One fit per coefficient scope: a single ""-keyed entry under REGIONAL
    // pooling, one entry per station under LOCAL pooling.
    std::vector<std::pair<std::string, FitResult>> fits;
    std::vector<CasePrediction> predictions;
};

/// For each date with a full training window, fits on the window_days
/// calendar days strictly before it and links every case of that date.
/// Throws when a required training set is empty after dropping cases with
/// missing observations.
std::vector<DateCalibration> rolling_calibrate(const std::vector<ForecastCase>& dataset,
                                               const ExchangeableGrouping& grouping,
                                               const TrainingConfig& config,
                                               WarmStartMode mode = WarmStartMode::CHAINED,
                                               unsigned threads = 1);

struct ClimatologyCalibration {
    Date date;
    std::vector<CasePrediction> predictions;
};

/// Same windowing as rolling_calibrate, but the predictive distribution is
/// the empirical distribution of the training observations.
std::vector<ClimatologyCalibration> climatology_calibrate(
    const std::vector<ForecastCase>& dataset, const TrainingConfig& config);

}  // namespace emoscal
