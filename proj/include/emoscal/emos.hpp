#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "emoscal/dates.hpp"
#include "emoscal/distributions.hpp"

namespace emoscal {

/// Raised when a coefficient set maps an ensemble onto invalid distribution
/// parameters (nonpositive variance or nonpositive log-normal mean). The
/// estimation layer converts this into an infinite objective value.
class InfeasibleLink : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Partition of the ensemble into groups of statistically indistinguishable
/// members; members of one group share a single location coefficient.
class ExchangeableGrouping {
public:
    explicit ExchangeableGrouping(std::vector<int> group_sizes);

    const std::vector<int>& group_sizes() const { return sizes_; }
    int group_count() const { return static_cast<int>(sizes_.size()); }
    int member_count() const { return total_; }

private:
    std::vector<int> sizes_;
    int total_;
};

/// One ensemble forecast with its verifying observation (when available).
/// Members are ordered group by group, consistent with the grouping.
struct ForecastCase {
    Date date;
    std::string station_id;
    std::vector<double> members;
    std::optional<double> observation;
};

/// Symmetric ensemble summaries consumed by the link functions.
struct EnsembleStats {
    std::vector<double> group_sums;
    double mean = 0.0;
    double variance = 0.0;  // sample variance with the full-ensemble mean
    double median = 0.0;
};

enum class ModelKind { TN, LN, MIXTURE, REGIME_SWITCH };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& text);

/// Location/scale coefficients of the truncated-normal link:
/// location = a0 + sum_k a[k] * group_sum_k, variance = b0 + b1 * S^2.
struct TnCoefficients {
    double a0 = 0.0;
    std::vector<double> a;
    double b0 = 0.0;
    double b1 = 0.0;
};

/// Mean/variance coefficients of the log-normal link:
/// m = alpha0 + sum_k alpha[k] * group_sum_k, v = beta0 + beta1 * S^2.
struct LnCoefficients {
    double alpha0 = 0.0;
    std::vector<double> alpha;
    double beta0 = 0.0;
    double beta1 = 0.0;
};

/// Full parameter set of one model. Which blocks are present depends on the
/// kind: TN and LN carry their own block, MIXTURE carries both plus the
/// weight, REGIME_SWITCH carries both plus the threshold.
struct CoefficientSet {
    ModelKind kind = ModelKind::TN;
    std::optional<TnCoefficients> tn;
    std::optional<LnCoefficients> ln;
    std::optional<double> weight;
    std::optional<double> threshold;

    void validate(int group_count) const;
};

EnsembleStats ensemble_stats(const ForecastCase& forecast_case,
                             const ExchangeableGrouping& grouping);

TruncatedNormal link_tn(const CoefficientSet& coeffs, const EnsembleStats& stats);
LogNormal link_ln(const CoefficientSet& coeffs, const EnsembleStats& stats);
TnLnMixture link_mixture(const CoefficientSet& coeffs, const EnsembleStats& stats);
PredictiveDistribution link_regime_switch(const CoefficientSet& coeffs, const EnsembleStats& stats);

/// Dispatches on coeffs.kind.
PredictiveDistribution link(const CoefficientSet& coeffs, const EnsembleStats& stats);

EmpiricalDistribution empirical_forecast(const std::vector<double>& values);

}  // namespace emoscal
