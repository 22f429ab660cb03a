#include "emoscal/emos.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace emoscal {

ExchangeableGrouping::ExchangeableGrouping(std::vector<int> group_sizes)
    : sizes_(std::move(group_sizes))
{
    if (sizes_.empty()) throw std::invalid_argument("ExchangeableGrouping: needs at least one group");
    for (const int s : sizes_)
        if (s < 1) throw std::invalid_argument("ExchangeableGrouping: group sizes must be positive");
    total_ = std::accumulate(sizes_.begin(), sizes_.end(), 0);
}

std::string to_string(const ModelKind kind)
{
    switch (kind) {
        case ModelKind::TN: return "TN";
        case ModelKind::LN: return "LN";
        case ModelKind::MIXTURE: return "MIXTURE";
        case ModelKind::REGIME_SWITCH: return "REGIME_SWITCH";
    }
    throw std::logic_error("to_string: unknown ModelKind");
}

ModelKind model_kind_from_string(const std::string& text)
{
    if (text == "TN") return ModelKind::TN;
    if (text == "LN") return ModelKind::LN;
    if (text == "MIXTURE") return ModelKind::MIXTURE;
    if (text == "REGIME_SWITCH") return ModelKind::REGIME_SWITCH;
    throw std::invalid_argument("unknown model kind '" + text + "'");
}

void CoefficientSet::validate(const int group_count) const
{
    const bool needs_tn = kind != ModelKind::LN;
    const bool needs_ln = kind != ModelKind::TN;
    if (needs_tn) {
        if (!tn) throw std::invalid_argument("CoefficientSet: missing TN block");
        if (static_cast<int>(tn->a.size()) != group_count)
            throw std::invalid_argument("CoefficientSet: TN coefficient count mismatch");
        if (tn->b0 < 0.0 || tn->b1 < 0.0)
            throw std::invalid_argument("CoefficientSet: negative TN variance coefficients");
    }
    if (needs_ln) {
        if (!ln) throw std::invalid_argument("CoefficientSet: missing LN block");
        if (static_cast<int>(ln->alpha.size()) != group_count)
            throw std::invalid_argument("CoefficientSet: LN coefficient count mismatch");
        if (ln->beta0 < 0.0 || ln->beta1 < 0.0)
            throw std::invalid_argument("CoefficientSet: negative LN variance coefficients");
    }
    if (kind == ModelKind::MIXTURE) {
        if (!weight || !(*weight >= 0.0 && *weight <= 1.0))
            throw std::invalid_argument("CoefficientSet: MIXTURE needs a weight in [0,1]");
    }
    if (kind == ModelKind::REGIME_SWITCH) {
        if (!threshold || !(*threshold > 0.0))
            throw std::invalid_argument("CoefficientSet: REGIME_SWITCH needs a positive threshold");
    }
}

EnsembleStats ensemble_stats(const ForecastCase& forecast_case,
                             const ExchangeableGrouping& grouping)
{
    const auto& members = forecast_case.members;
    const int m_total = grouping.member_count();
    if (static_cast<int>(members.size()) != m_total)
        throw std::invalid_argument("ensemble_stats: member count does not match grouping");
    if (m_total < 2) throw std::invalid_argument("ensemble_stats: variance needs at least 2 members");

    // Canonicalize by sorting within each group, so that every accumulation
    // below is bit-identical under permutations of exchangeable members.
    std::vector<double> canon = members;
    {
        std::size_t offset = 0;
        for (const int size : grouping.group_sizes()) {
            std::sort(canon.begin() + static_cast<std::ptrdiff_t>(offset),
                      canon.begin() + static_cast<std::ptrdiff_t>(offset + size));
            offset += static_cast<std::size_t>(size);
        }
    }

    EnsembleStats stats;
    stats.group_sums.reserve(grouping.group_sizes().size());
    std::size_t offset = 0;
    for (const int size : grouping.group_sizes()) {
        double sum = 0.0;
        for (int j = 0; j < size; ++j) sum += canon[offset + j];
        stats.group_sums.push_back(sum);
        offset += size;
    }

    stats.mean = std::accumulate(canon.begin(), canon.end(), 0.0) / m_total;
    double ss = 0.0;
    for (const double f : canon) {
        const double d = f - stats.mean;
        ss += d * d;
    }
    stats.variance = ss / (m_total - 1);

    std::vector<double> sorted = std::move(canon);
    std::sort(sorted.begin(), sorted.end());
    const std::size_t half = sorted.size() / 2;
    stats.median = sorted.size() % 2 == 1 ? sorted[half]
                                          : 0.5 * (sorted[half - 1] + sorted[half]);
    return stats;
}

namespace {

double affine(const double intercept, const std::vector<double>& slopes,
              const std::vector<double>& group_sums)
{
    if (slopes.size() != group_sums.size())
        throw std::invalid_argument("link: coefficient count does not match group count");
    double out = intercept;
    for (std::size_t k = 0; k < slopes.size(); ++k) out += slopes[k] * group_sums[k];
    return out;
}

}  // namespace

TruncatedNormal link_tn(const CoefficientSet& coeffs, const EnsembleStats& stats)
{
    if (!coeffs.tn) throw std::invalid_argument("link_tn: coefficient set lacks a TN block");
    const auto& c = *coeffs.tn;
    const double location = affine(c.a0, c.a, stats.group_sums);
    const double variance = c.b0 + c.b1 * stats.variance;
    if (!(variance > 0.0))
        throw InfeasibleLink("link_tn: nonpositive predictive variance");
    return TruncatedNormal(location, std::sqrt(variance));
}

LogNormal link_ln(const CoefficientSet& coeffs, const EnsembleStats& stats)
{
    if (!coeffs.ln) throw std::invalid_argument("link_ln: coefficient set lacks an LN block");
    const auto& c = *coeffs.ln;
    const double m = affine(c.alpha0, c.alpha, stats.group_sums);
    const double v = c.beta0 + c.beta1 * stats.variance;
    if (!(m > 0.0)) throw InfeasibleLink("link_ln: nonpositive predictive mean");
    if (!(v > 0.0)) throw InfeasibleLink("link_ln: nonpositive predictive variance");
    return LogNormal::from_mean_variance(m, v);
}

TnLnMixture link_mixture(const CoefficientSet& coeffs, const EnsembleStats& stats)
{
    if (coeffs.kind != ModelKind::MIXTURE || !coeffs.weight)
        throw std::invalid_argument("link_mixture: coefficient set is not a mixture");
    return TnLnMixture(*coeffs.weight, link_tn(coeffs, stats), link_ln(coeffs, stats));
}

PredictiveDistribution link_regime_switch(const CoefficientSet& coeffs, const EnsembleStats& stats)
{
    if (coeffs.kind != ModelKind::REGIME_SWITCH || !coeffs.threshold)
        throw std::invalid_argument("link_regime_switch: coefficient set is not regime-switching");
    if (stats.median < *coeffs.threshold) return link_tn(coeffs, stats);
    return link_ln(coeffs, stats);
}

PredictiveDistribution link(const CoefficientSet& coeffs, const EnsembleStats& stats)
{
    switch (coeffs.kind) {
        case ModelKind::TN: return link_tn(coeffs, stats);
        case ModelKind::LN: return link_ln(coeffs, stats);
        case ModelKind::MIXTURE: return link_mixture(coeffs, stats);
        case ModelKind::REGIME_SWITCH: return link_regime_switch(coeffs, stats);
    }
    throw std::logic_error("link: unknown ModelKind");
}

EmpiricalDistribution empirical_forecast(const std::vector<double>& values)
{
    return EmpiricalDistribution(values);
}

}  // namespace emoscal
