#pragma once

#include <cstdint>
#include <vector>

#include "emoscal/dates.hpp"
#include "emoscal/emos.hpp"

namespace emoscal {

/// Controls for the latent weather process that drives the synthetic ensemble.
///
/// Each station carries a mean-reverting level (a reflected random walk kept
/// inside [0.5 * base_level, 1.5 * base_level]).  Members scatter around that
/// level with independent Gaussian noise plus a per-group additive bias, then
/// get clipped at zero so the ensemble looks like wind speeds.
struct MemberProcess {
    double base_level = 8.0;
    double daily_sd = 1.2;
    double member_spread = 1.5;
    /// One additive bias per exchangeable group; empty means all zeros.
    std::vector<double> group_bias;
};

/// Full description of a synthetic experiment.
///
/// The observation for each case is sampled from the truth model applied to
/// that case's own ensemble, so the generated stream is calibrated by
/// construction with respect to `truth_model`.
struct ScenarioSpec {
    int n_days = 0;
    int n_stations = 0;
    ExchangeableGrouping grouping;
    MemberProcess process;
    CoefficientSet truth_model;
    std::uint64_t seed = 0;
    Date start_date{2020, 1, 1};
};

/// Generates the full case list for a scenario, sorted by (date, station).
///
/// Deterministic: the same spec always produces the same cases, regardless of
/// platform or thread count.  Every station and every (day, station) cell gets
/// its own derived RNG stream, so changing n_days or n_stations does not
/// reshuffle the values of unrelated cells.
///
/// Throws std::invalid_argument for non-positive sizes, a group bias list of
/// the wrong length, or an invalid truth model; throws std::runtime_error if
/// the truth model stays infeasible for some cell after repeated redraws.
std::vector<ForecastCase> generate(const ScenarioSpec& spec);

}  // namespace emoscal
