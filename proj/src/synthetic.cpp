#include "emoscal/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "emoscal/distributions.hpp"
#include "emoscal/rng.hpp"

namespace emoscal {

namespace {

constexpr int kMaxRedraws = 100;

// Stream ids: station-level paths live in one block, per-cell case streams in
// another, so the two can never collide.
constexpr std::uint64_t kLevelStreamBase = 0x4c45564c00000000ull;
constexpr std::uint64_t kCaseStreamBase = 0x0000000100000000ull;

std::string station_name(const int index)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "S%03d", index + 1);
    return std::string(buf);
}

// Reflects a proposed level back into [lo, hi].  Each pass folds the
// excursion at the violated bound; large excursions shrink by 2*(hi-lo) per
// round trip, so the loop terminates.
double reflect(double level, const double lo, const double hi)
{
    while (level < lo || level > hi) {
        if (level < lo) level = 2.0 * lo - level;
        if (level > hi) level = 2.0 * hi - level;
    }
    return level;
}

void validate(const ScenarioSpec& spec)
{
    if (spec.n_days < 1) throw std::invalid_argument("generate: n_days must be at least 1");
    if (spec.n_stations < 1)
        throw std::invalid_argument("generate: n_stations must be at least 1");
    if (spec.grouping.member_count() < 2)
        throw std::invalid_argument("generate: need at least 2 ensemble members");
    if (!spec.process.group_bias.empty() &&
        spec.process.group_bias.size() != static_cast<std::size_t>(spec.grouping.group_count()))
        throw std::invalid_argument("generate: group_bias length must match the group count");
    if (!(spec.process.base_level > 0.0))
        throw std::invalid_argument("generate: base_level must be positive");
    if (!(spec.process.daily_sd >= 0.0))
        throw std::invalid_argument("generate: daily_sd must be non-negative");
    if (!(spec.process.member_spread >= 0.0))
        throw std::invalid_argument("generate: member_spread must be non-negative");
    spec.truth_model.validate(spec.grouping.group_count());
}

}  // namespace

std::vector<ForecastCase> generate(const ScenarioSpec& spec)
{
    validate(spec);

    const int n_groups = spec.grouping.group_count();
    const int n_members = spec.grouping.member_count();
    const std::vector<double> zero_bias(static_cast<std::size_t>(n_groups), 0.0);
    const std::vector<double>& bias =
        spec.process.group_bias.empty() ? zero_bias : spec.process.group_bias;

    const double lo = 0.5 * spec.process.base_level;
    const double hi = 1.5 * spec.process.base_level;

    // One independent level path per station.
    std::vector<std::vector<double>> levels(static_cast<std::size_t>(spec.n_stations));
    for (int s = 0; s < spec.n_stations; ++s) {
        Rng walk(Rng::derive(spec.seed, kLevelStreamBase + static_cast<std::uint64_t>(s)));
        double level = spec.process.base_level;
        auto& path = levels[static_cast<std::size_t>(s)];
        path.reserve(static_cast<std::size_t>(spec.n_days));
        for (int d = 0; d < spec.n_days; ++d) {
            path.push_back(level);
            level = reflect(level + spec.process.daily_sd * walk.normal(), lo, hi);
        }
    }

    std::vector<ForecastCase> cases;
    cases.reserve(static_cast<std::size_t>(spec.n_days) * static_cast<std::size_t>(spec.n_stations));
    for (int d = 0; d < spec.n_days; ++d) {
        const Date date = spec.start_date.plus_days(d);
        for (int s = 0; s < spec.n_stations; ++s) {
            // Nested derivation (day, then station) keeps every cell's stream
            // independent of the grid dimensions.
            const std::uint64_t day_key =
                Rng::derive(spec.seed, kCaseStreamBase + static_cast<std::uint64_t>(d));
            Rng rng(Rng::derive(day_key, static_cast<std::uint64_t>(s)));
            const double level = levels[static_cast<std::size_t>(s)][static_cast<std::size_t>(d)];

            ForecastCase fc;
            fc.date = date;
            fc.station_id = station_name(s);
            fc.members.resize(static_cast<std::size_t>(n_members));

            bool done = false;
            for (int attempt = 0; attempt < kMaxRedraws && !done; ++attempt) {
                std::size_t pos = 0;
                for (int g = 0; g < n_groups; ++g) {
                    const double center = level + bias[static_cast<std::size_t>(g)];
                    for (int j = 0; j < spec.grouping.group_sizes()[static_cast<std::size_t>(g)];
                         ++j) {
                        fc.members[pos++] =
                            std::max(0.0, center + spec.process.member_spread * rng.normal());
                    }
                }
                try {
                    const PredictiveDistribution truth =
                        link(spec.truth_model, ensemble_stats(fc, spec.grouping));
                    fc.observation = sample(truth, rng);
                    done = true;
                } catch (const InfeasibleLink&) {
                    // Redraw the ensemble; the stream keeps advancing so the
                    // retry stays deterministic.
                }
            }
            if (!done)
                throw std::runtime_error("generate: truth model infeasible at " + date.to_string() +
                                         " " + fc.station_id + " after repeated redraws");
            cases.push_back(std::move(fc));
        }
    }
    return cases;
}

}  // namespace emoscal
