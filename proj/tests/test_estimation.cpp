#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "emoscal/estimation.hpp"
#include "emoscal/rng.hpp"

using namespace emoscal;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Deterministic toy dataset: wind-speed-like members around a wandering
/// level, observations generated from the ensemble mean plus noise.
std::vector<ForecastCase> toy_dataset(const int n_days, const int n_stations, const int n_members,
                                      const std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<ForecastCase> out;
    const Date start{2021, 6, 1};
    for (int d = 0; d < n_days; ++d) {
        for (int s = 0; s < n_stations; ++s) {
            ForecastCase fc;
            fc.date = start.plus_days(d);
            fc.station_id = "S" + std::to_string(s + 1);
            const double level = 7.0 + 2.0 * std::sin(0.37 * d) + 0.8 * rng.normal() + 0.4 * s;
            double mean = 0.0;
            fc.members.resize(n_members);
            for (double& m : fc.members) {
                m = std::max(0.0, level + 1.1 * rng.normal());
                mean += m;
            }
            mean /= n_members;
            fc.observation = std::max(0.0, mean + 1.3 * rng.normal());
            out.push_back(std::move(fc));
        }
    }
    return out;
}

CoefficientSet tn_coeffs(double a0, std::vector<double> a, double b0, double b1)
{
    CoefficientSet c;
    c.kind = ModelKind::TN;
    c.tn = TnCoefficients{a0, std::move(a), b0, b1};
    return c;
}

}  // namespace

TEST_CASE("objective and pooling names round trip")
{
    CHECK(objective_from_string(to_string(Objective::MIN_CRPS)) == Objective::MIN_CRPS);
    CHECK(objective_from_string(to_string(Objective::MAX_LIKELIHOOD)) == Objective::MAX_LIKELIHOOD);
    CHECK(pooling_from_string(to_string(Pooling::REGIONAL)) == Pooling::REGIONAL);
    CHECK(pooling_from_string(to_string(Pooling::LOCAL)) == Pooling::LOCAL);
    CHECK_THROWS_AS(objective_from_string("MEAN_ERROR"), std::invalid_argument);
    CHECK_THROWS_AS(pooling_from_string("GLOBAL"), std::invalid_argument);
}

TEST_CASE("training config validation")
{
    TrainingConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.window_days = 1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.window_days = 20;
    cfg.model_kind = ModelKind::REGIME_SWITCH;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);  // threshold missing
    cfg.threshold = 8.0;
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("default start spreads unit mass over the groups")
{
    const ExchangeableGrouping g({4, 3, 1});
    const CoefficientSet c = default_start(ModelKind::TN, g, std::nullopt);
    REQUIRE(c.tn.has_value());
    CHECK(c.tn->a0 == 0.0);
    REQUIRE(c.tn->a.size() == 3);
    CHECK(c.tn->a[0] == doctest::Approx(1.0 / 12.0).epsilon(1e-15));
    CHECK(c.tn->a[1] == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
    CHECK(c.tn->a[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(c.tn->b0 == 1.0);
    CHECK(c.tn->b1 == 1.0);
    CHECK_FALSE(c.ln.has_value());

    const CoefficientSet mix = default_start(ModelKind::MIXTURE, g, std::nullopt);
    CHECK(mix.weight == 0.5);
    REQUIRE(mix.ln.has_value());
    CHECK(mix.ln->alpha[1] == doctest::Approx(1.0 / 9.0).epsilon(1e-15));

    const CoefficientSet rs = default_start(ModelKind::REGIME_SWITCH, g, 7.5);
    CHECK(rs.threshold == 7.5);
    CHECK_NOTHROW(rs.validate(3));
    CHECK_NOTHROW(mix.validate(3));
}

TEST_CASE("mean objective equals the hand-rolled case average")
{
    const ExchangeableGrouping g({2, 2});
    const auto cases = toy_dataset(3, 2, 4, 11);
    const CoefficientSet c = tn_coeffs(0.3, {0.12, 0.13}, 0.6, 0.5);

    double total_crps = 0.0, total_logs = 0.0;
    for (const auto& fc : cases) {
        const auto dist = link(c, ensemble_stats(fc, g));
        total_crps += crps(dist, *fc.observation);
        total_logs += log_score(dist, *fc.observation);
    }
    CHECK(mean_objective(c, cases, g, Objective::MIN_CRPS) == total_crps / cases.size());
    CHECK(mean_objective(c, cases, g, Objective::MAX_LIKELIHOOD) == total_logs / cases.size());
}

TEST_CASE("mean objective: infeasible links and bad inputs")
{
    const ExchangeableGrouping g({2, 2});
    auto cases = toy_dataset(2, 1, 4, 12);

    // zero predictive variance is infeasible for every case
    CHECK(mean_objective(tn_coeffs(0.3, {0.12, 0.13}, 0.0, 0.0), cases, g, Objective::MIN_CRPS) ==
          kInf);

    // validation failures surface as exceptions, not as infinities
    CHECK_THROWS_AS(mean_objective(tn_coeffs(0.3, {0.12}, 0.6, 0.5), cases, g,
                                   Objective::MIN_CRPS),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        mean_objective(tn_coeffs(0.3, {0.12, 0.13}, -0.6, 0.5), cases, g, Objective::MIN_CRPS),
        std::invalid_argument);

    cases[1].observation.reset();
    CHECK_THROWS_AS(mean_objective(tn_coeffs(0.3, {0.12, 0.13}, 0.6, 0.5), cases, g,
                                   Objective::MIN_CRPS),
                    std::invalid_argument);
    CHECK_THROWS_AS(mean_objective(tn_coeffs(0.3, {0.12, 0.13}, 0.6, 0.5), {}, g,
                                   Objective::MIN_CRPS),
                    std::invalid_argument);
}

TEST_CASE("degenerate mixture weights reproduce the single-family objectives")
{
    const ExchangeableGrouping g({2, 2});
    const auto cases = toy_dataset(4, 2, 4, 13);

    CoefficientSet mix;
    mix.kind = ModelKind::MIXTURE;
    mix.tn = TnCoefficients{0.3, {0.12, 0.13}, 0.6, 0.5};
    mix.ln = LnCoefficients{0.2, {0.11, 0.14}, 0.7, 0.4};
    mix.weight = 1.0;

    CoefficientSet tn_only = tn_coeffs(0.3, {0.12, 0.13}, 0.6, 0.5);
    CHECK(mean_objective(mix, cases, g, Objective::MIN_CRPS) ==
          mean_objective(tn_only, cases, g, Objective::MIN_CRPS));

    mix.weight = 0.0;
    CoefficientSet ln_only;
    ln_only.kind = ModelKind::LN;
    ln_only.ln = mix.ln;
    CHECK(mean_objective(mix, cases, g, Objective::MIN_CRPS) ==
          mean_objective(ln_only, cases, g, Objective::MIN_CRPS));
}

TEST_CASE("fit: TN on a small window")
{
    const ExchangeableGrouping g({2, 2});
    const auto cases = toy_dataset(10, 4, 4, 21);  // 40 cases
    TrainingConfig cfg;
    cfg.model_kind = ModelKind::TN;
    cfg.objective = Objective::MIN_CRPS;

    const FitResult fr = fit(cases, g, cfg);
    CHECK(fr.converged);
    CHECK(fr.iterations > 0);
    REQUIRE(fr.coefficients.tn.has_value());
    CHECK_NOTHROW(fr.coefficients.validate(2));

    // the reported value is exactly the training objective of the coefficients
    CHECK(mean_objective(fr.coefficients, cases, g, Objective::MIN_CRPS) == fr.objective_value);

    // and it improves on the documented default start
    const double at_default = mean_objective(default_start(ModelKind::TN, g, std::nullopt), cases,
                                             g, Objective::MIN_CRPS);
    CHECK(fr.objective_value <= at_default);
}

TEST_CASE("fit: warm starts can only help")
{
    const ExchangeableGrouping g({2, 2});
    const auto cases = toy_dataset(10, 4, 4, 22);
    TrainingConfig cfg;
    cfg.model_kind = ModelKind::TN;

    const CoefficientSet bogus = tn_coeffs(9.0, {-0.5, 0.7}, 16.0, 9.0);
    const FitResult fr = fit(cases, g, cfg, bogus);
    CHECK(fr.objective_value <= mean_objective(bogus, cases, g, cfg.objective));
    CHECK(fr.objective_value <=
          mean_objective(default_start(ModelKind::TN, g, std::nullopt), cases, g, cfg.objective));

    CoefficientSet wrong_kind = bogus;
    wrong_kind.kind = ModelKind::LN;
    CHECK_THROWS_AS(fit(cases, g, cfg, wrong_kind), std::invalid_argument);
}

TEST_CASE("fit: mixture nests both single families")
{
    const ExchangeableGrouping g({2, 2});
    const auto cases = toy_dataset(10, 4, 4, 23);
    TrainingConfig cfg;
    cfg.objective = Objective::MAX_LIKELIHOOD;  // closed-form scores keep this test quick

    cfg.model_kind = ModelKind::TN;
    const FitResult tn = fit(cases, g, cfg);
    cfg.model_kind = ModelKind::LN;
    const FitResult ln = fit(cases, g, cfg);
    cfg.model_kind = ModelKind::MIXTURE;
    const FitResult mix = fit(cases, g, cfg);

    REQUIRE(mix.coefficients.kind == ModelKind::MIXTURE);
    REQUIRE(mix.coefficients.weight.has_value());
    CHECK(mix.objective_value <= tn.objective_value);
    CHECK(mix.objective_value <= ln.objective_value);
    CHECK(mean_objective(mix.coefficients, cases, g, cfg.objective) == mix.objective_value);
}

TEST_CASE("fit: regime switching carries both blocks and the threshold")
{
    const ExchangeableGrouping g({2, 2});
    const auto cases = toy_dataset(10, 4, 4, 24);
    TrainingConfig cfg;
    cfg.objective = Objective::MAX_LIKELIHOOD;
    cfg.model_kind = ModelKind::REGIME_SWITCH;
    cfg.threshold = 7.0;

    const FitResult fr = fit(cases, g, cfg);
    REQUIRE(fr.coefficients.kind == ModelKind::REGIME_SWITCH);
    CHECK(fr.coefficients.tn.has_value());
    CHECK(fr.coefficients.ln.has_value());
    CHECK(fr.coefficients.threshold == 7.0);
    CHECK(fr.objective_value <=
          mean_objective(default_start(ModelKind::REGIME_SWITCH, g, cfg.threshold), cases, g,
                         cfg.objective));
    CHECK(mean_objective(fr.coefficients, cases, g, cfg.objective) == fr.objective_value);
}

TEST_CASE("rolling calibration: window edges and regional structure")
{
    const ExchangeableGrouping g({2, 2});
    const auto dataset = toy_dataset(30, 2, 4, 31);
    TrainingConfig cfg;
    cfg.window_days = 20;
    cfg.model_kind = ModelKind::TN;

    const auto cal = rolling_calibrate(dataset, g, cfg);
    REQUIRE(cal.size() == 10);  // days 21..30 have a full window
    CHECK(cal.front().date == Date{2021, 6, 21});
    CHECK(cal.back().date == Date{2021, 6, 30});
    for (const auto& dc : cal) {
        REQUIRE(dc.fits.size() == 1);
        CHECK(dc.fits[0].first.empty());
        REQUIRE(dc.predictions.size() == 2);
        for (const auto& p : dc.predictions) {
            CHECK(dataset[p.case_index].date == dc.date);
            // the stored forecast is the fitted link applied to that case
            const auto expected =
                link(dc.fits[0].second.coefficients, ensemble_stats(dataset[p.case_index], g));
            CHECK(crps(p.distribution, 1.7) == crps(expected, 1.7));
        }
    }
}

TEST_CASE("rolling calibration: local pooling fits one model per station")
{
    const ExchangeableGrouping g({2, 2});
    const auto dataset = toy_dataset(24, 2, 4, 32);
    TrainingConfig cfg;
    cfg.window_days = 20;
    cfg.model_kind = ModelKind::TN;
    cfg.objective = Objective::MAX_LIKELIHOOD;
    cfg.pooling = Pooling::LOCAL;

    const auto cal = rolling_calibrate(dataset, g, cfg);
    REQUIRE(cal.size() == 4);
    for (const auto& dc : cal) {
        REQUIRE(dc.fits.size() == 2);
        CHECK(dc.fits[0].first == "S1");
        CHECK(dc.fits[1].first == "S2");
        CHECK(dc.fits[0].second.objective_value != dc.fits[1].second.objective_value);
    }
}

TEST_CASE("rolling calibration: independent mode is thread-count invariant")
{
    const ExchangeableGrouping g({2, 2});
    const auto dataset = toy_dataset(24, 2, 4, 33);
    TrainingConfig cfg;
    cfg.window_days = 20;
    cfg.model_kind = ModelKind::TN;
    cfg.objective = Objective::MAX_LIKELIHOOD;

    const auto serial = rolling_calibrate(dataset, g, cfg, WarmStartMode::INDEPENDENT, 1);
    const auto parallel = rolling_calibrate(dataset, g, cfg, WarmStartMode::INDEPENDENT, 3);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].date == parallel[i].date);
        REQUIRE(serial[i].fits.size() == parallel[i].fits.size());
        CHECK(serial[i].fits[0].second.objective_value ==
              parallel[i].fits[0].second.objective_value);
        REQUIRE(serial[i].predictions.size() == parallel[i].predictions.size());
        for (std::size_t j = 0; j < serial[i].predictions.size(); ++j)
            CHECK(crps(serial[i].predictions[j].distribution, 2.3) ==
                  crps(parallel[i].predictions[j].distribution, 2.3));
    }
}

TEST_CASE("climatology calibration: training observations become the forecast")
{
    std::vector<ForecastCase> dataset;
    const Date start{2022, 1, 1};
    for (int d = 0; d < 4; ++d)
        for (int s = 0; s < 2; ++s) {
            ForecastCase fc;
            fc.date = start.plus_days(d);
            fc.station_id = s == 0 ? "A" : "B";
            fc.members = {1.0, 2.0};
            fc.observation = 10.0 * (d + 1) + s;  // day 1: 10, 11; day 2: 20, 21; ...
            dataset.push_back(std::move(fc));
        }

    TrainingConfig cfg;
    cfg.window_days = 2;
    const auto cal = climatology_calibrate(dataset, cfg);
    REQUIRE(cal.size() == 2);  // days 3 and 4
    CHECK(cal[0].date == Date{2022, 1, 3});
    const auto& dist = std::get<EmpiricalDistribution>(cal[0].predictions[0].distribution);
    CHECK(dist.values() == std::vector<double>{10.0, 11.0, 20.0, 21.0});

    cfg.pooling = Pooling::LOCAL;
    const auto local = climatology_calibrate(dataset, cfg);
    const auto& da = std::get<EmpiricalDistribution>(local[0].predictions[0].distribution);
    const auto& db = std::get<EmpiricalDistribution>(local[0].predictions[1].distribution);
    CHECK(da.values() == std::vector<double>{10.0, 20.0});
    CHECK(db.values() == std::vector<double>{11.0, 21.0});
}

TEST_CASE("calibration input validation")
{
    const ExchangeableGrouping g({2, 2});
    TrainingConfig cfg;
    cfg.window_days = 20;

    CHECK_THROWS_AS(rolling_calibrate({}, g, cfg), std::invalid_argument);

    auto unsorted = toy_dataset(5, 1, 4, 41);
    std::swap(unsorted[1], unsorted[3]);
    CHECK_THROWS_AS(rolling_calibrate(unsorted, g, cfg), std::invalid_argument);

    const auto brief = toy_dataset(15, 1, 4, 42);  // shorter than the window
    CHECK_THROWS_AS(rolling_calibrate(brief, g, cfg), std::invalid_argument);
    CHECK_THROWS_AS(climatology_calibrate(brief, cfg), std::invalid_argument);

    auto holes = toy_dataset(21, 1, 4, 43);
    for (int d = 0; d < 20; ++d) holes[d].observation.reset();
    CHECK_THROWS_AS(rolling_calibrate(holes, g, cfg), std::runtime_error);
}
