#include "emoscal/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "emoscal/optimize.hpp"
#include "emoscal/parallel.hpp"
#include "emoscal/quadrature.hpp"

namespace emoscal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string no_training_message(const Date& date, const std::string& station)
{
    std::string msg = "no training cases with observations in the window before " + date.to_string();
    if (!station.empty()) msg += " for station " + station;
    return msg;
}

struct PreparedCase {
    EnsembleStats stats;
    double obs;
};

std::vector<PreparedCase> prepare(const std::vector<ForecastCase>& cases,
                                  const ExchangeableGrouping& grouping, const char* who)
{
    if (cases.empty()) throw std::invalid_argument(std::string(who) + ": empty training set");
    std::vector<PreparedCase> out;
    out.reserve(cases.size());
    for (const auto& c : cases) {
        if (!c.observation)
            throw std::invalid_argument(std::string(who) + ": training case without observation");
        out.push_back({ensemble_stats(c, grouping), *c.observation});
    }
    return out;
}

double mean_objective_prepared(const CoefficientSet& coeffs,
                               const std::vector<PreparedCase>& prepared, const Objective objective)
{
    double total = 0.0;
    try {
        for (const auto& pc : prepared) {
            const PredictiveDistribution dist = link(coeffs, pc.stats);
            const double s = objective == Objective::MIN_CRPS ? crps(dist, pc.obs)
                                                              : log_score(dist, pc.obs);
            if (std::isnan(s)) return kInf;
            total += s;
            if (total == kInf) return kInf;
        }
    } catch (const InfeasibleLink&) {
        return kInf;
    } catch (const QuadratureError&) {
        return kInf;
    }
    return total / static_cast<double>(prepared.size());
}

double logistic(const double u) { return 1.0 / (1.0 + std::exp(-u)); }

double logit(const double w)
{
    const double c = std::clamp(w, 1e-12, 1.0 - 1e-12);
    return std::log(c) - std::log1p(-c);
}

/// Maps between constrained coefficient sets and the unconstrained vector the
/// simplex works on: variance coefficients enter squared, the mixture weight
/// through a logistic.
class Parameterization {
public:
    Parameterization(const ModelKind kind, const int groups) : kind_(kind), groups_(groups) {}

    std::vector<double> internal_from(const CoefficientSet& c) const
    {
        std::vector<double> x;
        x.reserve(dimension());
        if (kind_ != ModelKind::LN) {
            x.push_back(c.tn->a0);
            x.insert(x.end(), c.tn->a.begin(), c.tn->a.end());
            x.push_back(std::sqrt(c.tn->b0));
            x.push_back(std::sqrt(c.tn->b1));
        }
        if (kind_ != ModelKind::TN) {
            x.push_back(c.ln->alpha0);
            x.insert(x.end(), c.ln->alpha.begin(), c.ln->alpha.end());
            x.push_back(std::sqrt(c.ln->beta0));
            x.push_back(std::sqrt(c.ln->beta1));
        }
        if (kind_ == ModelKind::MIXTURE) x.push_back(logit(*c.weight));
        return x;
    }

    CoefficientSet coefficients_from(const std::vector<double>& x) const
    {
        CoefficientSet c;
        c.kind = kind_;
        std::size_t i = 0;
        if (kind_ != ModelKind::LN) {
            TnCoefficients t;
            t.a0 = x[i++];
            t.a.assign(x.begin() + i, x.begin() + i + groups_);
            i += groups_;
            t.b0 = x[i] * x[i];
            ++i;
            t.b1 = x[i] * x[i];
            ++i;
            c.tn = std::move(t);
        }
        if (kind_ != ModelKind::TN) {
            LnCoefficients l;
            l.alpha0 = x[i++];
            l.alpha.assign(x.begin() + i, x.begin() + i + groups_);
            i += groups_;
            l.beta0 = x[i] * x[i];
            ++i;
            l.beta1 = x[i] * x[i];
            ++i;
            c.ln = std::move(l);
        }
        if (kind_ == ModelKind::MIXTURE) c.weight = logistic(x[i++]);
        return c;
    }

    std::size_t dimension() const
    {
        const std::size_t block = static_cast<std::size_t>(groups_) + 3;
        return kind_ == ModelKind::MIXTURE ? 2 * block + 1 : block;
    }

private:
    ModelKind kind_;
    int groups_;
};

FitResult fit_prepared(const std::vector<PreparedCase>& prepared,
                       const ExchangeableGrouping& grouping, const TrainingConfig& config,
                       const std::optional<CoefficientSet>& warm_start);

std::optional<CoefficientSet> extract_branch(const std::optional<CoefficientSet>& warm_start,
                                             const ModelKind kind)
{
    if (!warm_start) return std::nullopt;
    CoefficientSet w;
    w.kind = kind;
    if (kind == ModelKind::TN) {
        if (!warm_start->tn) return std::nullopt;
        w.tn = warm_start->tn;
    } else {
        if (!warm_start->ln) return std::nullopt;
        w.ln = warm_start->ln;
    }
    return w;
}

/// Candidate coefficient set with its (already computed) objective value.
struct Candidate {
    CoefficientSet coeffs;
    double value;
    bool converged;
};

FitResult pick_best(std::vector<Candidate> candidates, const std::size_t iterations)
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i)
        if (candidates[i].value < candidates[best].value) best = i;
    FitResult result;
    result.coefficients = std::move(candidates[best].coeffs);
    result.objective_value = candidates[best].value;
    result.converged = candidates[best].converged;
    result.iterations = iterations;
    return result;
}

FitResult fit_regime_switch(const std::vector<PreparedCase>& prepared,
                            const ExchangeableGrouping& grouping, const TrainingConfig& config,
                            const std::optional<CoefficientSet>& warm_start)
{
    TrainingConfig sub = config;
    sub.threshold.reset();
    sub.model_kind = ModelKind::TN;
    const FitResult branch_tn =
        fit_prepared(prepared, grouping, sub, extract_branch(warm_start, ModelKind::TN));
    sub.model_kind = ModelKind::LN;
    const FitResult branch_ln =
        fit_prepared(prepared, grouping, sub, extract_branch(warm_start, ModelKind::LN));

    CoefficientSet assembled;
    assembled.kind = ModelKind::REGIME_SWITCH;
    assembled.tn = branch_tn.coefficients.tn;
    assembled.ln = branch_ln.coefficients.ln;
    assembled.threshold = config.threshold;

    // The switching objective differs from the per-branch objectives, so the
    // assembled set is not automatically the best seen; the monotonicity
    // guarantee comes from taking the argmin over all evaluated candidates.
    std::vector<Candidate> candidates;
    const bool both = branch_tn.converged && branch_ln.converged;
    candidates.push_back({assembled, mean_objective_prepared(assembled, prepared, config.objective),
                          both});
    const CoefficientSet defaults =
        default_start(ModelKind::REGIME_SWITCH, grouping, config.threshold);
    candidates.push_back({defaults, mean_objective_prepared(defaults, prepared, config.objective),
                          false});
    if (warm_start)
        candidates.push_back({*warm_start,
                              mean_objective_prepared(*warm_start, prepared, config.objective),
                              false});
    return pick_best(std::move(candidates),
                     branch_tn.iterations + branch_ln.iterations + candidates.size());
}

FitResult fit_mixture(const std::vector<PreparedCase>& prepared,
                      const ExchangeableGrouping& grouping, const TrainingConfig& config,
                      const std::optional<CoefficientSet>& warm_start)
{
    TrainingConfig sub = config;
    sub.threshold.reset();
    sub.model_kind = ModelKind::TN;
    const FitResult branch_tn =
        fit_prepared(prepared, grouping, sub, extract_branch(warm_start, ModelKind::TN));
    sub.model_kind = ModelKind::LN;
    const FitResult branch_ln =
        fit_prepared(prepared, grouping, sub, extract_branch(warm_start, ModelKind::LN));
    std::size_t total_evals = branch_tn.iterations + branch_ln.iterations;

    const Parameterization par(ModelKind::MIXTURE, grouping.group_count());
    const auto objective = [&](const std::vector<double>& x) {
        return mean_objective_prepared(par.coefficients_from(x), prepared, config.objective);
    };

    auto assemble = [&](const double weight) {
        CoefficientSet c;
        c.kind = ModelKind::MIXTURE;
        c.tn = branch_tn.coefficients.tn;
        c.ln = branch_ln.coefficients.ln;
        c.weight = weight;
        return c;
    };

    // Degenerate-weight embeddings of the single-family fits pin the mixture
    // objective at or below each family's fitted score.
    std::vector<Candidate> candidates;
    const CoefficientSet emb_tn = assemble(1.0);
    const CoefficientSet emb_ln = assemble(0.0);
    candidates.push_back({emb_tn, mean_objective_prepared(emb_tn, prepared, config.objective),
                          branch_tn.converged});
    candidates.push_back({emb_ln, mean_objective_prepared(emb_ln, prepared, config.objective),
                          branch_ln.converged});
    const CoefficientSet defaults = default_start(ModelKind::MIXTURE, grouping, std::nullopt);
    candidates.push_back({defaults, mean_objective_prepared(defaults, prepared, config.objective),
                          false});
    if (warm_start)
        candidates.push_back({*warm_start,
                              mean_objective_prepared(*warm_start, prepared, config.objective),
                              false});
    total_evals += candidates.size();
    double floor_value = kInf;
    for (const auto& c : candidates) floor_value = std::min(floor_value, c.value);

    // Soft embedding: both fitted blocks with the weight pulled off its bound
    // so the simplex can move it.
    const CoefficientSet soft = assemble(candidates[0].value <= candidates[1].value ? 0.9 : 0.1);

    const std::vector<double> primary_x =
        warm_start ? par.internal_from(*warm_start) : par.internal_from(soft);
    SimplexResult run = nelder_mead(objective, primary_x, SimplexOptions{});
    total_evals += run.evaluations;
    candidates.push_back({par.coefficients_from(run.x), run.fx, run.converged});
    if (run.fx > floor_value) {
        // Stalled above a known candidate; restart once from the soft embedding
        // (or from the default start when the soft embedding was the start).
        const std::vector<double> retry_x =
            warm_start ? par.internal_from(soft) : par.internal_from(defaults);
        SimplexResult retry = nelder_mead(objective, retry_x, SimplexOptions{});
        total_evals += retry.evaluations;
        candidates.push_back({par.coefficients_from(retry.x), retry.fx, retry.converged});
    }
    return pick_best(std::move(candidates), total_evals);
}

FitResult fit_prepared(const std::vector<PreparedCase>& prepared,
                       const ExchangeableGrouping& grouping, const TrainingConfig& config,
                       const std::optional<CoefficientSet>& warm_start)
{
    if (warm_start && warm_start->kind != config.model_kind)
        throw std::invalid_argument("fit: warm start has a different model kind");
    if (config.model_kind == ModelKind::REGIME_SWITCH)
        return fit_regime_switch(prepared, grouping, config, warm_start);
    if (config.model_kind == ModelKind::MIXTURE)
        return fit_mixture(prepared, grouping, config, warm_start);

    const Parameterization par(config.model_kind, grouping.group_count());
    const auto objective = [&](const std::vector<double>& x) {
        return mean_objective_prepared(par.coefficients_from(x), prepared, config.objective);
    };

    const CoefficientSet defaults = default_start(config.model_kind, grouping, std::nullopt);
    const std::vector<double> default_x = par.internal_from(defaults);
    const double default_value = objective(default_x);

    SimplexOptions options;
    std::size_t total_evals = 1;

    SimplexResult chosen = nelder_mead(
        objective, warm_start ? par.internal_from(*warm_start) : default_x, options);
    total_evals += chosen.evaluations;
    if (warm_start && chosen.fx > default_value) {
        // The warm start stalled; restart once from the default start.
        SimplexResult retry = nelder_mead(objective, default_x, options);
        total_evals += retry.evaluations;
        if (retry.fx < chosen.fx) chosen = std::move(retry);
    }
    if (chosen.fx > default_value) {
        chosen.x = default_x;
        chosen.fx = default_value;
        chosen.converged = false;
    }

    FitResult result;
    result.coefficients = par.coefficients_from(chosen.x);
    result.objective_value = chosen.fx;
    result.iterations = total_evals;
    result.converged = chosen.converged;
    return result;
}

struct DateRun {
    Date date;
    std::size_t begin;
    std::size_t end;
};

std::vector<DateRun> date_runs(const std::vector<ForecastCase>& dataset, const char* who)
{
    if (dataset.empty()) throw std::invalid_argument(std::string(who) + ": empty dataset");
    std::vector<DateRun> runs;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (!runs.empty() && dataset[i].date < runs.back().date)
            throw std::invalid_argument(std::string(who) + ": dataset is not sorted by date");
        if (runs.empty() || dataset[i].date > runs.back().date)
            runs.push_back({dataset[i].date, i, i + 1});
        else
            runs.back().end = i + 1;
    }
    return runs;
}

/// Indices of observed cases in the window of `window_days` calendar days
/// strictly before `date`, optionally restricted to one station.
std::vector<std::size_t> training_indices(const std::vector<ForecastCase>& dataset,
                                          const std::vector<DateRun>& runs, const Date& date,
                                          const int window_days, const std::string& station)
{
    std::vector<std::size_t> out;
    for (const auto& run : runs) {
        const int lead = date.days_since(run.date);
        if (lead < 1 || lead > window_days) continue;
        for (std::size_t i = run.begin; i < run.end; ++i) {
            if (!dataset[i].observation) continue;
            if (!station.empty() && dataset[i].station_id != station) continue;
            out.push_back(i);
        }
    }
    return out;
}

std::vector<ForecastCase> gather(const std::vector<ForecastCase>& dataset,
                                 const std::vector<std::size_t>& indices)
{
    std::vector<ForecastCase> out;
    out.reserve(indices.size());
    for (const std::size_t i : indices) out.push_back(dataset[i]);
    return out;
}

std::vector<std::size_t> verification_runs(const std::vector<DateRun>& runs, const int window_days,
                                           const char* who)
{
    std::vector<std::size_t> out;
    const Date first = runs.front().date;
    for (std::size_t r = 0; r < runs.size(); ++r)
        if (runs[r].date.days_since(first) >= window_days) out.push_back(r);
    if (out.empty())
        throw std::invalid_argument(std::string(who) +
                                    ": dataset too short for the training window");
    return out;
}

}  // namespace

std::string to_string(const Objective objective)
{
    return objective == Objective::MIN_CRPS ? "MIN_CRPS" : "MAX_LIKELIHOOD";
}

Objective objective_from_string(const std::string& text)
{
    if (text == "MIN_CRPS") return Objective::MIN_CRPS;
    if (text == "MAX_LIKELIHOOD") return Objective::MAX_LIKELIHOOD;
    throw std::invalid_argument("unknown objective '" + text + "'");
}

std::string to_string(const Pooling pooling)
{
    return pooling == Pooling::REGIONAL ? "REGIONAL" : "LOCAL";
}

Pooling pooling_from_string(const std::string& text)
{
    if (text == "REGIONAL") return Pooling::REGIONAL;
    if (text == "LOCAL") return Pooling::LOCAL;
    throw std::invalid_argument("unknown pooling '" + text + "'");
}

void TrainingConfig::validate() const
{
    if (window_days < 2) throw std::invalid_argument("TrainingConfig: window_days must be >= 2");
    if (model_kind == ModelKind::REGIME_SWITCH && (!threshold || !(*threshold > 0.0)))
        throw std::invalid_argument("TrainingConfig: REGIME_SWITCH needs a positive threshold");
}

double mean_objective(const CoefficientSet& coeffs, const std::vector<ForecastCase>& cases,
                      const ExchangeableGrouping& grouping, const Objective objective)
{
    coeffs.validate(grouping.group_count());
    return mean_objective_prepared(coeffs, prepare(cases, grouping, "mean_objective"), objective);
}

CoefficientSet default_start(const ModelKind kind, const ExchangeableGrouping& grouping,
                             const std::optional<double> threshold)
{
    const int m = grouping.group_count();
    const auto& sizes = grouping.group_sizes();
    CoefficientSet c;
    c.kind = kind;
    if (kind != ModelKind::LN) {
        TnCoefficients t;
        t.a0 = 0.0;
        t.a.resize(m);
        for (int k = 0; k < m; ++k) t.a[k] = 1.0 / (m * sizes[k]);
        t.b0 = 1.0;
        t.b1 = 1.0;
        c.tn = std::move(t);
    }
    if (kind != ModelKind::TN) {
        LnCoefficients l;
        l.alpha0 = 0.0;
        l.alpha.resize(m);
        for (int k = 0; k < m; ++k) l.alpha[k] = 1.0 / (m * sizes[k]);
        l.beta0 = 1.0;
        l.beta1 = 1.0;
        c.ln = std::move(l);
    }
    if (kind == ModelKind::MIXTURE) c.weight = 0.5;
    if (kind == ModelKind::REGIME_SWITCH) c.threshold = threshold;
    return c;
}

FitResult fit(const std::vector<ForecastCase>& cases, const ExchangeableGrouping& grouping,
              const TrainingConfig& config, const std::optional<CoefficientSet>& warm_start)
{
    config.validate();
    return fit_prepared(prepare(cases, grouping, "fit"), grouping, config, warm_start);
}

std::vector<DateCalibration> rolling_calibrate(const std::vector<ForecastCase>& dataset,
                                               const ExchangeableGrouping& grouping,
                                               const TrainingConfig& config,
                                               const WarmStartMode mode, const unsigned threads)
{
    config.validate();
    const auto runs = date_runs(dataset, "rolling_calibrate");
    const auto verif = verification_runs(runs, config.window_days, "rolling_calibrate");

    std::vector<DateCalibration> results(verif.size());

    auto calibrate_date =
        [&](const std::size_t v,
            std::map<std::string, CoefficientSet>& warm) {
        const DateRun& run = runs[verif[v]];
        DateCalibration out;
        out.date = run.date;

        if (config.pooling == Pooling::REGIONAL) {
            const auto idx = training_indices(dataset, runs, run.date, config.window_days, "");
            if (idx.empty()) throw std::runtime_error(no_training_message(run.date, ""));
            const auto warm_it = warm.find("");
            const FitResult fr =
                fit(gather(dataset, idx), grouping, config,
                    warm_it == warm.end() ? std::nullopt
                                          : std::optional<CoefficientSet>(warm_it->second));
            for (std::size_t i = run.begin; i < run.end; ++i)
                out.predictions.push_back(
                    {i, link(fr.coefficients, ensemble_stats(dataset[i], grouping))});
            warm[""] = fr.coefficients;
            out.fits.emplace_back("", fr);
        } else {
            std::map<std::string, FitResult> station_fits;
            for (std::size_t i = run.begin; i < run.end; ++i) {
                const std::string& station = dataset[i].station_id;
                auto fit_it = station_fits.find(station);
                if (fit_it == station_fits.end()) {
                    const auto idx = training_indices(dataset, runs, run.date, config.window_days,
                                                      station);
                    if (idx.empty())
                        throw std::runtime_error(no_training_message(run.date, station));
                    const auto warm_it = warm.find(station);
                    FitResult fr = fit(gather(dataset, idx), grouping, config,
                                       warm_it == warm.end()
                                           ? std::nullopt
                                           : std::optional<CoefficientSet>(warm_it->second));
                    warm[station] = fr.coefficients;
                    fit_it = station_fits.emplace(station, std::move(fr)).first;
                }
                out.predictions.push_back(
                    {i, link(fit_it->second.coefficients, ensemble_stats(dataset[i], grouping))});
            }
            for (auto& [station, fr] : station_fits) out.fits.emplace_back(station, std::move(fr));
        }
        results[v] = std::move(out);
    };

    if (mode == WarmStartMode::CHAINED) {
        std::map<std::string, CoefficientSet> warm;
        for (std::size_t v = 0; v < verif.size(); ++v) calibrate_date(v, warm);
    } else {
        parallel_for(verif.size(), threads, [&](const std::size_t v) {
            std::map<std::string, CoefficientSet> warm;  // stays empty: no chaining
            calibrate_date(v, warm);
        });
    }
    return results;
}

std::vector<ClimatologyCalibration> climatology_calibrate(const std::vector<ForecastCase>& dataset,
                                                          const TrainingConfig& config)
{
    config.validate();
    const auto runs = date_runs(dataset, "climatology_calibrate");
    const auto verif = verification_runs(runs, config.window_days, "climatology_calibrate");

    std::vector<ClimatologyCalibration> results;
    results.reserve(verif.size());
    for (const std::size_t r : verif) {
        const DateRun& run = runs[r];
        ClimatologyCalibration out;
        out.date = run.date;
        if (config.pooling == Pooling::REGIONAL) {
            const auto idx = training_indices(dataset, runs, run.date, config.window_days, "");
            if (idx.empty()) throw std::runtime_error(no_training_message(run.date, ""));
            std::vector<double> obs;
            obs.reserve(idx.size());
            for (const std::size_t i : idx) obs.push_back(*dataset[i].observation);
            const EmpiricalDistribution dist(std::move(obs));
            for (std::size_t i = run.begin; i < run.end; ++i)
                out.predictions.push_back({i, PredictiveDistribution(dist)});
        } else {
            for (std::size_t i = run.begin; i < run.end; ++i) {
                const auto idx = training_indices(dataset, runs, run.date, config.window_days,
                                                  dataset[i].station_id);
                if (idx.empty())
                    throw std::runtime_error(no_training_message(run.date, dataset[i].station_id));
                std::vector<double> obs;
                obs.reserve(idx.size());
                for (const std::size_t j : idx) obs.push_back(*dataset[j].observation);
                out.predictions.push_back({i, EmpiricalDistribution(std::move(obs))});
            }
        }
        results.push_back(std::move(out));
    }
    return results;
}

}  // namespace emoscal
