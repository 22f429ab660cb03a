// Command-line front end: simulate synthetic datasets, run rolling
// calibration, and verify stored forecasts against observations.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "emoscal/data_io.hpp"
#include "emoscal/dates.hpp"
#include "emoscal/distributions.hpp"
#include "emoscal/emos.hpp"
#include "emoscal/estimation.hpp"
#include "emoscal/rng.hpp"
#include "emoscal/synthetic.hpp"
#include "emoscal/verification.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

/// Bad configuration, arguments, or input files: exit code 1.
/// Anything else that goes wrong downstream exits with code 2.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Runs the input/validation phase of a command; any failure there counts as
/// a usage error rather than a runtime failure.
template <typename Fn>
auto validated(Fn&& fn) -> decltype(fn())
{
    try {
        return fn();
    } catch (const ValidationError&) {
        throw;
    } catch (const std::exception& e) {
        throw ValidationError(e.what());
    }
}

struct CommonArgs {
    std::string config_path;
    std::string data_path;
    std::string out_dir;
    std::vector<std::string> forecast_args;
    std::string reference_label;
    // Optional command-line overrides of config keys.
    std::string model;
    std::string objective;
    std::string pooling;
    std::optional<int> window;
    std::optional<double> threshold;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
};

/// Loads the config file (if given) and layers the command-line overrides on
/// top, so every command works from one resolved key/value view.
emoscal::ConfigMap resolve_config(const CommonArgs& args)
{
    std::map<std::string, std::string> merged;
    if (!args.config_path.empty()) {
        const emoscal::ConfigMap file = emoscal::ConfigMap::load(args.config_path);
        merged = file.entries();
    }
    if (!args.model.empty()) merged["model"] = args.model;
    if (!args.objective.empty()) merged["objective"] = args.objective;
    if (!args.pooling.empty()) merged["pooling"] = args.pooling;
    if (args.window) merged["window_days"] = std::to_string(*args.window);
    if (args.threshold) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", *args.threshold);
        merged["threshold"] = buf;
    }
    if (args.seed) merged["seed"] = std::to_string(*args.seed);
    if (args.threads) merged["threads"] = std::to_string(*args.threads);

    std::string text;
    for (const auto& [k, v] : merged) text += k + " = " + v + "\n";
    return emoscal::ConfigMap::from_text(text, "<resolved config>");
}

ordered_json config_to_json(const emoscal::ConfigMap& config)
{
    ordered_json j = ordered_json::object();
    for (const auto& [k, v] : config.entries()) j[k] = v;
    return j;
}

void write_manifest(const fs::path& out_dir, const std::string& command,
                    const ordered_json& inputs, const std::vector<std::string>& outputs,
                    const emoscal::ConfigMap& config, const std::uint64_t seed,
                    const double elapsed_ms)
{
    ordered_json j;
    j["command"] = command;
    j["version"] = EMOSCAL_VERSION;
    j["seed"] = seed;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    j["resolved_config"] = config_to_json(config);
    j["timing_ms"] = elapsed_ms;
    const fs::path path = out_dir / "manifest.json";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
}

emoscal::ExchangeableGrouping grouping_from_config(const emoscal::ConfigMap& config,
                                                   const int member_count)
{
    std::vector<int> sizes;
    if (config.has("group_sizes"))
        sizes = config.get_int_list("group_sizes");
    else
        sizes.push_back(member_count);  // fully exchangeable ensemble
    const emoscal::ExchangeableGrouping grouping(sizes);
    if (grouping.member_count() != member_count)
        throw ValidationError("group_sizes sum to " + std::to_string(grouping.member_count()) +
                              " but the dataset has " + std::to_string(member_count) +
                              " members");
    return grouping;
}

emoscal::CoefficientSet truth_from_config(const emoscal::ConfigMap& config,
                                          const int group_count)
{
    emoscal::CoefficientSet truth;
    truth.kind = emoscal::model_kind_from_string(config.get("truth_model"));
    const bool needs_tn = truth.kind != emoscal::ModelKind::LN;
    const bool needs_ln = truth.kind != emoscal::ModelKind::TN;
    if (needs_tn) {
        const std::vector<double> a = config.get_double_list("truth_a");
        const std::vector<double> b = config.get_double_list("truth_b");
        if (a.size() != static_cast<std::size_t>(group_count) + 1)
            throw ValidationError("truth_a needs 1 + group_count values");
        if (b.size() != 2) throw ValidationError("truth_b needs exactly 2 values");
        emoscal::TnCoefficients tn;
        tn.a0 = a[0];
        tn.a.assign(a.begin() + 1, a.end());
        tn.b0 = b[0];
        tn.b1 = b[1];
        truth.tn = std::move(tn);
    }
    if (needs_ln) {
        const std::vector<double> alpha = config.get_double_list("truth_alpha");
        const std::vector<double> beta = config.get_double_list("truth_beta");
        if (alpha.size() != static_cast<std::size_t>(group_count) + 1)
            throw ValidationError("truth_alpha needs 1 + group_count values");
        if (beta.size() != 2) throw ValidationError("truth_beta needs exactly 2 values");
        emoscal::LnCoefficients ln;
        ln.alpha0 = alpha[0];
        ln.alpha.assign(alpha.begin() + 1, alpha.end());
        ln.beta0 = beta[0];
        ln.beta1 = beta[1];
        truth.ln = std::move(ln);
    }
    if (truth.kind == emoscal::ModelKind::MIXTURE)
        truth.weight = config.get_double("truth_weight");
    if (truth.kind == emoscal::ModelKind::REGIME_SWITCH)
        truth.threshold = config.get_double("truth_threshold");
    return truth;
}

int cmd_simulate(const CommonArgs& args)
{
    const auto t0 = std::chrono::steady_clock::now();
    const emoscal::ConfigMap config = validated([&] { return resolve_config(args); });

    const emoscal::ScenarioSpec spec = validated([&] {
        const std::vector<int> sizes = config.get_int_list("group_sizes");
        const emoscal::ExchangeableGrouping grouping(sizes);
        emoscal::MemberProcess process;
        process.base_level = config.get_double_or("base_level", 8.0);
        process.daily_sd = config.get_double_or("daily_sd", 1.2);
        process.member_spread = config.get_double_or("member_spread", 1.5);
        if (config.has("group_bias")) process.group_bias = config.get_double_list("group_bias");
        return emoscal::ScenarioSpec{config.get_int("n_days"),
                                     config.get_int("n_stations"),
                                     grouping,
                                     std::move(process),
                                     truth_from_config(config, grouping.group_count()),
                                     config.get_uint64_or("seed", 0),
                                     emoscal::Date::parse(config.get_or("start_date",
                                                                        "2020-01-01"))};
    });

    const std::vector<emoscal::ForecastCase> cases = emoscal::generate(spec);
    fs::create_directories(args.out_dir);
    const fs::path out_dir(args.out_dir);
    emoscal::write_dataset((out_dir / "dataset.csv").string(), cases);

    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                                t0)
                          .count();
    ordered_json inputs = ordered_json::object();
    if (!args.config_path.empty()) inputs["config"] = args.config_path;
    write_manifest(out_dir, "simulate", inputs, {"dataset.csv"}, config, spec.seed, ms);
    std::cout << "wrote " << cases.size() << " cases to " << (out_dir / "dataset.csv").string()
              << "\n";
    return 0;
}

int cmd_calibrate(const CommonArgs& args)
{
    const auto t0 = std::chrono::steady_clock::now();
    const emoscal::ConfigMap config = validated([&] { return resolve_config(args); });

    struct Prepared {
        emoscal::LoadedDataset data;
        emoscal::TrainingConfig tc;
        bool climatology;
        emoscal::WarmStartMode mode;
        unsigned threads;
        std::uint64_t seed;
    };
    Prepared prep = validated([&]() -> Prepared {
        emoscal::LoadedDataset data = emoscal::load_dataset(args.data_path);
        emoscal::TrainingConfig tc;
        tc.window_days = config.get_int_or("window_days", 20);
        tc.objective = emoscal::objective_from_string(config.get_or("objective", "MIN_CRPS"));
        tc.pooling = emoscal::pooling_from_string(config.get_or("pooling", "REGIONAL"));
        const std::string model = config.get_or("model", "TN");
        const bool climatology = model == "CLIMATOLOGY";
        if (!climatology) tc.model_kind = emoscal::model_kind_from_string(model);
        if (config.has("threshold")) tc.threshold = config.get_double("threshold");
        tc.validate();
        const std::string mode_text = config.get_or("warm_start_mode", "CHAINED");
        emoscal::WarmStartMode mode;
        if (mode_text == "CHAINED")
            mode = emoscal::WarmStartMode::CHAINED;
        else if (mode_text == "INDEPENDENT")
            mode = emoscal::WarmStartMode::INDEPENDENT;
        else
            throw ValidationError("warm_start_mode must be CHAINED or INDEPENDENT");
        const int threads = config.get_int_or("threads", 1);
        if (threads < 1) throw ValidationError("threads must be at least 1");
        return Prepared{std::move(data), tc, climatology, mode, static_cast<unsigned>(threads),
                        config.get_uint64_or("seed", 0)};
    });

    fs::create_directories(args.out_dir);
    const fs::path out_dir(args.out_dir);
    std::vector<std::string> outputs;
    std::vector<emoscal::StoredForecast> stored;

    if (prep.climatology) {
        const std::vector<emoscal::ClimatologyCalibration> result =
            emoscal::climatology_calibrate(prep.data.cases, prep.tc);
        for (const auto& day : result)
            for (const auto& p : day.predictions)
                stored.push_back({prep.data.cases[p.case_index].date,
                                  prep.data.cases[p.case_index].station_id, p.distribution});
    } else {
        const emoscal::ExchangeableGrouping grouping =
            validated([&] { return grouping_from_config(config, prep.data.member_count); });
        const std::vector<emoscal::DateCalibration> result = emoscal::rolling_calibrate(
            prep.data.cases, grouping, prep.tc, prep.mode, prep.threads);
        std::vector<emoscal::DatedFit> fits;
        for (const auto& day : result) {
            for (const auto& [scope, fit] : day.fits) fits.push_back({day.date, scope, fit});
            for (const auto& p : day.predictions)
                stored.push_back({prep.data.cases[p.case_index].date,
                                  prep.data.cases[p.case_index].station_id, p.distribution});
        }
        emoscal::write_coefficients((out_dir / "coefficients.csv").string(), fits,
                                    grouping.group_count());
        outputs.push_back("coefficients.csv");
    }

    emoscal::write_forecasts((out_dir / "forecasts.csv").string(), stored);
    outputs.push_back("forecasts.csv");

    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                                t0)
                          .count();
    ordered_json inputs = ordered_json::object();
    if (!args.config_path.empty()) inputs["config"] = args.config_path;
    inputs["data"] = args.data_path;
    write_manifest(out_dir, "calibrate", inputs, outputs, config, prep.seed, ms);
    std::cout << "wrote " << stored.size() << " forecasts to "
              << (out_dir / "forecasts.csv").string() << "\n";
    return 0;
}

struct ModelSeries {
    std::string label;
    std::vector<emoscal::PredictiveDistribution> forecasts;
    bool all_tn = true;
};

std::string label_for(const std::string& arg, std::string* path)
{
    const std::size_t eq = arg.find('=');
    if (eq != std::string::npos) {
        *path = arg.substr(eq + 1);
        return arg.substr(0, eq);
    }
    *path = arg;
    return fs::path(arg).stem().string();
}

int cmd_verify(const CommonArgs& args)
{
    const auto t0 = std::chrono::steady_clock::now();
    const emoscal::ConfigMap config = validated([&] { return resolve_config(args); });
    const std::uint64_t seed = config.get_uint64_or("seed", 0);
    const int threads = std::max(1, config.get_int_or("threads", 1));

    // Load the dataset and align every forecast file on the same case keys.
    struct Aligned {
        std::vector<ModelSeries> models;
        std::vector<double> observations;
        std::vector<std::vector<double>> members;
        int member_count = 0;
    };
    Aligned aligned = validated([&]() -> Aligned {
        if (args.forecast_args.empty())
            throw ValidationError("verify needs at least one --forecast file");
        const emoscal::LoadedDataset data = emoscal::load_dataset(args.data_path);
        std::map<std::pair<std::string, std::string>, std::size_t> case_index;
        for (std::size_t i = 0; i < data.cases.size(); ++i)
            case_index[{data.cases[i].date.to_string(), data.cases[i].station_id}] = i;

        Aligned out;
        out.member_count = data.member_count;
        std::set<std::string> used_labels;
        using CaseKey = std::pair<std::string, std::string>;
        std::vector<CaseKey> all_keys;     // every key of the first file, sorted
        std::vector<CaseKey> scored_keys;  // the subset with observations
        for (const std::string& arg : args.forecast_args) {
            std::string path;
            const std::string base = label_for(arg, &path);
            std::string label = base;
            int suffix = 2;
            while (!used_labels.insert(label).second) label = base + "_" + std::to_string(suffix++);
            const std::vector<emoscal::StoredForecast> loaded = emoscal::load_forecasts(path);
            if (loaded.empty()) throw ValidationError(path + ": no forecasts");

            std::map<CaseKey, const emoscal::StoredForecast*> by_key;
            for (const auto& f : loaded)
                if (!by_key.emplace(std::make_pair(f.date.to_string(), f.station), &f).second)
                    throw ValidationError(path + ": duplicate forecast for " + f.date.to_string() +
                                          " " + f.station);
            if (all_keys.empty()) {
                for (const auto& [key, ptr] : by_key) {
                    (void)ptr;
                    const auto it = case_index.find(key);
                    if (it == case_index.end())
                        throw ValidationError(path + ": no dataset case for " + key.first + " " +
                                              key.second);
                    all_keys.push_back(key);
                    if (data.cases[it->second].observation) scored_keys.push_back(key);
                }
                if (scored_keys.empty())
                    throw ValidationError(path + ": no forecast matches an observed case");
                for (const auto& key : scored_keys) {
                    const emoscal::ForecastCase& fc = data.cases[case_index.at(key)];
                    out.observations.push_back(*fc.observation);
                    out.members.push_back(fc.members);
                }
            } else {
                // Every file must cover exactly the same cases.
                if (by_key.size() != all_keys.size())
                    throw ValidationError(path + ": misaligned forecasts (different case set)");
                for (const auto& key : all_keys)
                    if (by_key.find(key) == by_key.end())
                        throw ValidationError(path + ": missing forecast for " + key.first + " " +
                                              key.second);
            }

            ModelSeries series;
            series.label = label;
            for (const auto& key : scored_keys) {
                const emoscal::StoredForecast* f = by_key.at(key);
                series.forecasts.push_back(f->distribution);
                if (!std::holds_alternative<emoscal::TruncatedNormal>(f->distribution))
                    series.all_tn = false;
            }
            out.models.push_back(std::move(series));
        }
        return out;
    });

    // Raw-ensemble baseline alongside the stored models.
    {
        ModelSeries ensemble;
        ensemble.label = "ENSEMBLE";
        ensemble.all_tn = false;
        for (const auto& members : aligned.members)
            ensemble.forecasts.emplace_back(emoscal::EmpiricalDistribution(members));
        aligned.models.push_back(std::move(ensemble));
    }

    const std::size_t n_cases = aligned.observations.size();
    const std::vector<double> tw_thresholds = validated([&] {
        if (config.has("tw_thresholds")) return config.get_double_list("tw_thresholds");
        const emoscal::EmpiricalDistribution obs_dist(aligned.observations);
        return std::vector<double>{obs_dist.quantile(0.90), obs_dist.quantile(0.95),
                                   obs_dist.quantile(0.99)};
    });
    const double nominal_pct = config.get_double_or(
        "nominal_coverage_pct", 100.0 * (aligned.member_count - 1) /
                                    static_cast<double>(aligned.member_count + 1));
    const int dm_lag = config.get_int_or("dm_lag", 1);
    const int bootstrap_samples = config.get_int_or("bootstrap_samples", 10000);
    const int bootstrap_size =
        std::min<int>(config.get_int_or("bootstrap_size", 2500), static_cast<int>(n_cases));
    const double bootstrap_level = config.get_double_or("bootstrap_level", 0.05);
    const int pit_bins = config.get_int_or("pit_bins", 20);

    fs::create_directories(args.out_dir);
    const fs::path out_dir(args.out_dir);
    std::vector<std::string> outputs;

    // Reference for the skill curve: explicit label, else the first stored
    // model whose forecasts are all TN, else the first stored model.
    std::size_t ref_index = 0;
    if (!args.reference_label.empty()) {
        bool found = false;
        for (std::size_t i = 0; i < aligned.models.size(); ++i)
            if (aligned.models[i].label == args.reference_label) {
                ref_index = i;
                found = true;
            }
        if (!found) throw ValidationError("reference label '" + args.reference_label +
                                          "' does not match any forecast file");
    } else {
        for (std::size_t i = 0; i < aligned.models.size(); ++i)
            if (aligned.models[i].all_tn) {
                ref_index = i;
                break;
            }
    }

    std::vector<emoscal::VerificationReport> reports;
    std::vector<std::vector<double>> crps_series;
    for (const ModelSeries& model : aligned.models) {
        const bool is_ensemble = model.label == "ENSEMBLE";
        emoscal::VerificationReport report = emoscal::build_report(
            model.forecasts, aligned.observations, tw_thresholds, nominal_pct,
            is_ensemble ? aligned.members : std::vector<std::vector<double>>{}, seed);
        emoscal::write_report(report, (out_dir / ("report_" + model.label + ".csv")).string(),
                              emoscal::ReportFormat::CSV);
        emoscal::write_report(report, (out_dir / ("report_" + model.label + ".json")).string(),
                              emoscal::ReportFormat::JSON);
        emoscal::write_histogram((out_dir / ("pit_hist_" + model.label + ".csv")).string(),
                                 emoscal::histogram_counts(report.pit_values, pit_bins, 0.0, 1.0),
                                 0.0, 1.0);
        outputs.push_back("report_" + model.label + ".csv");
        outputs.push_back("report_" + model.label + ".json");
        outputs.push_back("pit_hist_" + model.label + ".csv");
        if (is_ensemble && !report.rank_counts.empty()) {
            emoscal::write_rank_histogram((out_dir / "rank_hist_ENSEMBLE.csv").string(),
                                          report.rank_counts);
            outputs.push_back("rank_hist_ENSEMBLE.csv");
        }
        crps_series.push_back(
            emoscal::score_cases(model.forecasts, aligned.observations, emoscal::ScoreKind::CRPS));
        reports.push_back(std::move(report));
    }

    // Pairwise equal-performance tests on the CRPS series.
    std::vector<emoscal::DmEntry> dm_entries;
    for (std::size_t i = 0; i < aligned.models.size(); ++i)
        for (std::size_t j = 0; j < aligned.models.size(); ++j)
            dm_entries.push_back({aligned.models[i].label, aligned.models[j].label,
                                  emoscal::dm_test(crps_series[i], crps_series[j], dm_lag)});
    emoscal::write_dm_matrix((out_dir / "dm_matrix.csv").string(), dm_entries);
    outputs.push_back("dm_matrix.csv");

    // Calibration robustness: uniformity rejection rate over PIT subsamples.
    std::vector<emoscal::RejectionEntry> rejection;
    for (std::size_t i = 0; i < aligned.models.size(); ++i)
        rejection.push_back(
            {aligned.models[i].label,
             emoscal::bootstrap_rejection_rate(reports[i].pit_values, bootstrap_samples,
                                               bootstrap_size, bootstrap_level,
                                               emoscal::Rng::derive(seed, 0xB007 + i),
                                               static_cast<unsigned>(threads))});
    emoscal::write_rejection_rates((out_dir / "rejection_rates.csv").string(), rejection);
    outputs.push_back("rejection_rates.csv");

    // Tail skill relative to the reference model.
    std::vector<emoscal::SkillEntry> skill;
    for (std::size_t i = 0; i < aligned.models.size(); ++i)
        for (std::size_t t = 0; t < tw_thresholds.size(); ++t) {
            const double ref_score = reports[ref_index].mean_twcrps[t].second;
            const double value = ref_score > 0.0
                                     ? emoscal::twcrpss(reports[i].mean_twcrps[t].second,
                                                        ref_score)
                                     : std::numeric_limits<double>::quiet_NaN();
            skill.push_back({aligned.models[i].label, tw_thresholds[t], value});
        }
    emoscal::write_skill_curve((out_dir / "skill_curve.csv").string(), skill);
    outputs.push_back("skill_curve.csv");

    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                                t0)
                          .count();
    ordered_json inputs = ordered_json::object();
    if (!args.config_path.empty()) inputs["config"] = args.config_path;
    inputs["data"] = args.data_path;
    ordered_json forecast_inputs = ordered_json::array();
    for (const std::string& f : args.forecast_args) forecast_inputs.push_back(f);
    inputs["forecasts"] = std::move(forecast_inputs);
    write_manifest(out_dir, "verify", inputs, outputs, config, seed, ms);
    std::cout << "verified " << (aligned.models.size()) << " models on " << n_cases
              << " cases; reference: " << aligned.models[ref_index].label << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Ensemble wind-speed post-processing: EMOS calibration and verification"};
    app.require_subcommand(1);
    CommonArgs args;

    CLI::App* simulate = app.add_subcommand("simulate", "Generate a synthetic dataset");
    simulate->add_option("--config", args.config_path, "Scenario config file")->required();
    simulate->add_option("--out", args.out_dir, "Output directory")->required();
    simulate->add_option("--seed", args.seed, "Override the scenario seed");
    simulate->add_option("--threads", args.threads, "Worker threads (unused here)");

    CLI::App* calibrate = app.add_subcommand("calibrate", "Fit rolling-window forecasts");
    calibrate->add_option("--config", args.config_path, "Training config file");
    calibrate->add_option("--data", args.data_path, "Dataset CSV")->required();
    calibrate->add_option("--out", args.out_dir, "Output directory")->required();
    calibrate->add_option("--model", args.model,
                          "TN, LN, MIXTURE, REGIME_SWITCH, or CLIMATOLOGY");
    calibrate->add_option("--objective", args.objective, "MIN_CRPS or MAX_LIKELIHOOD");
    calibrate->add_option("--window", args.window, "Training window length in days");
    calibrate->add_option("--threshold", args.threshold, "Regime-switching median threshold");
    calibrate->add_option("--pooling", args.pooling, "REGIONAL or LOCAL");
    calibrate->add_option("--seed", args.seed, "Seed recorded in the manifest");
    calibrate->add_option("--threads", args.threads, "Worker threads");

    CLI::App* verify = app.add_subcommand("verify", "Score stored forecasts");
    verify->add_option("--config", args.config_path, "Verification config file");
    verify->add_option("--data", args.data_path, "Dataset CSV with observations")->required();
    verify->add_option("--out", args.out_dir, "Output directory")->required();
    verify
        ->add_option("--forecast", args.forecast_args,
                     "Forecast CSV (repeatable; LABEL=path to name a model)")
        ->required();
    verify->add_option("--reference", args.reference_label, "Skill-curve reference label");
    verify->add_option("--seed", args.seed, "Seed for rank ties and bootstrap");
    verify->add_option("--threads", args.threads, "Worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(args);
        if (calibrate->parsed()) return cmd_calibrate(args);
        return cmd_verify(args);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 2;
    }
}
