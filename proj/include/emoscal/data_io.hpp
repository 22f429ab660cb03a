#pragma once

#include <map>
#include <string>
#include <vector>

#include "emoscal/dates.hpp"
#include "emoscal/emos.hpp"
#include "emoscal/estimation.hpp"
#include "emoscal/verification.hpp"

namespace emoscal {

/// Dataset CSV layout:
///
///     date,station,observation,member_1,...,member_M
///     2020-01-03,S001,4.1,3.9,4.4,...
///
/// An empty observation field marks a missing observation. Members must be
/// non-negative and finite. Doubles are written with the shortest digit
/// string that round-trips, so write followed by load reproduces the exact
/// values.

struct LoadedDataset {
    std::vector<ForecastCase> cases;  // sorted by (date, station)
    int member_count = 0;
};

/// Throws std::runtime_error naming the offending line for malformed rows,
/// inconsistent member counts, invalid dates, or negative values.
LoadedDataset load_dataset(const std::string& path);

void write_dataset(const std::string& path, const std::vector<ForecastCase>& cases);

/// Flat key=value configuration file. '#' starts a comment; blank lines are
/// ignored; keys are unique (a duplicate key is an error). Typed getters
/// throw std::runtime_error naming the key on missing or malformed values.
class ConfigMap {
public:
    static ConfigMap load(const std::string& path);
    static ConfigMap from_text(const std::string& text, const std::string& origin = "<text>");

    bool has(const std::string& key) const;
    std::string get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    int get_int(const std::string& key) const;
    int get_int_or(const std::string& key, int fallback) const;
    double get_double(const std::string& key) const;
    double get_double_or(const std::string& key, double fallback) const;
    std::uint64_t get_uint64_or(const std::string& key, std::uint64_t fallback) const;
    /// Comma-separated doubles, e.g. "0.5,1,2.25".
    std::vector<double> get_double_list(const std::string& key) const;
    std::vector<int> get_int_list(const std::string& key) const;

    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::map<std::string, std::string> values_;
    std::string origin_;
};

/// One stored predictive distribution, keyed by case.
struct StoredForecast {
    Date date;
    std::string station;
    PredictiveDistribution distribution;
};

/// Forecast CSV layout: date,station,kind,params where params is a
/// semicolon-joined number list whose meaning depends on kind:
///   TN        location;scale
///   LN        location;shape
///   MIXTURE   weight;tn_location;tn_scale;ln_location;ln_shape
///   EMPIRICAL v1;v2;...;vn
void write_forecasts(const std::string& path, const std::vector<StoredForecast>& forecasts);
std::vector<StoredForecast> load_forecasts(const std::string& path);

/// One fitted coefficient set, keyed by date and scope ("" under regional
/// pooling, the station id under local pooling).
struct DatedFit {
    Date date;
    std::string scope;
    FitResult fit;
};

void write_coefficients(const std::string& path, const std::vector<DatedFit>& fits,
                        int group_count);

enum class ReportFormat { CSV, JSON };

/// CSV: a two-line table (header and values, three decimals) with columns
/// crps, twcrps_r=<r>..., mae, rmse, coverage_pct, avg_width, log_score.
/// JSON: every report field at full precision, including the PIT values and
/// rank counts; load_report_json(write) reproduces the report exactly
/// (NaN round-trips via null).
void write_report(const VerificationReport& report, const std::string& path, ReportFormat format);
VerificationReport load_report_json(const std::string& path);

/// Histogram of values binned uniformly over [lo, hi]: bin_lo,bin_hi,count.
void write_histogram(const std::string& path, const std::vector<int>& counts, double lo,
                     double hi);

/// Rank histogram: rank,count with ranks 1..M+1.
void write_rank_histogram(const std::string& path, const std::vector<int>& counts);

struct DmEntry {
    std::string model_f;
    std::string model_g;
    DmResult result;
};

void write_dm_matrix(const std::string& path, const std::vector<DmEntry>& entries);

struct RejectionEntry {
    std::string model;
    double rate = 0.0;
};

void write_rejection_rates(const std::string& path, const std::vector<RejectionEntry>& entries);

struct SkillEntry {
    std::string model;
    double threshold = 0.0;
    double skill = 0.0;
};

void write_skill_curve(const std::string& path, const std::vector<SkillEntry>& entries);

}  // namespace emoscal
