#include "emoscal/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>

#include <json.hpp>

namespace emoscal {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string format_double(const double v)
{
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string format_fixed3(const double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return std::string(buf);
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line, const char sep)
{
    std::vector<std::string_view> fields;
    while (true) {
        const std::size_t pos = line.find(sep);
        if (pos == std::string_view::npos) {
            fields.push_back(line);
            return fields;
        }
        fields.push_back(line.substr(0, pos));
        line.remove_prefix(pos + 1);
    }
}

double parse_double(std::string_view text, const std::string& context)
{
    text = trim(text);
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw std::runtime_error(context + ": malformed number '" + std::string(text) + "'");
    return value;
}

long parse_long(std::string_view text, const std::string& context)
{
    text = trim(text);
    long value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw std::runtime_error(context + ": malformed integer '" + std::string(text) + "'");
    return value;
}

std::vector<std::string> read_lines(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path + " for reading");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
    if (!out) throw std::runtime_error("write to " + path + " failed");
}

std::string line_context(const std::string& path, const std::size_t line_no)
{
    return path + ":" + std::to_string(line_no);
}

void check_station_id(const std::string& station, const std::string& context)
{
    if (station.empty()) throw std::runtime_error(context + ": empty station id");
    if (station.find(',') != std::string::npos || station.find(';') != std::string::npos)
        throw std::runtime_error(context + ": station id '" + station +
                                 "' contains a reserved separator");
}

Date parse_date_field(std::string_view text, const std::string& context)
{
    try {
        return Date::parse(std::string(trim(text)));
    } catch (const std::exception& e) {
        throw std::runtime_error(context + ": " + e.what());
    }
}

}  // namespace

LoadedDataset load_dataset(const std::string& path)
{
    const std::vector<std::string> lines = read_lines(path);
    if (lines.empty()) throw std::runtime_error(path + ": empty dataset file");

    const std::vector<std::string_view> header = split(trim(lines[0]), ',');
    if (header.size() < 5 || trim(header[0]) != "date" || trim(header[1]) != "station" ||
        trim(header[2]) != "observation")
        throw std::runtime_error(line_context(path, 1) +
                                 ": expected header date,station,observation,member_1,...");
    const int member_count = static_cast<int>(header.size()) - 3;

    LoadedDataset out;
    out.member_count = member_count;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::string_view raw = trim(lines[i]);
        if (raw.empty()) continue;
        const std::string context = line_context(path, i + 1);
        const std::vector<std::string_view> fields = split(raw, ',');
        if (fields.size() != header.size())
            throw std::runtime_error(context + ": expected " + std::to_string(header.size()) +
                                     " fields, found " + std::to_string(fields.size()));
        ForecastCase fc;
        fc.date = parse_date_field(fields[0], context);
        fc.station_id = std::string(trim(fields[1]));
        check_station_id(fc.station_id, context);
        if (!trim(fields[2]).empty()) {
            const double obs = parse_double(fields[2], context);
            if (!(obs >= 0.0) || !std::isfinite(obs))
                throw std::runtime_error(context + ": observation must be finite and >= 0");
            fc.observation = obs;
        }
        fc.members.reserve(static_cast<std::size_t>(member_count));
        for (int m = 0; m < member_count; ++m) {
            const double v = parse_double(fields[static_cast<std::size_t>(m) + 3], context);
            if (!(v >= 0.0) || !std::isfinite(v))
                throw std::runtime_error(context + ": member values must be finite and >= 0");
            fc.members.push_back(v);
        }
        out.cases.push_back(std::move(fc));
    }
    if (out.cases.empty()) throw std::runtime_error(path + ": no data rows");
    std::stable_sort(out.cases.begin(), out.cases.end(),
                     [](const ForecastCase& a, const ForecastCase& b) {
                         if (a.date != b.date) return a.date < b.date;
                         return a.station_id < b.station_id;
                     });
    return out;
}

void write_dataset(const std::string& path, const std::vector<ForecastCase>& cases)
{
    if (cases.empty()) throw std::invalid_argument("write_dataset: no cases");
    const std::size_t member_count = cases[0].members.size();
    std::string text = "date,station,observation";
    for (std::size_t m = 0; m < member_count; ++m)
        text += ",member_" + std::to_string(m + 1);
    text += '\n';
    for (const ForecastCase& fc : cases) {
        if (fc.members.size() != member_count)
            throw std::invalid_argument("write_dataset: inconsistent member counts");
        check_station_id(fc.station_id, "write_dataset");
        text += fc.date.to_string();
        text += ',';
        text += fc.station_id;
        text += ',';
        if (fc.observation) text += format_double(*fc.observation);
        for (const double v : fc.members) {
            text += ',';
            text += format_double(v);
        }
        text += '\n';
    }
    write_text(path, text);
}

ConfigMap ConfigMap::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path + " for reading");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return from_text(buffer.str(), path);
}

ConfigMap ConfigMap::from_text(const std::string& text, const std::string& origin)
{
    ConfigMap config;
    config.origin_ = origin;
    std::size_t line_no = 0;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view body(line);
        const std::size_t hash = body.find('#');
        if (hash != std::string_view::npos) body = body.substr(0, hash);
        body = trim(body);
        if (body.empty()) continue;
        const std::size_t eq = body.find('=');
        if (eq == std::string_view::npos)
            throw std::runtime_error(line_context(origin, line_no) + ": expected key = value");
        const std::string key(trim(body.substr(0, eq)));
        const std::string value(trim(body.substr(eq + 1)));
        if (key.empty())
            throw std::runtime_error(line_context(origin, line_no) + ": empty key");
        if (!config.values_.emplace(key, value).second)
            throw std::runtime_error(line_context(origin, line_no) + ": duplicate key '" + key +
                                     "'");
    }
    return config;
}

bool ConfigMap::has(const std::string& key) const { return values_.count(key) != 0; }

std::string ConfigMap::get(const std::string& key) const
{
    const auto it = values_.find(key);
    if (it == values_.end())
        throw std::runtime_error(origin_ + ": missing required key '" + key + "'");
    return it->second;
}

std::string ConfigMap::get_or(const std::string& key, const std::string& fallback) const
{
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

int ConfigMap::get_int(const std::string& key) const
{
    return static_cast<int>(parse_long(get(key), origin_ + " key '" + key + "'"));
}

int ConfigMap::get_int_or(const std::string& key, const int fallback) const
{
    return has(key) ? get_int(key) : fallback;
}

double ConfigMap::get_double(const std::string& key) const
{
    return parse_double(get(key), origin_ + " key '" + key + "'");
}

double ConfigMap::get_double_or(const std::string& key, const double fallback) const
{
    return has(key) ? get_double(key) : fallback;
}

std::uint64_t ConfigMap::get_uint64_or(const std::string& key, const std::uint64_t fallback) const
{
    if (!has(key)) return fallback;
    const std::string text = get(key);
    std::uint64_t value = 0;
    const std::string_view sv = trim(text);
    const auto res = std::from_chars(sv.data(), sv.data() + sv.size(), value);
    if (res.ec != std::errc{} || res.ptr != sv.data() + sv.size())
        throw std::runtime_error(origin_ + " key '" + key + "': malformed unsigned integer '" +
                                 text + "'");
    return value;
}

std::vector<double> ConfigMap::get_double_list(const std::string& key) const
{
    const std::string text = get(key);
    std::vector<double> values;
    for (const std::string_view item : split(text, ','))
        values.push_back(parse_double(item, origin_ + " key '" + key + "'"));
    return values;
}

std::vector<int> ConfigMap::get_int_list(const std::string& key) const
{
    const std::string text = get(key);
    std::vector<int> values;
    for (const std::string_view item : split(text, ','))
        values.push_back(static_cast<int>(parse_long(item, origin_ + " key '" + key + "'")));
    return values;
}

namespace {

std::string encode_params(const PredictiveDistribution& dist, std::string& kind)
{
    return std::visit(
        [&kind](const auto& d) -> std::string {
            using D = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<D, TruncatedNormal>) {
                kind = "TN";
                return format_double(d.location()) + ';' + format_double(d.scale());
            } else if constexpr (std::is_same_v<D, LogNormal>) {
                kind = "LN";
                return format_double(d.location()) + ';' + format_double(d.shape());
            } else if constexpr (std::is_same_v<D, TnLnMixture>) {
                kind = "MIXTURE";
                return format_double(d.weight()) + ';' + format_double(d.tn().location()) + ';' +
                       format_double(d.tn().scale()) + ';' + format_double(d.ln().location()) +
                       ';' + format_double(d.ln().shape());
            } else {
                kind = "EMPIRICAL";
                std::string joined;
                for (const double v : d.values()) {
                    if (!joined.empty()) joined += ';';
                    joined += format_double(v);
                }
                return joined;
            }
        },
        dist);
}

PredictiveDistribution decode_params(const std::string_view kind, const std::string_view params,
                                     const std::string& context)
{
    std::vector<double> p;
    for (const std::string_view item : split(params, ';')) p.push_back(parse_double(item, context));
    try {
        if (kind == "TN") {
            if (p.size() != 2)
                throw std::runtime_error("TN forecast needs 2 parameters");
            return TruncatedNormal(p[0], p[1]);
        }
        if (kind == "LN") {
            if (p.size() != 2)
                throw std::runtime_error("LN forecast needs 2 parameters");
            return LogNormal(p[0], p[1]);
        }
        if (kind == "MIXTURE") {
            if (p.size() != 5)
                throw std::runtime_error("MIXTURE forecast needs 5 parameters");
            return TnLnMixture(p[0], TruncatedNormal(p[1], p[2]), LogNormal(p[3], p[4]));
        }
        if (kind == "EMPIRICAL") return EmpiricalDistribution(std::move(p));
    } catch (const std::exception& e) {
        throw std::runtime_error(context + ": " + e.what());
    }
    throw std::runtime_error(context + ": unknown forecast kind '" + std::string(kind) + "'");
}

}  // namespace

void write_forecasts(const std::string& path, const std::vector<StoredForecast>& forecasts)
{
    std::string text = "date,station,kind,params\n";
    for (const StoredForecast& f : forecasts) {
        check_station_id(f.station, "write_forecasts");
        std::string kind;
        const std::string params = encode_params(f.distribution, kind);
        text += f.date.to_string() + ',' + f.station + ',' + kind + ',' + params + '\n';
    }
    write_text(path, text);
}

std::vector<StoredForecast> load_forecasts(const std::string& path)
{
    const std::vector<std::string> lines = read_lines(path);
    if (lines.empty() || trim(lines[0]) != "date,station,kind,params")
        throw std::runtime_error(line_context(path, 1) +
                                 ": expected header date,station,kind,params");
    std::vector<StoredForecast> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::string_view raw = trim(lines[i]);
        if (raw.empty()) continue;
        const std::string context = line_context(path, i + 1);
        const std::vector<std::string_view> fields = split(raw, ',');
        if (fields.size() != 4)
            throw std::runtime_error(context + ": expected 4 fields, found " +
                                     std::to_string(fields.size()));
        StoredForecast f{parse_date_field(fields[0], context), std::string(trim(fields[1])),
                         decode_params(trim(fields[2]), trim(fields[3]), context)};
        check_station_id(f.station, context);
        out.push_back(std::move(f));
    }
    return out;
}

void write_coefficients(const std::string& path, const std::vector<DatedFit>& fits,
                        const int group_count)
{
    if (group_count < 1) throw std::invalid_argument("write_coefficients: bad group count");
    std::string text = "date,scope,kind,objective_value,iterations,converged,threshold,weight";
    for (int k = 0; k <= group_count; ++k) text += ",a_" + std::to_string(k);
    text += ",b_0,b_1";
    for (int k = 0; k <= group_count; ++k) text += ",alpha_" + std::to_string(k);
    text += ",beta_0,beta_1\n";

    for (const DatedFit& df : fits) {
        const CoefficientSet& c = df.fit.coefficients;
        text += df.date.to_string() + ',' + df.scope + ',' + to_string(c.kind) + ',';
        text += format_double(df.fit.objective_value) + ',';
        text += std::to_string(df.fit.iterations) + ',';
        text += df.fit.converged ? "1," : "0,";
        if (c.threshold) text += format_double(*c.threshold);
        text += ',';
        if (c.weight) text += format_double(*c.weight);
        if (c.tn) {
            if (c.tn->a.size() != static_cast<std::size_t>(group_count))
                throw std::invalid_argument("write_coefficients: TN block has wrong group count");
            text += ',' + format_double(c.tn->a0);
            for (const double a : c.tn->a) text += ',' + format_double(a);
            text += ',' + format_double(c.tn->b0) + ',' + format_double(c.tn->b1);
        } else {
            for (int k = 0; k < group_count + 3; ++k) text += ',';
        }
        if (c.ln) {
            if (c.ln->alpha.size() != static_cast<std::size_t>(group_count))
                throw std::invalid_argument("write_coefficients: LN block has wrong group count");
            text += ',' + format_double(c.ln->alpha0);
            for (const double a : c.ln->alpha) text += ',' + format_double(a);
            text += ',' + format_double(c.ln->beta0) + ',' + format_double(c.ln->beta1);
        } else {
            for (int k = 0; k < group_count + 3; ++k) text += ',';
        }
        text += '\n';
    }
    write_text(path, text);
}

namespace {

ordered_json json_or_null(const double v)
{
    if (std::isfinite(v)) return v;
    return nullptr;
}

}  // namespace

void write_report(const VerificationReport& report, const std::string& path,
                  const ReportFormat format)
{
    if (format == ReportFormat::CSV) {
        std::string header = "crps";
        std::string values = format_fixed3(report.mean_crps);
        for (const auto& [r, score] : report.mean_twcrps) {
            header += ",twcrps_r=" + format_double(r);
            values += ',' + format_fixed3(score);
        }
        header += ",mae,rmse,coverage_pct,avg_width,log_score";
        values += ',' + format_fixed3(report.mae_median);
        values += ',' + format_fixed3(report.rmse_mean);
        values += ',' + format_fixed3(report.coverage_pct);
        values += ',' + format_fixed3(report.avg_width);
        values += ',' + format_fixed3(report.mean_logs);
        write_text(path, header + '\n' + values + '\n');
        return;
    }

    ordered_json j;
    j["mean_crps"] = report.mean_crps;
    ordered_json tw = ordered_json::array();
    for (const auto& [r, score] : report.mean_twcrps)
        tw.push_back(ordered_json{{"threshold", r}, {"mean_score", score}});
    j["mean_twcrps"] = std::move(tw);
    j["mean_logs"] = json_or_null(report.mean_logs);
    j["logs_infinite"] = report.logs_infinite;
    j["mae_median"] = report.mae_median;
    j["rmse_mean"] = report.rmse_mean;
    j["coverage_pct"] = report.coverage_pct;
    j["avg_width"] = report.avg_width;
    j["pit_values"] = report.pit_values;
    j["rank_counts"] = report.rank_counts;
    write_text(path, j.dump(2) + '\n');
}

VerificationReport load_report_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path + " for reading");
    ordered_json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    VerificationReport report;
    try {
        report.mean_crps = j.at("mean_crps").get<double>();
        for (const auto& item : j.at("mean_twcrps"))
            report.mean_twcrps.emplace_back(item.at("threshold").get<double>(),
                                            item.at("mean_score").get<double>());
        report.logs_infinite = j.at("logs_infinite").get<bool>();
        if (j.at("mean_logs").is_null())
            report.mean_logs = report.logs_infinite
                                   ? std::numeric_limits<double>::infinity()
                                   : std::numeric_limits<double>::quiet_NaN();
        else
            report.mean_logs = j.at("mean_logs").get<double>();
        report.mae_median = j.at("mae_median").get<double>();
        report.rmse_mean = j.at("rmse_mean").get<double>();
        report.coverage_pct = j.at("coverage_pct").get<double>();
        report.avg_width = j.at("avg_width").get<double>();
        report.pit_values = j.at("pit_values").get<std::vector<double>>();
        report.rank_counts = j.at("rank_counts").get<std::vector<int>>();
    } catch (const ordered_json::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    return report;
}

void write_histogram(const std::string& path, const std::vector<int>& counts, const double lo,
                     const double hi)
{
    if (counts.empty()) throw std::invalid_argument("write_histogram: no bins");
    if (!(hi > lo)) throw std::invalid_argument("write_histogram: hi must exceed lo");
    const double width = (hi - lo) / static_cast<double>(counts.size());
    std::string text = "bin_lo,bin_hi,count\n";
    for (std::size_t b = 0; b < counts.size(); ++b) {
        const double bin_lo = lo + width * static_cast<double>(b);
        const double bin_hi = b + 1 == counts.size() ? hi : lo + width * static_cast<double>(b + 1);
        text += format_double(bin_lo) + ',' + format_double(bin_hi) + ',' +
                std::to_string(counts[b]) + '\n';
    }
    write_text(path, text);
}

void write_rank_histogram(const std::string& path, const std::vector<int>& counts)
{
    std::string text = "rank,count\n";
    for (std::size_t r = 0; r < counts.size(); ++r)
        text += std::to_string(r + 1) + ',' + std::to_string(counts[r]) + '\n';
    write_text(path, text);
}

void write_dm_matrix(const std::string& path, const std::vector<DmEntry>& entries)
{
    std::string text = "model_f,model_g,t_stat,p_value,lag,degenerate\n";
    for (const DmEntry& e : entries) {
        text += e.model_f + ',' + e.model_g + ',' + format_double(e.result.t_stat) + ',' +
                format_double(e.result.p_value) + ',' + std::to_string(e.result.lag) + ',' +
                (e.result.degenerate ? "1" : "0") + '\n';
    }
    write_text(path, text);
}

void write_rejection_rates(const std::string& path, const std::vector<RejectionEntry>& entries)
{
    std::string text = "model,rejection_rate\n";
    for (const RejectionEntry& e : entries)
        text += e.model + ',' + format_double(e.rate) + '\n';
    write_text(path, text);
}

void write_skill_curve(const std::string& path, const std::vector<SkillEntry>& entries)
{
    std::string text = "model,threshold,twcrpss\n";
    for (const SkillEntry& e : entries)
        text += e.model + ',' + format_double(e.threshold) + ',' + format_double(e.skill) + '\n';
    write_text(path, text);
}

}  // namespace emoscal
