#pragma once

#include <chrono>
#include <compare>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace emoscal {

/// Calendar date (no time component). Thin wrapper over std::chrono with
/// ISO 8601 (YYYY-MM-DD) parsing and formatting.
class Date {
public:
    Date() : days_(0) {}

    Date(int year, unsigned month, unsigned day)
    {
        const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                              std::chrono::day{day}};
        if (!ymd.ok()) throw std::invalid_argument("Date: invalid calendar date");
        days_ = std::chrono::sys_days{ymd}.time_since_epoch().count();
    }

    static Date parse(const std::string& text)
    {
        int y = 0;
        unsigned m = 0, d = 0;
        char tail = '\0';
        if (std::sscanf(text.c_str(), "%d-%u-%u%c", &y, &m, &d, &tail) != 3)
            throw std::invalid_argument("Date: expected YYYY-MM-DD, got '" + text + "'");
        return Date(y, m, d);
    }

    std::string to_string() const
    {
        const auto ymd = ymd_();
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                      unsigned(ymd.day()));
        return buf;
    }

    Date plus_days(int n) const
    {
        Date out;
        out.days_ = days_ + n;
        return out;
    }

    /// Signed count of calendar days from other to *this.
    int days_since(const Date& other) const { return static_cast<int>(days_ - other.days_); }

    friend auto operator<=>(const Date&, const Date&) = default;

private:
    std::chrono::year_month_day ymd_() const
    {
        return std::chrono::year_month_day{
            std::chrono::sys_days{std::chrono::days{days_}}};
    }

    long days_;
};

}  // namespace emoscal
