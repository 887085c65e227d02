#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "tradeflow/common.hpp"
#include "tradeflow/csv.hpp"

namespace tradeflow::sentinel {

/// Calendar date, serialized M/D/YYYY.
struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    bool operator==(const Date& o) const {
        return year == o.year && month == o.month && day == o.day;
    }
    bool operator<(const Date& o) const {
        return std::tie(year, month, day) < std::tie(o.year, o.month, o.day);
    }

    std::string to_string() const {
        return std::to_string(month) + "/" + std::to_string(day) + "/" + std::to_string(year);
    }

    static Date parse(std::string_view text) {
        int parts[3] = {0, 0, 0};
        int idx = 0;
        int value = 0;
        bool have_digit = false;
        for (char c : text) {
            if (c >= '0' && c <= '9') {
                value = value * 10 + (c - '0');
                have_digit = true;
            } else if (c == '/') {
                require(idx < 2 && have_digit, "bad date: " + std::string(text));
                parts[idx++] = value;
                value = 0;
                have_digit = false;
            } else if (c != ' ') {
                throw Error("bad date: " + std::string(text));
            }
        }
        require(idx == 2 && have_digit, "bad date: " + std::string(text));
        parts[2] = value;
        Date d{parts[2], parts[0], parts[1]};
        require(d.month >= 1 && d.month <= 12 && d.day >= 1 && d.day <= 31,
                "date out of range: " + std::string(text));
        return d;
    }
};

struct SeriesPoint {
    Date date;
    double value = 0.0;
};

enum class FlagColor { Green, Blue, Yellow, Orange, Red };

inline const char* color_name(FlagColor c) {
    switch (c) {
        case FlagColor::Green: return "Green";
        case FlagColor::Blue: return "Blue";
        case FlagColor::Yellow: return "Yellow";
        case FlagColor::Orange: return "Orange";
        case FlagColor::Red: return "Red";
    }
    return "Red";
}

struct WindowRange {
    int span = 0; // number of trailing observations; 0 means the full history
    double min = 0.0;
    double max = 0.0;
    std::size_t points = 0;
};

struct FlagResult {
    std::string series;
    double value = 0.0;
    FlagColor color = FlagColor::Red;
    std::vector<WindowRange> windows_checked; // spans 3, 5, 10, full
};

struct FlagConfig {
    // Windows normally count trailing observations; with calendar_windows a
    // span of n covers the last n calendar years of the history instead.
    bool calendar_windows = false;
};

/// Classifies a value against the nested trailing ranges of its history:
/// Green within the last-3 range, Blue within last-5, Yellow within last-10,
/// Orange within the full range, Red outside all of them. Ranges are
/// inclusive; a window shorter than its span uses whatever points exist, and
/// Green needs at least two. History must be in chronological order.
inline FlagResult flag_value(const std::string& series_id,
                             const std::vector<SeriesPoint>& history, double value,
                             const FlagConfig& config = {}) {
    require(!history.empty(), "flag_value needs a non-empty history");

    auto window_range = [&](std::size_t span) {
        const std::size_t n = history.size();
        std::size_t take = (span == 0 || span > n) ? n : span;
        if (config.calendar_windows && span > 0) {
            const int cutoff = history.back().date.year - static_cast<int>(span) + 1;
            take = 0;
            for (std::size_t i = n; i-- > 0;) {
                if (history[i].date.year < cutoff) break;
                ++take;
            }
        }
        WindowRange w;
        w.span = static_cast<int>(span);
        w.points = take;
        w.min = std::numeric_limits<double>::max();
        w.max = std::numeric_limits<double>::lowest();
        for (std::size_t i = n - take; i < n; ++i) {
            w.min = std::min(w.min, history[i].value);
            w.max = std::max(w.max, history[i].value);
        }
        return w;
    };

    FlagResult result;
    result.series = series_id;
    result.value = value;
    result.windows_checked = {window_range(3), window_range(5), window_range(10), window_range(0)};

    auto inside = [&](const WindowRange& w) { return value >= w.min && value <= w.max; };
    const auto& w3 = result.windows_checked[0];
    const auto& w5 = result.windows_checked[1];
    const auto& w10 = result.windows_checked[2];
    const auto& full = result.windows_checked[3];

    if (w3.points >= 2 && inside(w3)) result.color = FlagColor::Green;
    else if (inside(w5)) result.color = FlagColor::Blue;
    else if (inside(w10)) result.color = FlagColor::Yellow;
    else if (inside(full)) result.color = FlagColor::Orange;
    else result.color = FlagColor::Red;
    return result;
}

struct MadConfig {
    double threshold = 3.0;
    double consistency_constant = 1.4826;
    bool linear_detrend = false; // fit and remove an OLS line before scoring

    void validate() const {
        require(threshold > 0.0, "MAD threshold must be > 0");
        require(consistency_constant > 0.0, "MAD consistency constant must be > 0");
    }
};

namespace detail {

inline double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return (n % 2 == 1) ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

} // namespace detail

struct MadResult {
    double median = 0.0;
    double mad = 0.0;
    std::vector<std::size_t> outlier_indices;
};

/// Median absolute deviation screen: a value is an outlier when its distance
/// from the median exceeds threshold * constant * MAD. With MAD exactly zero
/// (more than half the values identical), every value off the median is
/// flagged.
inline MadResult mad_univariate(const std::vector<double>& values, const MadConfig& config = {}) {
    config.validate();
    require(values.size() >= 3, "mad_univariate needs at least 3 values");
    MadResult result;
    result.median = detail::median_of(values);
    std::vector<double> deviations;
    deviations.reserve(values.size());
    for (double v : values) deviations.push_back(std::abs(v - result.median));
    result.mad = detail::median_of(deviations);

    if (result.mad == 0.0) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (values[i] != result.median) result.outlier_indices.push_back(i);
        }
        return result;
    }
    const double cutoff = config.threshold * config.consistency_constant * result.mad;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (std::abs(values[i] - result.median) > cutoff) result.outlier_indices.push_back(i);
    }
    return result;
}

struct GeometricMadResult {
    double median_x = 0.0;
    double median_y = 0.0;
    double gmad = 0.0; // sqrt(MAD_x^2 + MAD_y^2)
    std::vector<std::size_t> outlier_indices;
};

/// Two-dimensional MAD: gmad is the quadrature sum of the per-axis MADs and a
/// pair is flagged when its Euclidean distance from the medians exceeds
/// threshold * constant * gmad. A zero gmad falls back to the identical-value
/// rule on both axes.
inline GeometricMadResult mad_geometric(const std::vector<std::pair<double, double>>& pairs,
                                        const MadConfig& config = {}) {
    config.validate();
    require(pairs.size() >= 3, "mad_geometric needs at least 3 pairs");
    std::vector<double> xs, ys;
    xs.reserve(pairs.size());
    ys.reserve(pairs.size());
    for (const auto& [x, y] : pairs) {
        xs.push_back(x);
        ys.push_back(y);
    }
    GeometricMadResult result;
    result.median_x = detail::median_of(xs);
    result.median_y = detail::median_of(ys);
    std::vector<double> dev_x, dev_y;
    for (const auto& [x, y] : pairs) {
        dev_x.push_back(std::abs(x - result.median_x));
        dev_y.push_back(std::abs(y - result.median_y));
    }
    const double mad_x = detail::median_of(dev_x);
    const double mad_y = detail::median_of(dev_y);
    result.gmad = std::sqrt(mad_x * mad_x + mad_y * mad_y);

    if (result.gmad == 0.0) {
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            if (pairs[i].first != result.median_x || pairs[i].second != result.median_y) {
                result.outlier_indices.push_back(i);
            }
        }
        return result;
    }
    const double cutoff = config.threshold * config.consistency_constant * result.gmad;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const double dx = pairs[i].first - result.median_x;
        const double dy = pairs[i].second - result.median_y;
        if (std::sqrt(dx * dx + dy * dy) > cutoff) result.outlier_indices.push_back(i);
    }
    return result;
}

struct OutlierReport {
    struct Row {
        std::string description;
        double value = 0.0;
        Date timestamp;
    };
    std::vector<Row> rows;
    double median = 0.0;
    double mad = 0.0;
};

/// Runs the univariate MAD screen over a dated series (optionally detrended
/// with an OLS line first) and reports the flagged points with their original
/// values and timestamps.
inline OutlierReport detect_series_outliers(const std::string& description,
                                            const std::vector<SeriesPoint>& series,
                                            const MadConfig& config = {}) {
    require(series.size() >= 3, "detect_series_outliers needs at least 3 points");
    for (std::size_t i = 1; i < series.size(); ++i) {
        require(series[i - 1].date < series[i].date,
                "series timestamps must be strictly increasing: " + description);
    }
    std::vector<double> values;
    values.reserve(series.size());
    for (const auto& p : series) values.push_back(p.value);

    if (config.linear_detrend) {
        const double n = static_cast<double>(values.size());
        double sum_i = 0.0, sum_v = 0.0, sum_iv = 0.0, sum_ii = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double x = static_cast<double>(i);
            sum_i += x;
            sum_v += values[i];
            sum_iv += x * values[i];
            sum_ii += x * x;
        }
        const double denom = n * sum_ii - sum_i * sum_i;
        const double slope = denom != 0.0 ? (n * sum_iv - sum_i * sum_v) / denom : 0.0;
        const double intercept = (sum_v - slope * sum_i) / n;
        for (std::size_t i = 0; i < values.size(); ++i) {
            values[i] -= intercept + slope * static_cast<double>(i);
        }
    }

    const MadResult mad = mad_univariate(values, config);
    OutlierReport report;
    report.median = mad.median;
    report.mad = mad.mad;
    for (std::size_t i : mad.outlier_indices) {
        report.rows.push_back({description, series[i].value, series[i].date});
    }
    return report;
}

/// Commodity balance-sheet totals in physical units.
struct SupplyLedger {
    double production = 0.0;
    double imports = 0.0;
    double beginning_stocks = 0.0;
    double farm_inputs = 0.0;
    double exports = 0.0;
    double ending_stocks = 0.0;
};

/// Available food supply: (production + imports + beginning stocks) minus
/// disappearance (farm inputs + exports + ending stocks).
inline double food_supply(const SupplyLedger& ledger) {
    require(std::isfinite(ledger.production) && std::isfinite(ledger.imports) &&
                std::isfinite(ledger.beginning_stocks) && std::isfinite(ledger.farm_inputs) &&
                std::isfinite(ledger.exports) && std::isfinite(ledger.ending_stocks),
            "supply ledger components must be finite");
    require(ledger.beginning_stocks >= 0.0 && ledger.ending_stocks >= 0.0,
            "stocks cannot be negative");
    return (ledger.production + ledger.imports + ledger.beginning_stocks) -
           (ledger.farm_inputs + ledger.exports + ledger.ending_stocks);
}

struct FlagRow {
    std::string series;
    std::string statistical_type;
    std::string unit;
    double value = 0.0;
    FlagColor color = FlagColor::Red;
};

inline void write_flags_csv(std::ostream& out, const std::vector<FlagRow>& rows,
                            const std::vector<std::string>& comment_lines = {}) {
    for (const auto& line : comment_lines) out << "# " << line << "\n";
    out << "series,statistical_type,unit,value,color\n";
    for (const auto& r : rows) {
        out << csv::escape(r.series) << "," << csv::escape(r.statistical_type) << ","
            << csv::escape(r.unit) << "," << csv::fixed(r.value, 6) << "," << color_name(r.color)
            << "\n";
    }
}

inline void write_outliers_csv(std::ostream& out, const std::vector<OutlierReport::Row>& rows,
                               const std::vector<std::string>& comment_lines = {}) {
    for (const auto& line : comment_lines) out << "# " << line << "\n";
    out << "description,value,timestamp\n";
    for (const auto& r : rows) {
        out << csv::escape(r.description) << "," << csv::fixed(r.value, 6) << ","
            << r.timestamp.to_string() << "\n";
    }
}

} // namespace tradeflow::sentinel
