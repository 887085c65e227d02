#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tradeflow/common.hpp"
#include "tradeflow/csv.hpp"

namespace tradeflow::ingest {

/// One bilateral trade observation: reporter's trade with partner in a given
/// year for one HS-2 chapter.
struct TradeRecord {
    std::string reporter;
    std::string partner;
    int year = 0;
    int hs_chapter = 0;
    double value = 0.0;
};

struct RowDiagnostic {
    std::size_t line_number = 0;
    std::string message;
};

struct TradeCsvResult {
    std::vector<TradeRecord> records;
    std::vector<RowDiagnostic> diagnostics;
};

/// Column-name mapping for trade CSVs. max_chapter widens the accepted code
/// range when a dataset carries codes past 96 (e.g. the 97-99 special
/// chapters); codes stay opaque integers either way.
struct TradeCsvSchema {
    std::string reporter = "reporter";
    std::string partner = "partner";
    std::string year = "year";
    std::string hs_chapter = "hs_chapter";
    std::string value = "value";
    int max_chapter = 96;
};

inline TradeCsvResult load_trade_csv(const std::filesystem::path& path,
                                     const TradeCsvSchema& schema = {}) {
    const csv::File file = csv::read_file(path);
    const std::size_t c_reporter = csv::column_index(file.header, schema.reporter);
    const std::size_t c_partner = csv::column_index(file.header, schema.partner);
    const std::size_t c_year = csv::column_index(file.header, schema.year);
    const std::size_t c_chapter = csv::column_index(file.header, schema.hs_chapter);
    const std::size_t c_value = csv::column_index(file.header, schema.value);
    const std::size_t npos = static_cast<std::size_t>(-1);
    require(c_reporter != npos && c_partner != npos && c_year != npos &&
                c_chapter != npos && c_value != npos,
            "trade CSV header does not match schema in " + path.string());

    TradeCsvResult result;
    for (const auto& row : file.rows) {
        auto reject = [&](const std::string& why) {
            result.diagnostics.push_back({row.line_number, why});
        };
        const std::size_t needed = std::max({c_reporter, c_partner, c_year, c_chapter, c_value});
        if (row.fields.size() <= needed) {
            reject("malformed row: expected at least " + std::to_string(needed + 1) +
                   " fields, got " + std::to_string(row.fields.size()));
            continue;
        }
        TradeRecord rec;
        rec.reporter = std::string(csv::trim(row.fields[c_reporter]));
        rec.partner = std::string(csv::trim(row.fields[c_partner]));
        const auto year = csv::to_int(row.fields[c_year]);
        const auto chapter = csv::to_int(row.fields[c_chapter]);
        const auto value = csv::to_double(row.fields[c_value]);
        if (rec.reporter.empty() || rec.partner.empty()) {
            reject("malformed row: empty country code");
            continue;
        }
        if (rec.reporter == rec.partner) {
            reject("rejected row: reporter equals partner (" + rec.reporter + ")");
            continue;
        }
        if (!year) {
            reject("malformed row: unparsable year '" + row.fields[c_year] + "'");
            continue;
        }
        if (!chapter) {
            reject("malformed row: unparsable hs_chapter '" + row.fields[c_chapter] + "'");
            continue;
        }
        if (*chapter < 1 || *chapter > schema.max_chapter) {
            reject("rejected row: hs_chapter " + std::to_string(*chapter) + " outside 1.." +
                   std::to_string(schema.max_chapter));
            continue;
        }
        if (!value) {
            reject("malformed row: unparsable value '" + row.fields[c_value] + "'");
            continue;
        }
        if (*value < 0.0) {
            reject("rejected row: negative trade value");
            continue;
        }
        rec.year = static_cast<int>(*year);
        rec.hs_chapter = static_cast<int>(*chapter);
        rec.value = *value;
        result.records.push_back(std::move(rec));
    }
    return result;
}

/// A country-pair-year basket: the set of chapters whose summed value
/// cleared the trade threshold.
struct Transaction {
    std::string id;
    std::string reporter;
    std::string partner;
    int year = 0;
    std::vector<int> items; // sorted ascending, no duplicates
};

using PairYearKey = std::tuple<std::string, std::string, int>;

/// Per-chapter value totals grouped by (reporter, partner, year).
inline std::map<PairYearKey, std::map<int, double>> aggregate_chapter_values(
    const std::vector<TradeRecord>& records) {
    std::map<PairYearKey, std::map<int, double>> groups;
    for (const auto& rec : records) {
        groups[{rec.reporter, rec.partner, rec.year}][rec.hs_chapter] += rec.value;
    }
    return groups;
}

/// Groups records by (reporter, partner, year). A chapter enters the basket
/// iff its summed value is strictly greater than min_value; empty baskets are
/// dropped. Output is sorted by (reporter, partner, year).
inline std::vector<Transaction> build_transactions(const std::vector<TradeRecord>& records,
                                                   double min_value = 0.0) {
    require(min_value >= 0.0, "min_value must be >= 0");
    const auto groups = aggregate_chapter_values(records);
    std::vector<Transaction> out;
    for (const auto& [key, chapters] : groups) {
        Transaction t;
        t.reporter = std::get<0>(key);
        t.partner = std::get<1>(key);
        t.year = std::get<2>(key);
        t.id = t.reporter + "|" + t.partner + "|" + std::to_string(t.year);
        for (const auto& [chapter, total] : chapters) {
            if (total > min_value) t.items.push_back(chapter);
        }
        if (!t.items.empty()) out.push_back(std::move(t));
    }
    return out;
}

/// Per-country feature vector for clustering.
struct CountryVector {
    std::string country;
    std::vector<double> features;
};

struct CountryMatrix {
    std::vector<CountryVector> vectors;  // sorted by country code
    std::vector<int> years;              // dimension labels for totals-by-year mode
};

/// Standardizes each dimension in place to zero mean / unit variance
/// (population std). A zero-variance dimension becomes all zeros.
inline void standardize_columns(std::vector<CountryVector>& vectors) {
    if (vectors.empty()) return;
    const std::size_t dims = vectors.front().features.size();
    for (const auto& v : vectors) {
        require(v.features.size() == dims, "country vectors have mixed dimensions");
    }
    const double n = static_cast<double>(vectors.size());
    for (std::size_t d = 0; d < dims; ++d) {
        double sum = 0.0;
        for (const auto& v : vectors) sum += v.features[d];
        const double mean = sum / n;
        double sq = 0.0;
        for (const auto& v : vectors) {
            const double dev = v.features[d] - mean;
            sq += dev * dev;
        }
        const double sd = std::sqrt(sq / n);
        for (auto& v : vectors) {
            v.features[d] = (sd > 0.0) ? (v.features[d] - mean) / sd : 0.0;
        }
    }
}

/// Builds one vector per country (appearing as reporter or partner) of its
/// total trade per year, both directions summed, then standardizes per year.
inline CountryMatrix build_country_vectors(const std::vector<TradeRecord>& records) {
    std::set<std::string> countries;
    std::set<int> years;
    for (const auto& rec : records) {
        countries.insert(rec.reporter);
        countries.insert(rec.partner);
        years.insert(rec.year);
    }
    require(countries.size() >= 2, "country vectors need at least 2 countries");

    CountryMatrix matrix;
    matrix.years.assign(years.begin(), years.end());
    std::map<std::string, std::size_t> country_index;
    for (const auto& c : countries) {
        country_index.emplace(c, matrix.vectors.size());
        matrix.vectors.push_back({c, std::vector<double>(matrix.years.size(), 0.0)});
    }
    std::map<int, std::size_t> year_index;
    for (std::size_t i = 0; i < matrix.years.size(); ++i) year_index.emplace(matrix.years[i], i);

    for (const auto& rec : records) {
        const std::size_t y = year_index.at(rec.year);
        matrix.vectors[country_index.at(rec.reporter)].features[y] += rec.value;
        matrix.vectors[country_index.at(rec.partner)].features[y] += rec.value;
    }
    standardize_columns(matrix.vectors);
    return matrix;
}

/// One gravity-feature observation for an (origin, destination, year,
/// commodity) trade flow.
struct FeatureRow {
    std::string origin;
    std::string destination;
    int year = 0;
    std::string commodity;
    std::vector<double> features;
    double target = 0.0;
};

struct FeatureTable {
    std::vector<std::string> feature_names;
    std::vector<FeatureRow> rows;
    std::vector<std::size_t> imputed_counts; // per feature column
    std::vector<RowDiagnostic> diagnostics;
};

/// Loads a feature CSV with header origin,destination,year,commodity,
/// <feature...>,target. Missing feature cells are imputed with the column
/// median (count reported per column); rows with a missing or negative
/// target are rejected.
inline FeatureTable load_feature_csv(const std::filesystem::path& path) {
    const csv::File file = csv::read_file(path);
    require(file.header.size() >= 6, "feature CSV needs origin,destination,year,commodity,<feature...>,target");
    require(file.header[0] == "origin" && file.header[1] == "destination" &&
                file.header[2] == "year" && file.header[3] == "commodity" &&
                file.header.back() == "target",
            "feature CSV header must be origin,destination,year,commodity,<feature...>,target");

    FeatureTable table;
    table.feature_names.assign(file.header.begin() + 4, file.header.end() - 1);
    const std::size_t n_features = table.feature_names.size();
    table.imputed_counts.assign(n_features, 0);

    std::vector<std::vector<bool>> missing_mask;
    for (const auto& row : file.rows) {
        auto reject = [&](const std::string& why) {
            table.diagnostics.push_back({row.line_number, why});
        };
        if (row.fields.size() != file.header.size()) {
            reject("malformed row: expected " + std::to_string(file.header.size()) +
                   " fields, got " + std::to_string(row.fields.size()));
            continue;
        }
        FeatureRow fr;
        fr.origin = std::string(csv::trim(row.fields[0]));
        fr.destination = std::string(csv::trim(row.fields[1]));
        const auto year = csv::to_int(row.fields[2]);
        fr.commodity = std::string(csv::trim(row.fields[3]));
        if (fr.origin.empty() || fr.destination.empty() || !year) {
            reject("malformed row: bad origin/destination/year");
            continue;
        }
        fr.year = static_cast<int>(*year);
        std::vector<bool> miss(n_features, false);
        bool bad = false;
        fr.features.resize(n_features, 0.0);
        for (std::size_t f = 0; f < n_features && !bad; ++f) {
            const std::string& cell = row.fields[4 + f];
            if (csv::is_missing(cell)) {
                miss[f] = true;
            } else if (const auto v = csv::to_double(cell)) {
                fr.features[f] = *v;
            } else {
                reject("malformed row: unparsable feature '" + table.feature_names[f] + "'");
                bad = true;
            }
        }
        if (bad) continue;
        const std::string& target_cell = row.fields.back();
        const auto target = csv::to_double(target_cell);
        if (csv::is_missing(target_cell) || !target) {
            reject("rejected row: missing or unparsable target");
            continue;
        }
        if (*target < 0.0) {
            reject("rejected row: negative target");
            continue;
        }
        fr.target = *target;
        table.rows.push_back(std::move(fr));
        missing_mask.push_back(std::move(miss));
    }

    // Column-median imputation for the missing cells.
    for (std::size_t f = 0; f < n_features; ++f) {
        std::vector<double> present;
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            if (!missing_mask[r][f]) present.push_back(table.rows[r].features[f]);
        }
        double median = 0.0;
        if (!present.empty()) {
            std::sort(present.begin(), present.end());
            const std::size_t n = present.size();
            median = (n % 2 == 1) ? present[n / 2] : 0.5 * (present[n / 2 - 1] + present[n / 2]);
        }
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            if (missing_mask[r][f]) {
                table.rows[r].features[f] = median;
                ++table.imputed_counts[f];
            }
        }
    }
    return table;
}

} // namespace tradeflow::ingest
