#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tradeflow/common.hpp"

namespace tradeflow::csv {

/// Splits one CSV line. Handles quoted fields with embedded commas and
/// doubled quotes; does not handle embedded newlines (none of our formats
/// emit them).
inline std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> fields;
    std::string current;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                current.push_back(c);
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

/// Quotes a field when it contains a comma, quote, or newline.
inline std::string escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

/// Fixed-point formatting, e.g. fixed(0.4051144, 6) -> "0.405114".
inline std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::optional<double> to_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

inline std::optional<long long> to_int(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

/// Empty cells and the usual NA spellings count as missing.
inline bool is_missing(std::string_view s) {
    s = trim(s);
    if (s.empty()) return true;
    return s == "NA" || s == "na" || s == "NaN" || s == "nan" || s == "NULL" || s == "null";
}

struct Row {
    std::size_t line_number = 0; // 1-based, counting every physical line
    std::vector<std::string> fields;
};

struct File {
    std::vector<std::string> header;
    std::vector<Row> rows;
};

/// Reads a whole CSV file: first non-comment line is the header, '#'-prefixed
/// lines are skipped everywhere (our own outputs carry '#' metadata lines).
inline File read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(in.good(), "cannot open file: " + path.string());
    File file;
    std::string line;
    std::size_t line_number = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        if (!have_header) {
            file.header = split(line);
            for (auto& h : file.header) h = std::string(trim(h));
            have_header = true;
        } else {
            file.rows.push_back({line_number, split(line)});
        }
    }
    require(have_header, "file has no header row: " + path.string());
    return file;
}

/// Column index lookup; returns npos when absent.
inline std::size_t column_index(const std::vector<std::string>& header, std::string_view name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    return static_cast<std::size_t>(-1);
}

} // namespace tradeflow::csv
