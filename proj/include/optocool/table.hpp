#pragma once

// Tabular output: CSV with a header row, or a JSON array of records. Numbers use the shortest
// scientific form that round-trips, independent of locale.

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <variant>
#include <vector>

#include "optocool/errors.hpp"

namespace optocool {

using Cell = std::variant<double, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row) {
        if (row.size() != columns.size()) throw InputError("table: row width does not match header");
        rows.push_back(std::move(row));
    }

    std::size_t column(const std::string& name) const {
        for (std::size_t k = 0; k < columns.size(); ++k)
            if (columns[k] == name) return k;
        throw InputError("table: no column '" + name + "'");
    }

    double number(std::size_t row, const std::string& name) const { return std::get<double>(rows.at(row).at(column(name))); }
};

inline std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::scientific);
    return std::string(buf, res.ptr);
}

namespace detail {

inline bool needs_quotes(const std::string& s) {
    return s.find_first_of(",\"\n\r") != std::string::npos;
}

inline bool parses_as_number(const std::string& s) {
    double x = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    return !s.empty() && res.ec == std::errc() && res.ptr == s.data() + s.size();
}

inline std::string csv_field(const Cell& c) {
    if (const double* d = std::get_if<double>(&c)) return format_number(*d);
    const std::string& s = std::get<std::string>(c);
    if (!needs_quotes(s) && !parses_as_number(s)) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

inline Cell parse_cell(const std::string& s, bool quoted) {
    if (!quoted && parses_as_number(s)) {
        double x = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), x);
        return x;
    }
    return s;
}

}  // namespace detail

inline void write_csv(std::ostream& os, const Table& t) {
    for (std::size_t k = 0; k < t.columns.size(); ++k) os << (k ? "," : "") << detail::csv_field(t.columns[k]);
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << detail::csv_field(row[k]);
        os << '\n';
    }
}

inline std::string to_csv(const Table& t) {
    std::ostringstream os;
    write_csv(os, t);
    return os.str();
}

/// Reads tables produced by write_csv. Unquoted fields that parse fully as numbers become numbers.
inline Table read_csv(std::istream& is) {
    std::vector<std::vector<std::pair<std::string, bool>>> records;
    std::vector<std::pair<std::string, bool>> record;
    std::string field;
    bool quoted = false, in_quotes = false, any = false;
    char ch;
    auto end_field = [&] {
        record.emplace_back(field, quoted);
        field.clear();
        quoted = false;
    };
    while (is.get(ch)) {
        any = true;
        if (in_quotes) {
            if (ch == '"') {
                if (is.peek() == '"') {
                    is.get(ch);
                    field += '"';
                } else {
                    in_quotes = false;
                }
            } else {
                field += ch;
            }
        } else if (ch == '"') {
            in_quotes = quoted = true;
        } else if (ch == ',') {
            end_field();
        } else if (ch == '\n') {
            end_field();
            records.push_back(std::move(record));
            record.clear();
            any = false;
        } else if (ch != '\r') {
            field += ch;
        }
    }
    if (in_quotes) throw InputError("csv: unterminated quoted field");
    if (any) {
        end_field();
        records.push_back(std::move(record));
    }
    if (records.empty()) throw InputError("csv: missing header row");

    Table t;
    for (const auto& [name, q] : records.front()) t.columns.push_back(name);
    for (std::size_t r = 1; r < records.size(); ++r) {
        std::vector<Cell> row;
        for (const auto& [text, q] : records[r]) row.push_back(detail::parse_cell(text, q));
        if (row.size() != t.columns.size())
            throw InputError("csv: record " + std::to_string(r) + " has " + std::to_string(row.size()) +
                             " fields, expected " + std::to_string(t.columns.size()));
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline Table parse_csv(const std::string& text) {
    std::istringstream is(text);
    return read_csv(is);
}

/// JSON array of objects. Non-finite numbers are written as the strings "nan", "inf", "-inf".
inline nlohmann::json to_json(const Table& t) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& row : t.rows) {
        nlohmann::json obj = nlohmann::json::object();
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (const double* d = std::get_if<double>(&row[k])) {
                obj[t.columns[k]] = std::isfinite(*d) ? nlohmann::json(*d) : nlohmann::json(format_number(*d));
            } else {
                obj[t.columns[k]] = std::get<std::string>(row[k]);
            }
        }
        arr.push_back(std::move(obj));
    }
    return arr;
}

inline void write_json(std::ostream& os, const Table& t) { os << to_json(t).dump(2) << '\n'; }

enum class OutputFormat { csv, json };

inline OutputFormat format_from_string(const std::string& s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    throw InputError("unknown output format '" + s + "' (expected csv or json)");
}

inline void write_table(std::ostream& os, const Table& t, OutputFormat f) {
    if (f == OutputFormat::csv) {
        write_csv(os, t);
    } else {
        write_json(os, t);
    }
}

}  // namespace optocool
