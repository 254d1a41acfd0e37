#pragma once

// Result tables and their CSV / JSON serialization.
//
// CSV dialect: comma separated, '\n' line endings, one header row, reals with
// 17 significant digits in the C locale, undefined values as empty fields.

#include <charconv>
#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "magnomech/error.hpp"

namespace magnomech::io {

using Cell = std::variant<std::monostate, double, bool, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row) {
        if (row.size() != columns.size())
            throw Error(ErrorKind::InvalidArgument, "row width does not match the header");
        rows.push_back(std::move(row));
    }
};

enum class Format { Csv, Json };

inline Cell optional_cell(const std::optional<double>& v) {
    if (v) return *v;
    return std::monostate{};
}

/// Shortest-form-independent: always 17 significant digits, no locale.
inline std::string format_real(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline double parse_real(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw Error(ErrorKind::InvalidArgument, "not a real number: '" + s + "'");
    return v;
}

namespace detail {
inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

struct CellToCsv {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(double v) const { return format_real(v); }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
    std::string operator()(const std::string& v) const { return csv_escape(v); }
};
}  // namespace detail

inline void write_csv(std::ostream& os, const Table& table) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) os << (c ? "," : "") << table.columns[c];
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << std::visit(detail::CellToCsv{}, row[c]);
        os << '\n';
    }
}

inline nlohmann::ordered_json to_json(const Table& table) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t c = 0; c < row.size(); ++c) {
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, std::monostate>)
                        obj[table.columns[c]] = nullptr;
                    else
                        obj[table.columns[c]] = v;
                },
                row[c]);
        }
        arr.push_back(std::move(obj));
    }
    return arr;
}

inline void write_json(std::ostream& os, const Table& table) { os << to_json(table).dump(2) << '\n'; }

inline void write_table(std::ostream& os, const Table& table, Format format) {
    if (format == Format::Csv)
        write_csv(os, table);
    else
        write_json(os, table);
}

inline std::string to_string(const Table& table, Format format) {
    std::ostringstream os;
    write_table(os, table, format);
    return os.str();
}

/// Splits a CSV produced by write_csv back into header and raw field strings.
inline std::vector<std::vector<std::string>> read_csv_fields(const std::string& text) {
    std::vector<std::vector<std::string>> out;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            row.push_back(std::move(field));
            field.clear();
            out.push_back(std::move(row));
            row.clear();
        } else {
            field += c;
        }
    }
    if (!field.empty() || !row.empty()) {
        row.push_back(std::move(field));
        out.push_back(std::move(row));
    }
    return out;
}

}  // namespace magnomech::io
