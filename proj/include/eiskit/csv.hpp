#pragma once

// Numeric CSV tables with a versioned schema line:
//
//   # eis-kit v1.0.0 <schema-name>
//   col_a,col_b,...
//   1.5,2,...
//
// Writers always emit the schema line. Readers accept files without one (hand
// written inputs) but reject a different major version or schema name.

#include <charconv>
#include <cmath>
#include <limits>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "eiskit/error.hpp"
#include "eiskit/kv_config.hpp"

namespace eiskit::csv {

inline constexpr int format_major = 1;
inline constexpr std::string_view format_version = "1.0.0";

/// Shortest text that parses back to exactly `v`.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

struct Table {
    std::string schema;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t index_of(std::string_view name) const {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (columns[i] == name) return i;
        }
        throw DataError("schema '" + schema + "': missing column '" + std::string(name) + "'");
    }

    std::vector<double> column(std::string_view name) const {
        const std::size_t i = index_of(name);
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r[i]);
        return out;
    }
};

inline void write(std::ostream& out, const Table& t) {
    out << "# eis-kit v" << format_version << ' ' << t.schema << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << '\n';
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << format_number(r[i]);
        out << '\n';
    }
}

inline void write_file(const std::string& path, const Table& t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    write(out, t);
    if (!out) throw DataError("failed writing '" + path + "'");
}

namespace detail {

inline std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(eiskit::detail::trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline double parse_cell(const std::string& s, const std::string& where) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return eiskit::detail::parse_double(s, where);
}

}  // namespace detail

/// Parses a table. `expected_schema` empty accepts any schema name.
/// `required` columns must all be present (in any order).
inline Table read(std::istream& in, const std::string& source, std::string_view expected_schema = {},
                  const std::vector<std::string>& required = {}) {
    Table t;
    std::string line;
    int lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string trimmed = eiskit::detail::trim(line);
        if (trimmed.empty()) continue;
        if (trimmed[0] == '#') {
            if (have_header || !t.schema.empty()) continue;
            std::istringstream ss(trimmed.substr(1));
            std::string tool, version, schema;
            ss >> tool >> version >> schema;
            if (tool != "eis-kit" || version.size() < 2 || version[0] != 'v') continue;
            const auto dot = version.find('.');
            const std::string major_txt = version.substr(1, dot == std::string::npos ? std::string::npos : dot - 1);
            long long major = 0;
            try {
                major = eiskit::detail::parse_int(major_txt, "schema version");
            } catch (const DataError&) {
                throw DataError(source + ":" + std::to_string(lineno) + ": bad schema version '" + version + "'");
            }
            if (major != format_major) {
                throw DataError(source + ":" + std::to_string(lineno) + ": unsupported schema major version " +
                                std::to_string(major));
            }
            if (!expected_schema.empty() && schema != expected_schema) {
                throw DataError(source + ":" + std::to_string(lineno) + ": expected schema '" +
                                std::string(expected_schema) + "', found '" + schema + "'");
            }
            t.schema = schema;
            continue;
        }
        if (!have_header) {
            t.columns = detail::split(trimmed);
            have_header = true;
            continue;
        }
        const auto cells = detail::split(trimmed);
        if (cells.size() != t.columns.size()) {
            throw DataError(source + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(t.columns.size()) + " columns, found " + std::to_string(cells.size()));
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            row.push_back(detail::parse_cell(
                cells[c], source + ":" + std::to_string(lineno) + " column '" + t.columns[c] + "'"));
        }
        t.rows.push_back(std::move(row));
    }
    if (!have_header) throw DataError(source + ": no header row");
    if (t.schema.empty()) t.schema = std::string(expected_schema);
    for (const auto& r : required) (void)t.index_of(r);
    return t;
}

inline Table read_file(const std::string& path, std::string_view expected_schema = {},
                       const std::vector<std::string>& required = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    return read(in, path, expected_schema, required);
}

}  // namespace eiskit::csv
