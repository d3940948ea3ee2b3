#pragma once

// Dataset CSV: one row per sample, header `var<i>_<k>` for coordinate k of
// variable i; categorical variables occupy one column `var<i>_0:cat<C>`.
// Reals are written with 17 significant digits so a round trip is exact.

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <map>
#include <ostream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "finfo/data.hpp"
#include "finfo/error.hpp"

namespace finfo {

inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// Strict double parse; throws DataError naming the line and column.
inline double parse_real(const std::string& field, std::size_t line, std::size_t column) {
    const std::string t = trim(field);
    char* end = nullptr;
    errno = 0;
    const double v = t.empty() ? 0.0 : std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE)
        throw DataError("line " + std::to_string(line) + ", column " + std::to_string(column) +
                        ": cannot parse '" + t + "' as a number");
    if (!std::isfinite(v))
        throw DataError("line " + std::to_string(line) + ", column " + std::to_string(column) +
                        ": non-finite value '" + t + "'");
    return v;
}

inline std::string column_name(std::size_t variable, int coordinate, const VariableSpec& spec) {
    std::string name = "var" + std::to_string(variable) + "_" + std::to_string(coordinate);
    if (spec.is_categorical()) name += ":cat" + std::to_string(spec.cardinality());
    return name;
}

inline void write_dataset_csv(std::ostream& out, const Dataset& data) {
    validate(data);
    bool first = true;
    for (std::size_t i = 0; i < data.variables.size(); ++i)
        for (int k = 0; k < data.variables[i].spec.columns(); ++k) {
            out << (first ? "" : ",") << column_name(i, k, data.variables[i].spec);
            first = false;
        }
    out << '\n';
    for (Eigen::Index r = 0; r < data.sample_count(); ++r) {
        first = true;
        for (const auto& var : data.variables)
            for (Eigen::Index k = 0; k < var.values.cols(); ++k) {
                out << (first ? "" : ",");
                if (var.spec.is_categorical()) out << var.symbol(r);
                else out << format_real(var.values(r, k));
                first = false;
            }
        out << '\n';
    }
}

inline Dataset read_dataset_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("line 1: empty file, expected a header row");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_csv_line(line);
    static const std::regex pattern(R"(var(\d+)_(\d+)(?::cat(\d+))?)");

    struct Column {
        std::size_t variable;
        int coordinate;
        int cardinality;
    };
    std::vector<Column> columns;
    std::map<std::size_t, std::vector<std::size_t>> by_variable;
    for (std::size_t c = 0; c < header.size(); ++c) {
        std::smatch match;
        const std::string name = trim(header[c]);
        if (!std::regex_match(name, match, pattern))
            throw DataError("line 1, column " + std::to_string(c + 1) + ": bad header '" + name +
                            "', expected var<i>_<k>[:cat<C>]");
        Column col{std::stoul(match[1]), std::stoi(match[2]),
                   match[3].matched ? std::stoi(match[3]) : 0};
        by_variable[col.variable].push_back(c);
        columns.push_back(col);
    }

    Dataset data;
    std::vector<std::vector<std::size_t>> layout;
    for (const auto& [index, cols] : by_variable) {
        if (index != data.variables.size())
            throw DataError("line 1: variables must be numbered 0.." +
                            std::to_string(by_variable.size() - 1) + " without gaps");
        const Column& head = columns[cols.front()];
        for (std::size_t k = 0; k < cols.size(); ++k) {
            const Column& col = columns[cols[k]];
            if (col.coordinate != int(k) || (col.cardinality > 0) != (head.cardinality > 0))
                throw DataError("line 1: inconsistent columns for variable " +
                                std::to_string(index));
        }
        if (head.cardinality > 0 && cols.size() != 1)
            throw DataError("line 1: categorical variable " + std::to_string(index) +
                            " must have a single column");
        const VariableSpec spec = head.cardinality > 0 ? VariableSpec::categorical(head.cardinality)
                                                       : VariableSpec::real(int(cols.size()));
        data.variables.push_back({spec, Matrix()});
        layout.push_back(cols);
    }
    if (data.variables.empty()) throw DataError("line 1: no columns");

    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw DataError("line " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));
        std::vector<double> row(fields.size());
        for (std::size_t c = 0; c < fields.size(); ++c) {
            row[c] = parse_real(fields[c], line_no, c + 1);
            const Column& col = columns[c];
            if (col.cardinality > 0 &&
                (row[c] < 0 || row[c] >= col.cardinality || row[c] != double(long(row[c]))))
                throw DataError("line " + std::to_string(line_no) + ", column " +
                                std::to_string(c + 1) + ": categorical symbol out of range");
        }
        rows.push_back(std::move(row));
    }
    for (std::size_t v = 0; v < data.variables.size(); ++v) {
        Matrix values(Eigen::Index(rows.size()), Eigen::Index(layout[v].size()));
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (std::size_t k = 0; k < layout[v].size(); ++k)
                values(Eigen::Index(r), Eigen::Index(k)) = rows[r][layout[v][k]];
        data.variables[v].values = std::move(values);
    }
    validate(data);
    return data;
}

/// Builds one variable from column selectors. Each token is either `var<i>`
/// (all of variable i) or an exact column header such as `var3_7`. A single
/// categorical variable stays categorical; anything else is concatenated
/// into one real vector.
inline Samples select_columns(const Dataset& data, const std::vector<std::string>& tokens) {
    if (tokens.empty()) throw UsageError("empty column selection");
    static const std::regex whole(R"(var(\d+))");
    static const std::regex single(R"(var(\d+)_(\d+)(?::cat\d+)?)");
    std::vector<std::pair<std::size_t, int>> picks;  // (variable, coordinate or -1)
    for (const auto& raw : tokens) {
        const std::string t = trim(raw);
        std::smatch m;
        if (std::regex_match(t, m, whole)) picks.emplace_back(std::stoul(m[1]), -1);
        else if (std::regex_match(t, m, single)) picks.emplace_back(std::stoul(m[1]), std::stoi(m[2]));
        else throw UsageError("bad column selector '" + t + "'");
        if (picks.back().first >= data.variables.size())
            throw UsageError("column selector '" + t + "' names a missing variable");
        const auto& var = data.variables[picks.back().first];
        if (picks.back().second >= var.spec.columns())
            throw UsageError("column selector '" + t + "' names a missing coordinate");
    }
    if (picks.size() == 1) {
        const auto& var = data.variables[picks[0].first];
        if (picks[0].second < 0 || var.spec.is_categorical()) return var;
    }
    std::vector<std::pair<std::size_t, int>> cols;
    for (auto [v, k] : picks) {
        const auto& var = data.variables[v];
        if (var.spec.is_categorical())
            throw UsageError("categorical variables cannot be combined with other columns");
        if (k >= 0) cols.emplace_back(v, k);
        else
            for (int c = 0; c < var.spec.columns(); ++c) cols.emplace_back(v, c);
    }
    Matrix values(data.sample_count(), Eigen::Index(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c)
        values.col(Eigen::Index(c)) = data.variables[cols[c].first].values.col(cols[c].second);
    return real_samples(std::move(values));
}

}  // namespace finfo
