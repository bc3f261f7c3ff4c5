#include "noonsim/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "noonsim/errors.hpp"

namespace noonsim {

namespace {

bool cell_matches(const Cell& c, ColumnType t) {
    switch (t) {
        case ColumnType::real: return std::holds_alternative<double>(c);
        case ColumnType::integer: return std::holds_alternative<std::int64_t>(c);
        case ColumnType::text: return std::holds_alternative<std::string>(c);
    }
    return false;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

nlohmann::json real_json(double x) {
    if (std::isfinite(x)) return x;
    return format_real(x);
}

nlohmann::json cell_json(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return real_json(*d);
    if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
    return std::get<std::string>(c);
}

const char* type_name(ColumnType t) {
    switch (t) {
        case ColumnType::real: return "real";
        case ColumnType::integer: return "integer";
        case ColumnType::text: return "text";
    }
    return "?";
}

}  // namespace

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) {
        throw ValidationError("table " + name + ": row has " + std::to_string(row.size()) + " cells, expected " +
                              std::to_string(columns.size()));
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (!cell_matches(row[i], columns[i].type))
            throw ValidationError("table " + name + ": wrong cell type in column " + columns[i].name);
    }
    rows.push_back(std::move(row));
}

std::size_t Table::column_index(const std::string& col) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i].name == col) return i;
    throw ValidationError("table " + name + ": no column " + col);
}

double Table::real_at(std::size_t row, const std::string& col) const {
    const Cell& c = rows.at(row).at(column_index(col));
    if (const auto* d = std::get_if<double>(&c)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
    throw ValidationError("table " + name + ": column " + col + " is not numeric");
}

const Table& RunReport::table(const std::string& name) const {
    for (const auto& t : tables)
        if (t.name == name) return t;
    throw ValidationError("report has no table " + name);
}

ReportFormat parse_report_format(const std::string& s) {
    if (s == "csv") return ReportFormat::csv;
    if (s == "json") return ReportFormat::json;
    throw ValidationError("format: expected csv or json, got '" + s + "'");
}

std::string to_string(ReportFormat f) { return f == ReportFormat::csv ? "csv" : "json"; }

std::string format_real(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_csv(std::ostream& os, const Table& table) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        const Column& c = table.columns[i];
        if (i) os << ',';
        os << csv_field(c.unit.empty() ? c.name : c.name + " [" + c.unit + "]");
    }
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            if (const auto* d = std::get_if<double>(&row[i])) os << format_real(*d);
            else if (const auto* n = std::get_if<std::int64_t>(&row[i])) os << *n;
            else os << csv_field(std::get<std::string>(row[i]));
        }
        os << '\n';
    }
}

nlohmann::json to_json(const RunReport& report) {
    nlohmann::json tables = nlohmann::json::array();
    for (const auto& t : report.tables) {
        nlohmann::json cols = nlohmann::json::array();
        for (const auto& c : t.columns) {
            nlohmann::json col = {{"name", c.name}, {"type", type_name(c.type)}, {"unit", c.unit}};
            col["tol"] = c.tol ? nlohmann::json(*c.tol) : nlohmann::json(nullptr);
            cols.push_back(std::move(col));
        }
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& r : t.rows) {
            nlohmann::json row = nlohmann::json::array();
            for (const auto& c : r) row.push_back(cell_json(c));
            rows.push_back(std::move(row));
        }
        tables.push_back({{"name", t.name}, {"columns", std::move(cols)}, {"rows", std::move(rows)}});
    }
    nlohmann::json summary = nlohmann::json::object();
    for (const auto& [k, v] : report.summary.items()) summary[k] = v.is_number_float() ? real_json(v.get<double>()) : v;
    return {{"schema_version", kReportSchemaVersion},
            {"kind", report.kind},
            {"config", report.config},
            {"provenance",
             {{"engine_version", report.provenance.engine_version},
              {"seed", report.provenance.seed},
              {"timestamp", report.provenance.timestamp}}},
            {"summary", std::move(summary)},
            {"tables", std::move(tables)}};
}

std::string render(const RunReport& report, ReportFormat format) {
    std::ostringstream os;
    if (format == ReportFormat::json) {
        os << to_json(report).dump(2) << '\n';
    } else {
        if (report.tables.empty()) throw ValidationError("report has no table to write as CSV");
        write_csv(os, report.tables.front());
    }
    return os.str();
}

void emit(const RunReport& report, ReportFormat format, const std::string& path) {
    const std::string text = render(report, format);
    if (path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    out.close();
    if (!out) throw IoError("write to '" + path + "' failed");
}

std::string utc_timestamp_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace noonsim
