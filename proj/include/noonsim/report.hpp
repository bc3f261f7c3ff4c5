#pragma once

// Run reports and their CSV / JSON serialization.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace noonsim {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kEngineVersion = "0.3.0";

enum class ColumnType { real, integer, text };

struct Column {
    std::string name;
    std::string unit;          // "1" for dimensionless, "" for text columns
    std::optional<double> tol; // acceptance tolerance tied to the column, if any
    ColumnType type = ColumnType::real;
};

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
    std::string name;
    std::vector<Column> columns;
    std::vector<std::vector<Cell>> rows;

    // Throws ValidationError when the row does not match the column types.
    void add_row(std::vector<Cell> row);
    std::size_t column_index(const std::string& name) const;
    double real_at(std::size_t row, const std::string& column) const;
};

struct Provenance {
    std::string engine_version = kEngineVersion;
    std::uint64_t seed = 0;
    std::string timestamp;
};

struct RunReport {
    std::string kind;
    nlohmann::json config;   // normalized config echo
    std::vector<Table> tables;
    nlohmann::json summary = nlohmann::json::object();
    Provenance provenance;

    const Table& table(const std::string& name) const;
};

enum class ReportFormat { csv, json };

ReportFormat parse_report_format(const std::string& s);
std::string to_string(ReportFormat f);

// %.17g, with inf / -inf / nan spelled out.
std::string format_real(double x);

// Header row "name [unit]" followed by one row per table row. A table with
// no rows gives the header alone.
void write_csv(std::ostream& os, const Table& table);
nlohmann::json to_json(const RunReport& report);

// CSV carries the first table; JSON carries everything. path "-" is stdout.
void emit(const RunReport& report, ReportFormat format, const std::string& path);
std::string render(const RunReport& report, ReportFormat format);

// UTC, second resolution, ISO 8601.
std::string utc_timestamp_now();

}  // namespace noonsim
