#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace seqdetect {

/// Decimal with 17 significant digits ("%.17g"); round-trips every double.
std::string format_double(double value);

/// A CSV document: '#'-prefixed "key: value" metadata lines, one header row,
/// then data rows. Fields never contain commas or quotes.
struct CsvTable {
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
};

void write_csv(std::ostream& out, const CsvTable& table);
/// Writes to `path`; throws IoError on failure.
void write_csv_file(const std::string& path, const CsvTable& table);

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

enum class ColumnType { real, integer, text };

struct ColumnSpec {
    std::string name;
    ColumnType type;
};

using CsvSchema = std::vector<ColumnSpec>;

/// Throws ArgumentError unless the header matches `schema` exactly and every
/// cell parses as its column type.
void validate_csv(const CsvTable& table, const CsvSchema& schema);

}  // namespace seqdetect
