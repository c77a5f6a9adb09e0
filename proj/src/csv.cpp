#include "seqdetect/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "seqdetect/config.hpp"
#include "seqdetect/errors.hpp"

namespace seqdetect {

namespace {

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ','))
        out.push_back(field);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

std::string join(const std::vector<std::string>& fields)
{
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i)
            out += ',';
        out += fields[i];
    }
    return out;
}

void check_cell(const std::string& cell, ColumnType type, const std::string& column, std::size_t row)
{
    const std::string where = "row " + std::to_string(row + 1) + ", column '" + column + "'";
    try {
        if (type == ColumnType::real)
            (void)parse_double(cell, where);
        else if (type == ColumnType::integer)
            (void)parse_int(cell, where);
    } catch (const ConfigError& e) {
        throw ArgumentError(std::string("CSV validation failed: ") + e.what());
    }
}

}  // namespace

std::string format_double(double value)
{
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

void CsvTable::add_row(std::vector<std::string> row)
{
    if (row.size() != header.size())
        throw ArgumentError("CSV row has " + std::to_string(row.size()) + " fields, header has "
                            + std::to_string(header.size()));
    rows.push_back(std::move(row));
}

void write_csv(std::ostream& out, const CsvTable& table)
{
    for (const auto& [key, value] : table.metadata)
        out << "# " << key << ": " << value << '\n';
    out << join(table.header) << '\n';
    for (const auto& row : table.rows)
        out << join(row) << '\n';
}

void write_csv_file(const std::string& path, const CsvTable& table)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open output file '" + path + "'");
    write_csv(out, table);
    out.flush();
    if (!out)
        throw IoError("failed writing output file '" + path + "'");
}

CsvTable read_csv(std::istream& in)
{
    CsvTable table;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line.front() == '#') {
            const std::string body = line.substr(line.size() > 1 && line[1] == ' ' ? 2 : 1);
            const auto colon = body.find(": ");
            if (colon == std::string::npos)
                table.metadata.emplace_back(body, "");
            else
                table.metadata.emplace_back(body.substr(0, colon), body.substr(colon + 2));
            continue;
        }
        if (!have_header) {
            table.header = split(line);
            have_header = true;
            continue;
        }
        table.add_row(split(line));
    }
    if (!have_header)
        throw ArgumentError("CSV input has no header row");
    return table;
}

CsvTable read_csv_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open CSV file '" + path + "'");
    return read_csv(in);
}

void validate_csv(const CsvTable& table, const CsvSchema& schema)
{
    if (table.header.size() != schema.size())
        throw ArgumentError("CSV header has " + std::to_string(table.header.size()) + " columns, schema expects "
                            + std::to_string(schema.size()));
    for (std::size_t c = 0; c < schema.size(); ++c) {
        if (table.header[c] != schema[c].name)
            throw ArgumentError("CSV column " + std::to_string(c + 1) + " is '" + table.header[c] + "', expected '"
                                + schema[c].name + "'");
    }
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        if (table.rows[r].size() != schema.size())
            throw ArgumentError("CSV row " + std::to_string(r + 1) + " has the wrong number of fields");
        for (std::size_t c = 0; c < schema.size(); ++c)
            check_cell(table.rows[r][c], schema[c].type, schema[c].name, r);
    }
}

}  // namespace seqdetect
