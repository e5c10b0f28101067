#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "parity/kernels.hpp"

namespace parity {

struct CsvParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Rectangular CSV table (RFC 4180: quoted fields, escaped quotes, CRLF or LF).
// The header row is required.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t num_rows() const { return rows.size(); }
    std::size_t column_index(const std::string& name) const;
    bool has_column(const std::string& name) const;

    // Column as continuous data; throws CsvParseError if any cell fails to
    // parse as a number.
    DataColumn continuous_column(const std::string& name) const;
    // Column as categorical codes: distinct cell strings sorted, coded 0..L-1.
    DataColumn categorical_column(const std::string& name) const;
    // Numeric when every cell parses, categorical otherwise.
    DataColumn inferred_column(const std::string& name) const;

    // Raw cells of one column.
    std::vector<std::string> raw_column(const std::string& name) const;
};

CsvTable parse_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

std::string csv_escape(const std::string& field);
void write_csv(std::ostream& out, const CsvTable& table);

}  // namespace parity
