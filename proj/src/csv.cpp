#include "parity/csv.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace parity {

namespace {

bool parse_number(const std::string& cell, double& out) {
    if (cell.empty()) return false;
    errno = 0;
    char* end = nullptr;
    out = std::strtod(cell.c_str(), &end);
    return errno == 0 && end == cell.c_str() + cell.size();
}

// one record, RFC 4180 quoting; returns false at end of input
bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line_no) {
    fields.clear();
    std::string field;
    bool in_quotes = false;
    bool seen_any = false;
    int ch;
    while ((ch = in.get()) != EOF) {
        seen_any = true;
        const char c = static_cast<char>(ch);
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    field.push_back('"');
                    in.get();
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line_no;
                field.push_back(c);
            }
        } else if (c == '"') {
            if (!field.empty())
                throw CsvParseError("csv line " + std::to_string(line_no) +
                                    ": quote inside unquoted field");
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\r') {
            // swallow; the following \n terminates the record
        } else if (c == '\n') {
            ++line_no;
            fields.push_back(std::move(field));
            return true;
        } else {
            field.push_back(c);
        }
    }
    if (in_quotes) throw CsvParseError("csv: unterminated quoted field");
    if (!seen_any) return false;
    fields.push_back(std::move(field));
    return true;
}

}  // namespace

CsvTable parse_csv(std::istream& in) {
    CsvTable table;
    std::size_t line_no = 1;
    std::vector<std::string> record;
    if (!read_record(in, record, line_no)) throw CsvParseError("csv: missing header row");
    table.header = record;
    std::size_t record_line = line_no;
    while (read_record(in, record, line_no)) {
        if (record.size() == 1 && record[0].empty()) {
            record_line = line_no;
            continue;  // trailing blank line
        }
        if (record.size() != table.header.size())
            throw CsvParseError("csv line " + std::to_string(record_line) + ": expected " +
                                std::to_string(table.header.size()) + " fields, got " +
                                std::to_string(record.size()));
        table.rows.push_back(record);
        record_line = line_no;
    }
    return table;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CsvParseError("cannot open '" + path + "'");
    return parse_csv(in);
}

std::size_t CsvTable::column_index(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw CsvParseError("csv: no column named '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
}

bool CsvTable::has_column(const std::string& name) const {
    return std::find(header.begin(), header.end(), name) != header.end();
}

std::vector<std::string> CsvTable::raw_column(const std::string& name) const {
    const std::size_t idx = column_index(name);
    std::vector<std::string> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(row[idx]);
    return out;
}

DataColumn CsvTable::continuous_column(const std::string& name) const {
    const std::size_t idx = column_index(name);
    DataColumn col;
    col.kind = ColumnKind::continuous;
    col.values.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r][idx].empty())
            throw CsvParseError("csv: column '" + name + "' row " + std::to_string(r + 1) +
                                ": missing value");
        double v = 0.0;
        if (!parse_number(rows[r][idx], v))
            throw CsvParseError("csv: column '" + name + "' row " + std::to_string(r + 1) +
                                ": cannot parse '" + rows[r][idx] + "' as a number");
        col.values.push_back(v);
    }
    return col;
}

DataColumn CsvTable::categorical_column(const std::string& name) const {
    const std::vector<std::string> raw = raw_column(name);
    for (std::size_t r = 0; r < raw.size(); ++r)
        if (raw[r].empty())
            throw CsvParseError("csv: column '" + name + "' row " + std::to_string(r + 1) +
                                ": missing value");
    std::map<std::string, double> codes;
    for (const auto& cell : raw) codes.emplace(cell, 0.0);
    double next = 0.0;
    for (auto& [cell, code] : codes) code = next++;
    DataColumn col;
    col.kind = ColumnKind::categorical;
    col.values.reserve(raw.size());
    for (const auto& cell : raw) col.values.push_back(codes.at(cell));
    return col;
}

DataColumn CsvTable::inferred_column(const std::string& name) const {
    const std::size_t idx = column_index(name);
    double v = 0.0;
    for (const auto& row : rows)
        if (!parse_number(row[idx], v)) return categorical_column(name);
    return continuous_column(name);
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_csv(std::ostream& out, const CsvTable& table) {
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i) out << ',';
        out << csv_escape(table.header[i]);
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << csv_escape(row[i]);
        }
        out << '\n';
    }
}

}  // namespace parity
