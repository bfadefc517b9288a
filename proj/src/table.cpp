#include "mdcrbm/table.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "mdcrbm/errors.hpp"
#include "mdcrbm/text.hpp"

namespace mdcrbm {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

int Table::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return static_cast<int>(i);
    throw MissingColumn(name);
}

std::vector<double> Table::column(const std::string& name) const {
    int idx = column_index(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows)
        if (!std::isnan(r[idx])) out.push_back(r[idx]);
    return out;
}

Table read_csv_text(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    Table t;
    bool header = true;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (header) {
            t.columns = split_csv_line(line);
            if (t.columns.empty()) throw DataFormatError("empty header row");
            header = false;
            continue;
        }
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != t.columns.size())
            throw DataFormatError("line " + std::to_string(lineno) + ": " +
                                  std::to_string(fields.size()) + " fields, expected " +
                                  std::to_string(t.columns.size()));
        Row r(fields.size());
        for (std::size_t i = 0; i < fields.size(); ++i)
            r[i] = fields[i].empty() ? std::nan("") : parse_double(fields[i]);
        t.rows.push_back(std::move(r));
    }
    if (header) throw DataFormatError("empty file");
    return t;
}

Table read_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return read_csv_text(os.str());
}

void write_csv(const std::string& path, const Table& table) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path);
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        f << (i ? "," : "") << table.columns[i];
    f << "\n";
    for (const auto& r : table.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) f << ",";
            if (!std::isnan(r[i])) f << format_double(r[i]);
        }
        f << "\n";
    }
    if (!f) throw IoError("write failed: " + path);
}

std::vector<Row> align_to_schema(const Table& table, const Schema& schema) {
    std::vector<int> src(schema.size());
    for (std::size_t i = 0; i < schema.size(); ++i)
        src[i] = table.column_index(schema.var(i).name);
    std::vector<Row> out;
    out.reserve(table.rows.size());
    for (const auto& r : table.rows) {
        Row row(schema.size());
        for (std::size_t i = 0; i < schema.size(); ++i) row[i] = r[src[i]];
        out.push_back(std::move(row));
    }
    return out;
}

Table table_from_rows(const std::vector<Row>& rows, const Schema& schema) {
    Table t;
    for (const auto& v : schema.vars()) t.columns.push_back(v.name);
    t.rows = rows;
    return t;
}

}  // namespace mdcrbm
