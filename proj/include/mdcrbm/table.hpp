#pragma once

#include <string>
#include <vector>

#include "mdcrbm/schema.hpp"

namespace mdcrbm {

// Column-named tabular data; cells are doubles, NaN = missing.
struct Table {
    std::vector<std::string> columns;
    std::vector<Row> rows;

    int column_index(const std::string& name) const;  // MissingColumn if absent
    std::vector<double> column(const std::string& name) const;  // skips NaN
};

// CSV with a header row; empty field = missing. Column order need not match
// the schema: rows are reordered into schema order on read.
Table read_csv(const std::string& path);
Table read_csv_text(const std::string& text);
void write_csv(const std::string& path, const Table& table);

// Reorders table columns into schema order; MissingColumn if one is absent.
std::vector<Row> align_to_schema(const Table& table, const Schema& schema);

Table table_from_rows(const std::vector<Row>& rows, const Schema& schema);

}  // namespace mdcrbm
