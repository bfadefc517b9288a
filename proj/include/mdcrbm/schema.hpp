#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "mdcrbm/errors.hpp"

namespace mdcrbm {

enum class VarKind { Categorical, Gaussian, Positive, Cyclic };

std::string kind_name(VarKind k);

struct VariableSpec {
    std::string name;
    VarKind kind = VarKind::Gaussian;
    int levels = 0;        // Categorical only, >= 2
    double period = 0.0;   // Cyclic only, > 0
    bool conditionable = true;
};

// Slot-level view of the design vector, independent of variable names.
// rbm-core consumes this; width-1 Categorical blocks are legal here (a lone
// binary slot with a linear energy term) even though Schema requires k >= 2.
struct Block {
    VarKind kind = VarKind::Gaussian;
    int offset = 0;
    int width = 1;
};

struct Layout {
    std::vector<Block> blocks;
    int width = 0;
};

// Per-variable mean/sd in data units; entries for categorical variables are
// fixed at (0, 1). Positive variables store the true sample mean but encode
// scale-only (x / sd): shifting a nonnegative column across zero would put
// most of its mass outside the rectified unit's support.
struct NormStats {
    std::vector<double> mean;
    std::vector<double> sd;
    bool fitted = false;
};

using Row = std::vector<double>;  // NaN = missing

class Schema {
public:
    Schema() = default;
    explicit Schema(std::vector<VariableSpec> vars);

    const std::vector<VariableSpec>& vars() const { return vars_; }
    std::size_t size() const { return vars_.size(); }
    const VariableSpec& var(std::size_t i) const { return vars_[i]; }
    int index_of(const std::string& name) const;  // MissingColumn if absent

    const Layout& layout() const { return layout_; }
    int width() const { return layout_.width; }
    const Block& block(std::size_t var_index) const { return layout_.blocks[var_index]; }

private:
    std::vector<VariableSpec> vars_;
    Layout layout_;
};

NormStats fit_norm(const std::vector<Row>& rows, const Schema& schema);

Eigen::VectorXd encode_row(const Row& row, const Schema& schema, const NormStats& norm);
Row decode_vector(const Eigen::VectorXd& x, const Schema& schema, const NormStats& norm);

// Encodes every row into the columns of a K x n matrix.
Eigen::MatrixXd encode_table(const std::vector<Row>& rows, const Schema& schema,
                             const NormStats& norm);

struct FilterRules {
    // Keep rows whose named column is >= the bound (missing fails the rule).
    std::vector<std::pair<std::string, double>> min_value;
    // Drop rows with a missing value in any non-conditionable column.
    bool require_complete = true;
};

std::vector<Row> filter_rows(const std::vector<Row>& rows, const FilterRules& rules,
                             const Schema& schema);

// Schema text: one [variable] section per entry, key = value lines. When a
// fitted NormStats is supplied, continuous variables carry mean/sd lines so
// the text round-trips through model files.
std::string render_schema(const Schema& schema, const NormStats* norm = nullptr);
std::pair<Schema, NormStats> parse_schema(const std::string& text);

}  // namespace mdcrbm
