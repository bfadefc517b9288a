#include "mdcrbm/schema.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "mdcrbm/text.hpp"

namespace mdcrbm {

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

int block_width(const VariableSpec& v) {
    switch (v.kind) {
        case VarKind::Categorical: return v.levels;
        case VarKind::Cyclic: return 2;
        default: return 1;
    }
}

bool is_continuous(VarKind k) { return k == VarKind::Gaussian || k == VarKind::Positive; }

}  // namespace

std::string kind_name(VarKind k) {
    switch (k) {
        case VarKind::Categorical: return "categorical";
        case VarKind::Gaussian: return "gaussian";
        case VarKind::Positive: return "positive";
        case VarKind::Cyclic: return "cyclic";
    }
    return "?";
}

Schema::Schema(std::vector<VariableSpec> vars) : vars_(std::move(vars)) {
    if (vars_.empty()) throw SchemaParseError("no variables");
    std::set<std::string> seen;
    int offset = 0;
    for (const auto& v : vars_) {
        if (v.name.empty()) throw SchemaParseError("unnamed variable");
        if (!seen.insert(v.name).second) throw SchemaParseError("duplicate variable: " + v.name);
        if (v.kind == VarKind::Categorical && v.levels < 2)
            throw SchemaParseError("categorical " + v.name + " needs levels >= 2");
        if (v.kind == VarKind::Cyclic && !(v.period > 0.0))
            throw SchemaParseError("cyclic " + v.name + " needs period > 0");
        int w = block_width(v);
        layout_.blocks.push_back({v.kind, offset, w});
        offset += w;
    }
    layout_.width = offset;
}

int Schema::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i].name == name) return static_cast<int>(i);
    throw MissingColumn(name);
}

NormStats fit_norm(const std::vector<Row>& rows, const Schema& schema) {
    if (rows.size() < 2) throw Error("fit_norm needs at least 2 rows");
    NormStats norm;
    norm.mean.assign(schema.size(), 0.0);
    norm.sd.assign(schema.size(), 1.0);
    for (std::size_t i = 0; i < schema.size(); ++i) {
        if (!is_continuous(schema.var(i).kind)) continue;
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& r : rows) {
            if (r.size() != schema.size()) throw LengthMismatch(r.size(), schema.size());
            if (std::isnan(r[i])) continue;
            sum += r[i];
            ++n;
        }
        if (n < 2) throw ConstantColumn(schema.var(i).name);
        double mean = sum / static_cast<double>(n);
        double ss = 0.0;
        for (const auto& r : rows) {
            if (std::isnan(r[i])) continue;
            double d = r[i] - mean;
            ss += d * d;
        }
        double sd = std::sqrt(ss / static_cast<double>(n - 1));
        if (!(sd > 0.0)) throw ConstantColumn(schema.var(i).name);
        norm.mean[i] = mean;
        norm.sd[i] = sd;
    }
    norm.fitted = true;
    return norm;
}

Eigen::VectorXd encode_row(const Row& row, const Schema& schema, const NormStats& norm) {
    if (row.size() != schema.size()) throw LengthMismatch(row.size(), schema.size());
    Eigen::VectorXd x = Eigen::VectorXd::Zero(schema.width());
    for (std::size_t i = 0; i < schema.size(); ++i) {
        const auto& v = schema.var(i);
        const auto& blk = schema.block(i);
        double raw = row[i];
        if (!std::isfinite(raw)) throw OutOfDomain(v.name, raw);
        switch (v.kind) {
            case VarKind::Categorical: {
                double rounded = std::nearbyint(raw);
                if (std::abs(raw - rounded) > 1e-9 || rounded < 0 || rounded >= v.levels)
                    throw UnknownLevel(v.name, raw);
                x[blk.offset + static_cast<int>(rounded)] = 1.0;
                break;
            }
            case VarKind::Gaussian:
                x[blk.offset] = (raw - norm.mean[i]) / norm.sd[i];
                break;
            case VarKind::Positive:
                if (raw < 0.0) throw OutOfDomain(v.name, raw);
                x[blk.offset] = raw / norm.sd[i];
                break;
            case VarKind::Cyclic: {
                double phase = kTau * raw / v.period;
                x[blk.offset] = std::sin(phase);
                x[blk.offset + 1] = std::cos(phase);
                break;
            }
        }
    }
    return x;
}

Row decode_vector(const Eigen::VectorXd& x, const Schema& schema, const NormStats& norm) {
    if (x.size() != schema.width())
        throw LengthMismatch(static_cast<std::size_t>(x.size()), static_cast<std::size_t>(schema.width()));
    Row row(schema.size(), 0.0);
    for (std::size_t i = 0; i < schema.size(); ++i) {
        const auto& v = schema.var(i);
        const auto& blk = schema.block(i);
        switch (v.kind) {
            case VarKind::Categorical: {
                int best = 0;
                for (int j = 1; j < blk.width; ++j)
                    if (x[blk.offset + j] > x[blk.offset + best]) best = j;
                row[i] = static_cast<double>(best);
                break;
            }
            case VarKind::Gaussian:
                row[i] = x[blk.offset] * norm.sd[i] + norm.mean[i];
                break;
            case VarKind::Positive:
                row[i] = std::max(0.0, x[blk.offset] * norm.sd[i]);
                break;
            case VarKind::Cyclic: {
                double t = std::atan2(x[blk.offset], x[blk.offset + 1]) / kTau * v.period;
                if (t < 0.0) t += v.period;
                if (t >= v.period) t -= v.period;
                row[i] = t;
                break;
            }
        }
    }
    return row;
}

Eigen::MatrixXd encode_table(const std::vector<Row>& rows, const Schema& schema,
                             const NormStats& norm) {
    Eigen::MatrixXd m(schema.width(), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) m.col(static_cast<Eigen::Index>(r)) = encode_row(rows[r], schema, norm);
    return m;
}

std::vector<Row> filter_rows(const std::vector<Row>& rows, const FilterRules& rules,
                             const Schema& schema) {
    std::vector<std::pair<int, double>> bounds;
    for (const auto& [name, lo] : rules.min_value) bounds.emplace_back(schema.index_of(name), lo);
    std::vector<Row> out;
    for (const auto& r : rows) {
        if (r.size() != schema.size()) throw LengthMismatch(r.size(), schema.size());
        bool keep = true;
        for (const auto& [idx, lo] : bounds)
            if (std::isnan(r[idx]) || r[idx] < lo) { keep = false; break; }
        if (keep && rules.require_complete) {
            for (std::size_t i = 0; i < schema.size(); ++i)
                if (!schema.var(i).conditionable && std::isnan(r[i])) { keep = false; break; }
        }
        if (keep) out.push_back(r);
    }
    return out;
}

std::string render_schema(const Schema& schema, const NormStats* norm) {
    std::ostringstream os;
    for (std::size_t i = 0; i < schema.size(); ++i) {
        const auto& v = schema.var(i);
        os << "[variable]\n";
        os << "name = " << v.name << "\n";
        os << "kind = " << kind_name(v.kind) << "\n";
        if (v.kind == VarKind::Categorical) os << "levels = " << v.levels << "\n";
        if (v.kind == VarKind::Cyclic) os << "period = " << format_double(v.period) << "\n";
        os << "conditionable = " << (v.conditionable ? "true" : "false") << "\n";
        if (norm && norm->fitted &&
            (v.kind == VarKind::Gaussian || v.kind == VarKind::Positive)) {
            os << "mean = " << format_double(norm->mean[i]) << "\n";
            os << "sd = " << format_double(norm->sd[i]) << "\n";
        }
        os << "\n";
    }
    return os.str();
}

std::pair<Schema, NormStats> parse_schema(const std::string& text) {
    std::vector<VariableSpec> vars;
    std::vector<std::pair<double, double>> ms;  // mean/sd per var, NaN = absent
    VariableSpec cur;
    double cur_mean = std::nan(""), cur_sd = std::nan("");
    bool in_section = false;

    auto flush = [&] {
        if (!in_section) return;
        vars.push_back(cur);
        ms.emplace_back(cur_mean, cur_sd);
        cur = VariableSpec{};
        cur_mean = cur_sd = std::nan("");
    };

    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t == "[variable]") {
            flush();
            in_section = true;
            continue;
        }
        auto eq = t.find('=');
        if (!in_section || eq == std::string::npos)
            throw SchemaParseError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        std::string val = trim(t.substr(eq + 1));
        if (key == "name") cur.name = val;
        else if (key == "kind") {
            if (val == "categorical") cur.kind = VarKind::Categorical;
            else if (val == "gaussian") cur.kind = VarKind::Gaussian;
            else if (val == "positive") cur.kind = VarKind::Positive;
            else if (val == "cyclic") cur.kind = VarKind::Cyclic;
            else throw SchemaParseError("unknown kind: " + val);
        } else if (key == "levels") cur.levels = static_cast<int>(parse_double(val));
        else if (key == "period") cur.period = parse_double(val);
        else if (key == "conditionable") {
            if (val == "true") cur.conditionable = true;
            else if (val == "false") cur.conditionable = false;
            else throw SchemaParseError("conditionable must be true/false, got: " + val);
        } else if (key == "mean") cur_mean = parse_double(val);
        else if (key == "sd") cur_sd = parse_double(val);
        else throw SchemaParseError("unknown key: " + key);
    }
    flush();

    Schema schema(std::move(vars));
    NormStats norm;
    norm.mean.assign(schema.size(), 0.0);
    norm.sd.assign(schema.size(), 1.0);
    bool complete = true;
    for (std::size_t i = 0; i < schema.size(); ++i) {
        VarKind k = schema.var(i).kind;
        if (k != VarKind::Gaussian && k != VarKind::Positive) continue;
        if (std::isnan(ms[i].first) || std::isnan(ms[i].second)) { complete = false; continue; }
        if (!(ms[i].second > 0.0)) throw SchemaParseError("sd must be > 0 for " + schema.var(i).name);
        norm.mean[i] = ms[i].first;
        norm.sd[i] = ms[i].second;
    }
    norm.fitted = complete;
    return {std::move(schema), std::move(norm)};
}

}  // namespace mdcrbm
