#include "mdcrbm/elasticity.hpp"

#include <algorithm>
#include <cmath>

#include "mdcrbm/errors.hpp"
#include "mdcrbm/numeric.hpp"

namespace mdcrbm {

namespace {

constexpr double kProbFloor = 1e-12;

}  // namespace

ChoiceJacobian choice_jacobian(const Row& raw, const std::string& target, const Model& model) {
    const Schema& schema = model.schema;
    const RbmParams& p = model.params;
    int tgt = schema.index_of(target);
    if (schema.var(tgt).kind != VarKind::Categorical) throw TargetNotCategorical(target);

    ChoiceJacobian out;
    for (const auto& blk : p.layout.blocks)
        if (blk.kind != VarKind::Categorical)
            for (int i = blk.offset; i < blk.offset + blk.width; ++i) out.slots.push_back(i);

    const Block& tblk = schema.block(tgt);
    Row probe = raw;
    probe[tgt] = 0.0;
    Eigen::VectorXd x = encode_row(probe, schema, model.norm);

    Eigen::VectorXd logp = target_log_conditional(x, tgt, p);
    out.prob = logp.array().exp();

    // du_k/dx_i for utility u_k = -F(x with target level k):
    //   -(x_i - b_i) + sum_j sigma(a_j) W_ij   over quadratic slots i.
    Eigen::MatrixXd du(tblk.width, static_cast<Eigen::Index>(out.slots.size()));
    for (int l = 0; l < tblk.width; ++l) {
        x.segment(tblk.offset, tblk.width).setZero();
        x[tblk.offset + l] = 1.0;
        Eigen::VectorXd a = p.W.transpose() * x + p.c;
        for (int j = 0; j < a.size(); ++j) a[j] = sigmoid(a[j]);
        for (std::size_t col = 0; col < out.slots.size(); ++col) {
            int i = out.slots[col];
            du(l, static_cast<Eigen::Index>(col)) =
                -(x[i] - p.b[i]) + p.W.row(i).dot(a);
        }
    }

    // dp_k/dx_i = p_k (du_k/dx_i - sum_m p_m du_m/dx_i)
    Eigen::RowVectorXd expected = out.prob.transpose() * du;
    out.d = out.prob.asDiagonal() * (du.rowwise() - expected);
    return out;
}

Eigen::VectorXd elasticity(const Row& raw, const std::string& target, const std::string& variable,
                           const Model& model) {
    const Schema& schema = model.schema;
    int var = schema.index_of(variable);
    VarKind kind = schema.var(var).kind;
    if (kind != VarKind::Gaussian && kind != VarKind::Positive)
        throw NonContinuousVariable(variable);

    ChoiceJacobian jac = choice_jacobian(raw, target, model);
    int slot = schema.block(var).offset;
    auto it = std::find(jac.slots.begin(), jac.slots.end(), slot);
    Eigen::Index col = static_cast<Eigen::Index>(it - jac.slots.begin());

    double x_raw = raw[var];
    double inv_sd = 1.0 / model.norm.sd[var];
    Eigen::VectorXd eps(jac.prob.size());
    for (Eigen::Index k = 0; k < jac.prob.size(); ++k) {
        if (jac.prob[k] < kProbFloor)
            throw ZeroProbability(target + " level " + std::to_string(k));
        eps[k] = jac.d(k, col) * inv_sd * x_raw / jac.prob[k];
    }
    return eps;
}

ElasticityReport elasticity_density(const std::vector<Row>& dataset, const std::string& target,
                                    const std::string& variable, const Model& model, int bins) {
    if (dataset.empty()) throw EmptySample();
    if (bins < 1) throw InvalidConfig("bins must be >= 1");

    ElasticityReport rep;
    for (const auto& row : dataset) {
        try {
            rep.per_observation.push_back(elasticity(row, target, variable, model));
        } catch (const ZeroProbability&) {
            ++rep.excluded;
        }
    }
    if (rep.per_observation.empty()) throw ZeroProbability("all observations excluded");

    Eigen::Index levels = rep.per_observation.front().size();
    double n = static_cast<double>(rep.per_observation.size());
    rep.mean = Eigen::VectorXd::Zero(levels);
    for (const auto& e : rep.per_observation) rep.mean += e;
    rep.mean /= n;
    rep.sd = Eigen::VectorXd::Zero(levels);
    if (rep.per_observation.size() > 1) {
        for (const auto& e : rep.per_observation)
            rep.sd += (e - rep.mean).array().square().matrix();
        rep.sd = (rep.sd / (n - 1.0)).array().sqrt();
    }

    double lo = rep.per_observation.front().minCoeff();
    double hi = rep.per_observation.front().maxCoeff();
    for (const auto& e : rep.per_observation) {
        lo = std::min(lo, e.minCoeff());
        hi = std::max(hi, e.maxCoeff());
    }
    if (lo == hi) { lo -= 0.5; hi += 0.5; }
    rep.bin_edges.resize(bins + 1);
    for (int i = 0; i <= bins; ++i)
        rep.bin_edges[i] = lo + (hi - lo) * static_cast<double>(i) / bins;
    rep.counts.assign(bins, 0);
    for (const auto& e : rep.per_observation)
        for (Eigen::Index k = 0; k < levels; ++k) {
            int bin = static_cast<int>((e[k] - lo) / (hi - lo) * bins);
            rep.counts[std::clamp(bin, 0, bins - 1)] += 1;
        }
    return rep;
}

}  // namespace mdcrbm
