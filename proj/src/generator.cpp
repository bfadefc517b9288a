#include "mdcrbm/generator.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mdcrbm/errors.hpp"
#include "mdcrbm/numeric.hpp"
#include "mdcrbm/rng.hpp"

namespace mdcrbm {

namespace {

// Encodes the Known cells; Unknown blocks start at their unconditional
// means (standardized zero for Gaussian, the offset-implied mean otherwise)
// so the clamped chain starts from a neutral state.
Eigen::VectorXd encode_mask(const ConditioningMask& mask, const Model& model,
                            std::vector<bool>& clamp_slots) {
    const Schema& schema = model.schema;
    const RbmParams& p = model.params;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(schema.width());
    clamp_slots.assign(schema.width(), false);
    for (std::size_t i = 0; i < schema.size(); ++i) {
        const Block& blk = schema.block(i);
        if (mask.values[i].has_value()) {
            Row probe(schema.size(), 0.0);
            probe[i] = *mask.values[i];
            Eigen::VectorXd enc = encode_row(probe, schema, model.norm);
            x.segment(blk.offset, blk.width) = enc.segment(blk.offset, blk.width);
            for (int k = blk.offset; k < blk.offset + blk.width; ++k) clamp_slots[k] = true;
        } else {
            switch (blk.kind) {
                case VarKind::Categorical:
                    for (int k = blk.offset; k < blk.offset + blk.width; ++k)
                        x[k] = 1.0 / blk.width;
                    break;
                case VarKind::Positive:
                    x[blk.offset] = softplus(p.b[blk.offset]);
                    break;
                default:
                    for (int k = blk.offset; k < blk.offset + blk.width; ++k) x[k] = p.b[k];
            }
        }
    }
    return x;
}

Row decode_with_clamps(const Eigen::VectorXd& x, const ConditioningMask& mask,
                       const Model& model) {
    Row out = decode_vector(x, model.schema, model.norm);
    for (std::size_t i = 0; i < mask.values.size(); ++i)
        if (mask.values[i].has_value()) out[i] = *mask.values[i];
    return out;
}

}  // namespace

ConditioningMask ConditioningMask::from_row(const Row& row) {
    ConditioningMask m;
    m.values.reserve(row.size());
    for (double v : row)
        m.values.push_back(std::isnan(v) ? std::nullopt : std::optional<double>(v));
    return m;
}

void ConditioningMask::check(const Schema& schema) const {
    if (values.size() != schema.size()) throw LengthMismatch(values.size(), schema.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!values[i].has_value() && !schema.var(i).conditionable)
            throw NotConditionable(schema.var(i).name);
}

std::vector<int> ConditioningMask::unknown_vars() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!values[i].has_value()) out.push_back(static_cast<int>(i));
    return out;
}

Eigen::VectorXd conditional_choice_prob(const Row& known, const std::string& target,
                                        const Model& model) {
    const Schema& schema = model.schema;
    int tgt = schema.index_of(target);
    if (schema.var(tgt).kind != VarKind::Categorical) throw TargetNotCategorical(target);
    if (known.size() != schema.size()) throw LengthMismatch(known.size(), schema.size());
    for (std::size_t i = 0; i < known.size(); ++i)
        if (static_cast<int>(i) != tgt && std::isnan(known[i]))
            throw MissingKnown(schema.var(i).name);

    // Target cell may be anything; its block is overwritten level by level.
    Row probe = known;
    probe[tgt] = 0.0;
    Eigen::VectorXd x = encode_row(probe, schema, model.norm);
    Eigen::VectorXd logp = target_log_conditional(x, tgt, model.params);
    return logp.array().exp();
}

Row impute(const ConditioningMask& mask, const Model& model, int sweeps, std::mt19937_64& rng) {
    mask.check(model.schema);
    if (mask.unknown_vars().empty()) throw NothingUnknown();
    if (sweeps < 1) throw InvalidConfig("sweeps must be >= 1");

    std::vector<bool> clamp_slots;
    GibbsState state;
    state.x = encode_mask(mask, model, clamp_slots);
    for (int t = 0; t < sweeps; ++t) gibbs_sweep(state, model.params, rng, clamp_slots);
    return decode_with_clamps(state.x, mask, model);
}

std::vector<Row> synthesize(const Model& model, int n, int burn_in, int thin,
                            std::mt19937_64& rng, const Eigen::MatrixXd* seed_data) {
    if (n < 1) throw InvalidConfig("sample count must be >= 1");
    if (burn_in < 0 || thin < 1) throw InvalidConfig("burn_in >= 0 and thin >= 1 required");
    const RbmParams& p = model.params;

    GibbsState state;
    if (seed_data && seed_data->cols() > 0) {
        auto col = std::uniform_int_distribution<Eigen::Index>(0, seed_data->cols() - 1)(rng);
        state.x = seed_data->col(col);
    } else {
        Eigen::VectorXd s(p.J());
        for (int j = 0; j < p.J(); ++j) s[j] = draw_unit(rng) < 0.5 ? 1.0 : 0.0;
        state.x = sample_visible(s, p, rng);
    }

    for (int t = 0; t < burn_in; ++t) gibbs_sweep(state, p, rng);
    std::vector<Row> rows;
    rows.reserve(n);
    while (static_cast<int>(rows.size()) < n) {
        for (int t = 0; t < thin; ++t) gibbs_sweep(state, p, rng);
        rows.push_back(decode_vector(state.x, model.schema, model.norm));
    }
    return rows;
}

JointDraws mdc_conditional_product(const ConditioningMask& known,
                                   const std::vector<std::string>& targets, const Model& model,
                                   int n, int sweeps, std::mt19937_64& rng) {
    const Schema& schema = model.schema;
    if (targets.empty()) throw NothingUnknown();
    std::set<std::string> uniq(targets.begin(), targets.end());
    if (uniq.size() != targets.size()) throw Error("duplicate target variable");

    // The chain mask treats exactly the targets as unknown.
    ConditioningMask mask = known;
    if (mask.values.size() != schema.size()) throw LengthMismatch(mask.values.size(), schema.size());
    for (const auto& t : targets) mask.values[schema.index_of(t)] = std::nullopt;
    mask.check(schema);

    JointDraws out;
    // Factorized view: each categorical target's closed-form conditional with
    // every other unknown cell pinned at the chain's neutral start state. The
    // chain-based joint below is the authoritative draw; this is the
    // product-of-marginals comparison baseline.
    std::vector<bool> clamp_slots;
    Row neutral = decode_vector(encode_mask(mask, model, clamp_slots), schema, model.norm);
    for (const auto& t : targets) {
        int idx = schema.index_of(t);
        if (schema.var(idx).kind != VarKind::Categorical) {
            out.factorized_marginals.emplace_back();
            continue;
        }
        Row probe(schema.size());
        for (std::size_t i = 0; i < schema.size(); ++i)
            probe[i] = mask.values[i].has_value() ? *mask.values[i] : neutral[i];
        out.factorized_marginals.push_back(conditional_choice_prob(probe, t, model));
    }

    out.rows.reserve(n);
    for (int i = 0; i < n; ++i) out.rows.push_back(impute(mask, model, sweeps, rng));
    return out;
}

}  // namespace mdcrbm
