#pragma once

#include <Eigen/Dense>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mdcrbm/model_io.hpp"
#include "mdcrbm/rbm.hpp"
#include "mdcrbm/schema.hpp"

namespace mdcrbm {

// Per-variable known/unknown split for clamped generation. Known values are
// raw data units; Unknown variables must be flagged conditionable.
struct ConditioningMask {
    std::vector<std::optional<double>> values;  // nullopt = unknown

    static ConditioningMask from_row(const Row& row);  // NaN cells = unknown
    void check(const Schema& schema) const;
    std::vector<int> unknown_vars() const;
};

struct GeneratorConfig {
    int sweeps = 50;     // impute
    int burn_in = 200;   // synthesize
    int thin = 10;       // synthesize
};

// Closed-form p(target level | all other variables), marginalizing the
// hidden layer exactly through the softplus terms.
Eigen::VectorXd conditional_choice_prob(const Row& known, const std::string& target,
                                        const Model& model);

// Clamped Gibbs draw of the Unknown variables; Known cells of the returned
// row carry the mask's exact input values.
Row impute(const ConditioningMask& mask, const Model& model, int sweeps, std::mt19937_64& rng);

// Unclamped chain; seeds from a provided encoded data column when available,
// otherwise from a visible draw given random hidden states.
std::vector<Row> synthesize(const Model& model, int n, int burn_in, int thin,
                            std::mt19937_64& rng,
                            const Eigen::MatrixXd* seed_data = nullptr);

// Joint draws over several targets via one clamped chain, plus the
// factorized closed-form marginal of each categorical target for comparison.
struct JointDraws {
    std::vector<Row> rows;
    std::vector<Eigen::VectorXd> factorized_marginals;  // per target, empty if non-categorical
};
JointDraws mdc_conditional_product(const ConditioningMask& known,
                                   const std::vector<std::string>& targets, const Model& model,
                                   int n, int sweeps, std::mt19937_64& rng);

}  // namespace mdcrbm
