#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "mdcrbm/model_io.hpp"
#include "mdcrbm/schema.hpp"

namespace mdcrbm {

// d p(target = k | x) / d x_i over the non-categorical design slots,
// differentiating the closed-form conditional (softmax over level free
// energies). `slots` records which design-vector index each column is.
struct ChoiceJacobian {
    Eigen::MatrixXd d;          // levels x slots.size()
    Eigen::VectorXd prob;       // p(target = k | x)
    std::vector<int> slots;
};

ChoiceJacobian choice_jacobian(const Row& x, const std::string& target, const Model& model);

// Point elasticity (dp_k/dx_v) * x_v / p_k in raw data units, one entry per
// target level. The variable must be Gaussian or Positive.
Eigen::VectorXd elasticity(const Row& x, const std::string& target, const std::string& variable,
                           const Model& model);

struct ElasticityReport {
    std::vector<Eigen::VectorXd> per_observation;  // aligned with kept rows
    Eigen::VectorXd mean;                          // per level
    Eigen::VectorXd sd;                            // per level, sample convention
    std::vector<double> bin_edges;                 // pooled across levels
    std::vector<long> counts;
    long excluded = 0;  // rows with any level probability below 1e-12
};

ElasticityReport elasticity_density(const std::vector<Row>& dataset, const std::string& target,
                                    const std::string& variable, const Model& model,
                                    int bins = 30);

}  // namespace mdcrbm
