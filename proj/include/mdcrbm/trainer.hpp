#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "mdcrbm/rbm.hpp"
#include "mdcrbm/schema.hpp"

namespace mdcrbm {

struct TrainConfig {
    int batch_size = 128;
    int cd_steps = 1;
    double lr0 = 1e-2;
    double decay = 0.001;  // eta *= (1 - decay) after every batch
    int epochs = 10;
    std::uint64_t seed = 1;
    double validation_fraction = 0.3;
    double init_scale = 0.01;  // stddev of W at init; 0 = exact zeros
    // Choice variable for the likelihood monitor; empty = first categorical.
    std::string monitor_variable;

    void validate() const;  // InvalidConfig on out-of-range fields
};

struct EpochMetrics {
    double train_free_energy = 0.0;
    double val_free_energy = 0.0;
    double train_cll = 0.0;  // mean ln p(choice | rest) per observation
    double val_cll = 0.0;
    double lr = 0.0;  // eta after the epoch's last batch
    double seconds = 0.0;
};

struct TrainReport {
    std::vector<EpochMetrics> epochs;
    std::string monitor_variable;
    bool diverged = false;
    std::string divergence_note;
};

// Gradient of (-F) averaged over a batch, as used by Algorithm-style CD:
// negative-chain statistics minus data statistics. sgd_step subtracts it.
struct Gradient {
    Eigen::MatrixXd dW;
    Eigen::VectorXd db;
    Eigen::VectorXd dc;
    bool all_finite() const;
};

RbmParams init_params(const Schema& schema, const Eigen::MatrixXd& encoded_data, int J,
                      const TrainConfig& config, std::mt19937_64& rng);

// batch columns are encoded rows. Positive phase pairs each data column with
// its hidden probabilities; negative phase runs N alternating sampled sweeps
// and pairs the final visible state with a sampled hidden vector.
Gradient cd_gradient(const Eigen::MatrixXd& batch, const RbmParams& params, int cd_steps,
                     std::mt19937_64& rng);

void sgd_step(RbmParams& params, const Gradient& grad, double lr);

std::pair<RbmParams, TrainReport> train(const std::vector<Row>& dataset, const Schema& schema,
                                        const NormStats& norm, int J, const TrainConfig& config);

struct ParamDistribution {
    double mean = 0.0;
    double variance = 0.0;  // sample convention (n-1)
    std::vector<double> bin_edges;
    std::vector<long> counts;
};

// Distribution of the W entries whose visible slot lies in the named block.
ParamDistribution param_distribution(const RbmParams& params, const Schema& schema,
                                     const std::string& block_name, int bins = 30);

// Mean conditional log-likelihood of a categorical block over columns of X.
double conditional_ll(const Eigen::MatrixXd& X, int block_index, const RbmParams& params);

}  // namespace mdcrbm
