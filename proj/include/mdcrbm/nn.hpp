#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "mdcrbm/schema.hpp"
#include "mdcrbm/trainer.hpp"

namespace mdcrbm {

// Single-hidden-layer softmax classifier over the encoded design vector with
// the target block removed: h = sigma(W'x + c), p = softmax(V'h + d).
struct NnParams {
    Eigen::MatrixXd W;  // features x J
    Eigen::VectorXd c;  // J
    Eigen::MatrixXd V;  // J x levels
    Eigen::VectorXd d;  // levels
};

Eigen::VectorXd nn_forward(const Eigen::VectorXd& features, const NnParams& params);

struct NnGradient {
    Eigen::MatrixXd dW;
    Eigen::VectorXd dc;
    Eigen::MatrixXd dV;
    Eigen::VectorXd dd;
};

// Mean gradient of the cross-entropy loss over a batch of feature columns.
NnGradient nn_gradient(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                       const NnParams& params);

struct NnEpoch {
    double train_cll = 0.0;  // mean ln p(label) per observation
    double val_cll = 0.0;
    double lr = 0.0;
    double seconds = 0.0;
};

struct NnReport {
    // curve[0] is the pre-training state: ln(1/k) exactly, since the output
    // layer starts at zero.
    std::vector<NnEpoch> curve;
    std::string target;
};

// Same batch/learning-rate schedule and 70:30 split policy as the RBM
// trainer, so the two likelihood curves are directly comparable.
std::pair<NnParams, NnReport> nn_train(const std::vector<Row>& dataset, const Schema& schema,
                                       const NormStats& norm, int J, const std::string& target,
                                       const TrainConfig& config);

}  // namespace mdcrbm
