#include "mdcrbm/nn.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "mdcrbm/errors.hpp"
#include "mdcrbm/numeric.hpp"
#include "mdcrbm/rng.hpp"

namespace mdcrbm {

namespace {

Eigen::VectorXd softmax(const Eigen::VectorXd& u) {
    Eigen::VectorXd p = (u.array() - u.maxCoeff()).exp();
    return p / p.sum();
}

double mean_cll(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                const NnParams& params) {
    if (features.cols() == 0) return std::nan("");
    double total = 0.0;
    for (Eigen::Index n = 0; n < features.cols(); ++n) {
        Eigen::VectorXd u = params.V.transpose() *
                                (params.W.transpose() * features.col(n) + params.c)
                                    .unaryExpr([](double z) { return sigmoid(z); }) +
                            params.d;
        double m = u.maxCoeff();
        double z = (u.array() - m).exp().sum();
        total += u[labels[static_cast<std::size_t>(n)]] - m - std::log(z);
    }
    return total / static_cast<double>(features.cols());
}

}  // namespace

Eigen::VectorXd nn_forward(const Eigen::VectorXd& features, const NnParams& params) {
    if (features.size() != params.W.rows()) throw ShapeMismatch("feature length vs W rows");
    Eigen::VectorXd h = (params.W.transpose() * features + params.c)
                            .unaryExpr([](double z) { return sigmoid(z); });
    return softmax(params.V.transpose() * h + params.d);
}

NnGradient nn_gradient(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                       const NnParams& params) {
    if (features.cols() == 0) throw EmptySample();
    if (labels.size() != static_cast<std::size_t>(features.cols()))
        throw LengthMismatch(labels.size(), static_cast<std::size_t>(features.cols()));

    NnGradient g;
    g.dW = Eigen::MatrixXd::Zero(params.W.rows(), params.W.cols());
    g.dc = Eigen::VectorXd::Zero(params.c.size());
    g.dV = Eigen::MatrixXd::Zero(params.V.rows(), params.V.cols());
    g.dd = Eigen::VectorXd::Zero(params.d.size());

    for (Eigen::Index n = 0; n < features.cols(); ++n) {
        Eigen::VectorXd x = features.col(n);
        Eigen::VectorXd h = (params.W.transpose() * x + params.c)
                                .unaryExpr([](double z) { return sigmoid(z); });
        Eigen::VectorXd p = softmax(params.V.transpose() * h + params.d);
        p[labels[static_cast<std::size_t>(n)]] -= 1.0;  // d loss / d logits
        g.dV.noalias() += h * p.transpose();
        g.dd += p;
        Eigen::VectorXd dh = params.V * p;
        Eigen::VectorXd dz = dh.array() * h.array() * (1.0 - h.array());
        g.dW.noalias() += x * dz.transpose();
        g.dc += dz;
    }
    double inv = 1.0 / static_cast<double>(features.cols());
    g.dW *= inv;
    g.dc *= inv;
    g.dV *= inv;
    g.dd *= inv;
    return g;
}

std::pair<NnParams, NnReport> nn_train(const std::vector<Row>& dataset, const Schema& schema,
                                       const NormStats& norm, int J, const std::string& target,
                                       const TrainConfig& config) {
    config.validate();
    if (J < 1) throw InvalidConfig("hidden unit count must be >= 1");
    int tgt = schema.index_of(target);
    if (schema.var(tgt).kind != VarKind::Categorical) throw TargetNotCategorical(target);
    const Block& tblk = schema.block(tgt);

    Eigen::MatrixXd all = encode_table(dataset, schema, norm);
    const Eigen::Index n = all.cols();
    if (n == 0) throw EmptySample();

    // Features: every design slot outside the target block.
    std::vector<int> feat_slots;
    for (int i = 0; i < schema.width(); ++i)
        if (i < tblk.offset || i >= tblk.offset + tblk.width) feat_slots.push_back(i);
    Eigen::MatrixXd feats(static_cast<Eigen::Index>(feat_slots.size()), n);
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (Eigen::Index col = 0; col < n; ++col) {
        for (std::size_t i = 0; i < feat_slots.size(); ++i)
            feats(static_cast<Eigen::Index>(i), col) = all(feat_slots[i], col);
        int lbl = 0;
        all.col(col).segment(tblk.offset, tblk.width).maxCoeff(&lbl);
        labels[static_cast<std::size_t>(col)] = lbl;
    }

    // Same split substream as the RBM trainer: both models see identical
    // train/validation partitions of the same dataset.
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    {
        auto split_rng = substream(config.seed, "split");
        std::shuffle(order.begin(), order.end(), split_rng);
    }
    Eigen::Index n_val = static_cast<Eigen::Index>(config.validation_fraction * static_cast<double>(n));
    Eigen::Index n_train = n - n_val;
    if (n_train < 1) throw InvalidConfig("validation split leaves no training rows");

    Eigen::MatrixXd train_x(feats.rows(), n_train), val_x(feats.rows(), n_val);
    std::vector<int> train_y(static_cast<std::size_t>(n_train)), val_y(static_cast<std::size_t>(n_val));
    for (Eigen::Index i = 0; i < n_train; ++i) {
        train_x.col(i) = feats.col(order[i]);
        train_y[static_cast<std::size_t>(i)] = labels[static_cast<std::size_t>(order[i])];
    }
    for (Eigen::Index i = 0; i < n_val; ++i) {
        val_x.col(i) = feats.col(order[n_train + i]);
        val_y[static_cast<std::size_t>(i)] = labels[static_cast<std::size_t>(order[n_train + i])];
    }

    NnParams params;
    params.W.resize(feats.rows(), J);
    auto init_rng = substream(config.seed, "nn-init");
    if (config.init_scale > 0.0) {
        for (Eigen::Index i = 0; i < params.W.rows(); ++i)
            for (int j = 0; j < J; ++j) params.W(i, j) = config.init_scale * draw_gauss(init_rng);
    } else {
        params.W.setZero();
    }
    params.c = Eigen::VectorXd::Zero(J);
    params.V = Eigen::MatrixXd::Zero(J, tblk.width);
    params.d = Eigen::VectorXd::Zero(tblk.width);

    NnReport report;
    report.target = target;
    report.curve.push_back({mean_cll(train_x, train_y, params),
                            n_val ? mean_cll(val_x, val_y, params) : std::nan(""), config.lr0,
                            0.0});

    auto shuffle_rng = substream(config.seed, "nn-shuffle");
    double lr = config.lr0;
    std::vector<Eigen::Index> batch_order(n_train);
    std::iota(batch_order.begin(), batch_order.end(), 0);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        auto t0 = std::chrono::steady_clock::now();
        std::shuffle(batch_order.begin(), batch_order.end(), shuffle_rng);
        for (Eigen::Index at = 0; at < n_train; at += config.batch_size) {
            Eigen::Index sz = std::min<Eigen::Index>(config.batch_size, n_train - at);
            Eigen::MatrixXd bx(feats.rows(), sz);
            std::vector<int> by(static_cast<std::size_t>(sz));
            for (Eigen::Index i = 0; i < sz; ++i) {
                bx.col(i) = train_x.col(batch_order[at + i]);
                by[static_cast<std::size_t>(i)] = train_y[static_cast<std::size_t>(batch_order[at + i])];
            }
            NnGradient g = nn_gradient(bx, by, params);
            if (!g.dW.allFinite() || !g.dc.allFinite() || !g.dV.allFinite() || !g.dd.allFinite())
                throw NonFiniteGradient();
            params.W -= lr * g.dW;
            params.c -= lr * g.dc;
            params.V -= lr * g.dV;
            params.d -= lr * g.dd;
            lr *= 1.0 - config.decay;
        }
        NnEpoch e;
        e.train_cll = mean_cll(train_x, train_y, params);
        e.val_cll = n_val ? mean_cll(val_x, val_y, params) : std::nan("");
        e.lr = lr;
        e.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        report.curve.push_back(e);
    }
    return {std::move(params), std::move(report)};
}

}  // namespace mdcrbm
