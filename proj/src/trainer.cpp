#include "mdcrbm/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "mdcrbm/errors.hpp"
#include "mdcrbm/numeric.hpp"
#include "mdcrbm/rng.hpp"

namespace mdcrbm {

namespace {

constexpr double kParamCap = 1e6;

// Sufficient statistics of grad(-F): W pairs x with s (or its probabilities),
// c takes s, b takes x per linear slot and (x - b) per quadratic slot.
void accumulate(Gradient& g, const Eigen::VectorXd& x, const Eigen::VectorXd& s,
                const RbmParams& p, double sign) {
    g.dW.noalias() += sign * (x * s.transpose());
    g.dc += sign * s;
    for (const auto& blk : p.layout.blocks) {
        for (int i = blk.offset; i < blk.offset + blk.width; ++i) {
            double stat = blk.kind == VarKind::Categorical ? x[i] : x[i] - p.b[i];
            g.db[i] += sign * stat;
        }
    }
}

int pick_monitor_block(const Schema& schema, const std::string& name) {
    if (!name.empty()) {
        int idx = schema.index_of(name);
        if (schema.var(idx).kind != VarKind::Categorical) throw TargetNotCategorical(name);
        return idx;
    }
    for (std::size_t i = 0; i < schema.size(); ++i)
        if (schema.var(i).kind == VarKind::Categorical) return static_cast<int>(i);
    return -1;
}

double mean_or_nan(const Eigen::VectorXd& v) {
    return v.size() ? v.mean() : std::nan("");
}

}  // namespace

void TrainConfig::validate() const {
    if (batch_size < 1) throw InvalidConfig("batch_size must be >= 1");
    if (cd_steps < 1) throw InvalidConfig("cd_steps must be >= 1");
    if (!(lr0 > 0.0 && lr0 < 1.0)) throw InvalidConfig("lr0 must lie in (0, 1)");
    if (!(decay >= 0.0 && decay < 1.0)) throw InvalidConfig("decay must lie in [0, 1)");
    if (epochs < 0) throw InvalidConfig("epochs must be >= 0");
    if (!(validation_fraction >= 0.0 && validation_fraction < 1.0))
        throw InvalidConfig("validation_fraction must lie in [0, 1)");
    if (init_scale < 0.0) throw InvalidConfig("init_scale must be >= 0");
}

bool Gradient::all_finite() const {
    return dW.allFinite() && db.allFinite() && dc.allFinite();
}

RbmParams init_params(const Schema& schema, const Eigen::MatrixXd& encoded_data, int J,
                      const TrainConfig& config, std::mt19937_64& rng) {
    if (J < 1) throw InvalidConfig("hidden unit count must be >= 1");
    const Eigen::Index n = encoded_data.cols();
    if (n == 0) throw EmptySample();

    RbmParams p;
    p.layout = schema.layout();
    p.W.resize(p.layout.width, J);
    if (config.init_scale > 0.0) {
        for (Eigen::Index i = 0; i < p.W.rows(); ++i)
            for (int j = 0; j < J; ++j) p.W(i, j) = config.init_scale * draw_gauss(rng);
    } else {
        p.W.setZero();
    }
    p.c = Eigen::VectorXd::Zero(J);

    // Offsets match the data's first moments: log frequencies for categorical
    // levels, slot means for quadratic slots (softplus-inverted for Positive
    // so the rate unit's mean field starts near the data mean).
    p.b.resize(p.layout.width);
    Eigen::VectorXd slot_mean = encoded_data.rowwise().mean();
    for (const auto& blk : p.layout.blocks) {
        for (int i = blk.offset; i < blk.offset + blk.width; ++i) {
            switch (blk.kind) {
                case VarKind::Categorical: {
                    double freq = slot_mean[i];
                    if (freq <= 0.0) freq = 0.5 / static_cast<double>(n);
                    p.b[i] = std::log(freq);
                    break;
                }
                case VarKind::Positive:
                    p.b[i] = slot_mean[i] > 1e-12 ? std::log(std::expm1(slot_mean[i]))
                                                  : std::log(1e-12);
                    break;
                default:
                    p.b[i] = slot_mean[i];
            }
        }
    }
    p.check_shapes();
    return p;
}

Gradient cd_gradient(const Eigen::MatrixXd& batch, const RbmParams& params, int cd_steps,
                     std::mt19937_64& rng) {
    if (batch.cols() == 0) throw EmptySample();
    if (batch.rows() != params.K()) throw ShapeMismatch("batch row count vs K");

    Gradient g;
    g.dW = Eigen::MatrixXd::Zero(params.K(), params.J());
    g.db = Eigen::VectorXd::Zero(params.K());
    g.dc = Eigen::VectorXd::Zero(params.J());

    for (Eigen::Index col = 0; col < batch.cols(); ++col) {
        Eigen::VectorXd x0 = batch.col(col);
        accumulate(g, x0, hidden_conditional(x0, params), params, -1.0);

        Eigen::VectorXd s = sample_hidden(x0, params, rng);
        Eigen::VectorXd x = x0;
        for (int t = 0; t < cd_steps; ++t) {
            x = sample_visible(s, params, rng);
            s = sample_hidden(x, params, rng);
        }
        accumulate(g, x, s, params, 1.0);
    }
    double inv = 1.0 / static_cast<double>(batch.cols());
    g.dW *= inv;
    g.db *= inv;
    g.dc *= inv;
    return g;
}

void sgd_step(RbmParams& params, const Gradient& grad, double lr) {
    if (!grad.all_finite()) throw NonFiniteGradient();
    params.W -= lr * grad.dW;
    params.b -= lr * grad.db;
    params.c -= lr * grad.dc;
}

double conditional_ll(const Eigen::MatrixXd& X, int block_index, const RbmParams& params) {
    const Block& blk = params.layout.blocks.at(block_index);
    Eigen::MatrixXd neg_f(blk.width, X.cols());
    Eigen::MatrixXd probe = X;
    for (int l = 0; l < blk.width; ++l) {
        probe.middleRows(blk.offset, blk.width).setZero();
        probe.row(blk.offset + l).setOnes();
        neg_f.row(l) = -free_energy_batch(probe, params).transpose();
    }
    double total = 0.0;
    for (Eigen::Index n = 0; n < X.cols(); ++n) {
        int obs = 0;
        X.col(n).segment(blk.offset, blk.width).maxCoeff(&obs);
        double m = neg_f.col(n).maxCoeff();
        double z = 0.0;
        for (int l = 0; l < blk.width; ++l) z += std::exp(neg_f(l, n) - m);
        total += neg_f(obs, n) - m - std::log(z);
    }
    return X.cols() ? total / static_cast<double>(X.cols()) : std::nan("");
}

std::pair<RbmParams, TrainReport> train(const std::vector<Row>& dataset, const Schema& schema,
                                        const NormStats& norm, int J, const TrainConfig& config) {
    config.validate();
    Eigen::MatrixXd all = encode_table(dataset, schema, norm);
    const Eigen::Index n = all.cols();
    if (n == 0) throw EmptySample();

    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    {
        auto split_rng = substream(config.seed, "split");
        std::shuffle(order.begin(), order.end(), split_rng);
    }
    Eigen::Index n_val = static_cast<Eigen::Index>(config.validation_fraction * static_cast<double>(n));
    Eigen::Index n_train = n - n_val;
    if (n_train < 1) throw InvalidConfig("validation split leaves no training rows");
    Eigen::MatrixXd train_x(all.rows(), n_train), val_x(all.rows(), n_val);
    for (Eigen::Index i = 0; i < n_train; ++i) train_x.col(i) = all.col(order[i]);
    for (Eigen::Index i = 0; i < n_val; ++i) val_x.col(i) = all.col(order[n_train + i]);

    auto init_rng = substream(config.seed, "init");
    RbmParams params = init_params(schema, train_x, J, config, init_rng);
    int monitor = pick_monitor_block(schema, config.monitor_variable);

    TrainReport report;
    if (monitor >= 0) report.monitor_variable = schema.var(monitor).name;

    auto shuffle_rng = substream(config.seed, "shuffle");
    auto chain_rng = substream(config.seed, "cd");
    double lr = config.lr0;
    std::vector<Eigen::Index> batch_order(n_train);
    std::iota(batch_order.begin(), batch_order.end(), 0);

    for (int epoch = 0; epoch < config.epochs && !report.diverged; ++epoch) {
        auto t0 = std::chrono::steady_clock::now();
        std::shuffle(batch_order.begin(), batch_order.end(), shuffle_rng);
        for (Eigen::Index at = 0; at < n_train; at += config.batch_size) {
            Eigen::Index sz = std::min<Eigen::Index>(config.batch_size, n_train - at);
            Eigen::MatrixXd batch(all.rows(), sz);
            for (Eigen::Index i = 0; i < sz; ++i) batch.col(i) = train_x.col(batch_order[at + i]);

            RbmParams snapshot = params;
            bool bad = false;
            try {
                Gradient g = cd_gradient(batch, params, config.cd_steps, chain_rng);
                sgd_step(params, g, lr);
            } catch (const NonFiniteGradient&) {
                bad = true;
            }
            if (!bad && (!params.all_finite() ||
                         std::max({params.W.cwiseAbs().maxCoeff(), params.b.cwiseAbs().maxCoeff(),
                                   params.c.cwiseAbs().maxCoeff()}) > kParamCap))
                bad = true;
            if (bad) {
                params = snapshot;
                report.diverged = true;
                report.divergence_note = "aborted at epoch " + std::to_string(epoch + 1) +
                                         ": non-finite gradient or parameter overflow";
                break;
            }
            lr *= 1.0 - config.decay;
        }

        EpochMetrics m;
        m.train_free_energy = mean_or_nan(free_energy_batch(train_x, params));
        m.val_free_energy = mean_or_nan(n_val ? free_energy_batch(val_x, params)
                                              : Eigen::VectorXd());
        if (monitor >= 0) {
            m.train_cll = conditional_ll(train_x, monitor, params);
            m.val_cll = n_val ? conditional_ll(val_x, monitor, params) : std::nan("");
        } else {
            m.train_cll = m.val_cll = std::nan("");
        }
        m.lr = lr;
        m.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        report.epochs.push_back(m);
    }
    return {std::move(params), std::move(report)};
}

ParamDistribution param_distribution(const RbmParams& params, const Schema& schema,
                                     const std::string& block_name, int bins) {
    int idx = -1;
    for (std::size_t i = 0; i < schema.size(); ++i)
        if (schema.var(i).name == block_name) { idx = static_cast<int>(i); break; }
    if (idx < 0) throw UnknownBlock(block_name);
    if (bins < 1) throw InvalidConfig("bins must be >= 1");
    const Block& blk = schema.block(idx);

    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(blk.width) * params.J());
    for (int i = blk.offset; i < blk.offset + blk.width; ++i)
        for (int j = 0; j < params.J(); ++j) w.push_back(params.W(i, j));

    ParamDistribution d;
    double sum = std::accumulate(w.begin(), w.end(), 0.0);
    d.mean = sum / static_cast<double>(w.size());
    double ss = 0.0;
    for (double v : w) ss += (v - d.mean) * (v - d.mean);
    d.variance = w.size() > 1 ? ss / static_cast<double>(w.size() - 1) : 0.0;

    auto [lo_it, hi_it] = std::minmax_element(w.begin(), w.end());
    double lo = *lo_it, hi = *hi_it;
    if (lo == hi) { lo -= 0.5; hi += 0.5; }
    d.bin_edges.resize(bins + 1);
    for (int i = 0; i <= bins; ++i)
        d.bin_edges[i] = lo + (hi - lo) * static_cast<double>(i) / bins;
    d.counts.assign(bins, 0);
    for (double v : w) {
        int k = static_cast<int>((v - lo) / (hi - lo) * bins);
        d.counts[std::clamp(k, 0, bins - 1)] += 1;
    }
    return d;
}

}  // namespace mdcrbm
