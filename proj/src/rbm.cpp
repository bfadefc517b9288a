#include "mdcrbm/rbm.hpp"

#include <cmath>
#include <string>

#include "mdcrbm/errors.hpp"
#include "mdcrbm/numeric.hpp"
#include "mdcrbm/rng.hpp"

namespace mdcrbm {

namespace {

void check_x(const Eigen::VectorXd& x, const RbmParams& p) {
    if (x.size() != p.K())
        throw ShapeMismatch("x has " + std::to_string(x.size()) + " slots, model has " +
                            std::to_string(p.K()));
}

void check_s(const Eigen::VectorXd& s, const RbmParams& p) {
    if (s.size() != p.J())
        throw ShapeMismatch("s has " + std::to_string(s.size()) + " units, model has " +
                            std::to_string(p.J()));
}

// V(x) and its per-slot derivative share the block walk.
double visible_term(const Eigen::VectorXd& x, const RbmParams& p) {
    double v = 0.0;
    for (const auto& blk : p.layout.blocks) {
        if (blk.kind == VarKind::Categorical) {
            for (int i = blk.offset; i < blk.offset + blk.width; ++i) v -= p.b[i] * x[i];
        } else {
            for (int i = blk.offset; i < blk.offset + blk.width; ++i) {
                double d = x[i] - p.b[i];
                v += 0.5 * d * d;
            }
        }
    }
    return v;
}

}  // namespace

void RbmParams::check_shapes() const {
    if (layout.width != K())
        throw ShapeMismatch("layout width " + std::to_string(layout.width) + " vs b size " +
                            std::to_string(K()));
    if (W.rows() != K() || W.cols() != J())
        throw ShapeMismatch("W is " + std::to_string(W.rows()) + "x" + std::to_string(W.cols()) +
                            ", expected " + std::to_string(K()) + "x" + std::to_string(J()));
}

bool RbmParams::all_finite() const {
    return W.allFinite() && b.allFinite() && c.allFinite();
}

double energy(const Eigen::VectorXd& x, const Eigen::VectorXd& s, const RbmParams& p) {
    check_x(x, p);
    check_s(s, p);
    return visible_term(x, p) - x.dot(p.W * s) - p.c.dot(s);
}

double free_energy(const Eigen::VectorXd& x, const RbmParams& p) {
    check_x(x, p);
    double f = visible_term(x, p);
    Eigen::VectorXd a = p.W.transpose() * x + p.c;
    for (int j = 0; j < a.size(); ++j) f -= softplus(a[j]);
    return f;
}

Eigen::VectorXd free_energy_batch(const Eigen::MatrixXd& X, const RbmParams& p) {
    if (X.rows() != p.K()) throw ShapeMismatch("batch row count vs K");
    Eigen::VectorXd f(X.cols());
    for (Eigen::Index n = 0; n < X.cols(); ++n) f[n] = visible_term(X.col(n), p);
    Eigen::MatrixXd A = p.W.transpose() * X;
    A.colwise() += p.c;
    for (Eigen::Index n = 0; n < A.cols(); ++n)
        for (Eigen::Index j = 0; j < A.rows(); ++j) f[n] -= softplus(A(j, n));
    return f;
}

FreeEnergyGrad free_energy_gradient(const Eigen::VectorXd& x, const RbmParams& p) {
    check_x(x, p);
    Eigen::VectorXd a = p.W.transpose() * x + p.c;
    Eigen::VectorXd q(a.size());
    for (int j = 0; j < a.size(); ++j) q[j] = sigmoid(a[j]);

    FreeEnergyGrad g;
    g.dW = -x * q.transpose();
    g.dc = -q;
    g.db.resize(p.K());
    for (const auto& blk : p.layout.blocks) {
        for (int i = blk.offset; i < blk.offset + blk.width; ++i)
            g.db[i] = blk.kind == VarKind::Categorical ? -x[i] : -(x[i] - p.b[i]);
    }
    return g;
}

Eigen::VectorXd hidden_conditional(const Eigen::VectorXd& x, const RbmParams& p) {
    check_x(x, p);
    Eigen::VectorXd a = p.W.transpose() * x + p.c;
    for (int j = 0; j < a.size(); ++j) a[j] = sigmoid(a[j]);
    return a;
}

VisibleConditional visible_conditional(const Eigen::VectorXd& s, const RbmParams& p) {
    check_s(s, p);
    VisibleConditional vc;
    vc.activation = p.W * s + p.b;
    vc.mean = vc.activation;
    for (const auto& blk : p.layout.blocks) {
        switch (blk.kind) {
            case VarKind::Categorical: {
                double m = vc.activation.segment(blk.offset, blk.width).maxCoeff();
                double z = 0.0;
                for (int i = blk.offset; i < blk.offset + blk.width; ++i)
                    z += std::exp(vc.activation[i] - m);
                for (int i = blk.offset; i < blk.offset + blk.width; ++i)
                    vc.mean[i] = std::exp(vc.activation[i] - m) / z;
                break;
            }
            case VarKind::Positive:
                for (int i = blk.offset; i < blk.offset + blk.width; ++i)
                    vc.mean[i] = softplus(vc.activation[i]);
                break;
            default:
                break;  // Gaussian/Cyclic mean is the activation
        }
    }
    return vc;
}

Eigen::VectorXd sample_hidden(const Eigen::VectorXd& x, const RbmParams& p, std::mt19937_64& rng) {
    Eigen::VectorXd q = hidden_conditional(x, p);
    for (int j = 0; j < q.size(); ++j) q[j] = draw_unit(rng) < q[j] ? 1.0 : 0.0;
    return q;
}

Eigen::VectorXd sample_visible(const Eigen::VectorXd& s, const RbmParams& p, std::mt19937_64& rng) {
    VisibleConditional vc = visible_conditional(s, p);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(p.K());
    for (const auto& blk : p.layout.blocks) {
        switch (blk.kind) {
            case VarKind::Categorical: {
                double u = draw_unit(rng);
                double acc = 0.0;
                int pick = blk.offset + blk.width - 1;
                for (int i = blk.offset; i < blk.offset + blk.width; ++i) {
                    acc += vc.mean[i];
                    if (u < acc) { pick = i; break; }
                }
                x[pick] = 1.0;
                break;
            }
            case VarKind::Positive:
                for (int i = blk.offset; i < blk.offset + blk.width; ++i) {
                    double mu = vc.activation[i];
                    x[i] = std::max(0.0, mu + draw_gauss(rng) * std::sqrt(sigmoid(mu)));
                }
                break;
            default:
                for (int i = blk.offset; i < blk.offset + blk.width; ++i)
                    x[i] = vc.activation[i] + draw_gauss(rng);
                break;
        }
    }
    return x;
}

void gibbs_sweep(GibbsState& state, const RbmParams& p, std::mt19937_64& rng,
                 const std::vector<bool>& clamp_slots) {
    state.s = sample_hidden(state.x, p, rng);
    Eigen::VectorXd next = sample_visible(state.s, p, rng);
    if (!clamp_slots.empty()) {
        if (clamp_slots.size() != static_cast<std::size_t>(p.K()))
            throw ShapeMismatch("clamp mask length");
        for (int i = 0; i < p.K(); ++i)
            if (clamp_slots[i]) next[i] = state.x[i];
    }
    state.x = std::move(next);
    ++state.step;
}

Enumeration enumerate_exact(const RbmParams& p) {
    p.check_shapes();
    double n_joint = 1.0;
    for (const auto& blk : p.layout.blocks) {
        if (blk.kind != VarKind::Categorical) throw UnsupportedKind(kind_name(blk.kind));
        n_joint *= blk.width;
    }
    double states = n_joint * std::pow(2.0, p.J());
    if (states > static_cast<double>(1 << 22))
        throw TooLarge(std::to_string(states) + " joint states");

    Enumeration e;
    std::vector<int> idx(p.layout.blocks.size(), 0);
    std::vector<double> neg_f;
    while (true) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(p.K());
        for (std::size_t bI = 0; bI < idx.size(); ++bI)
            x[p.layout.blocks[bI].offset + idx[bI]] = 1.0;
        // Independent route from free_energy: log-domain sum over all s.
        std::vector<double> terms;
        terms.reserve(1u << p.J());
        Eigen::VectorXd s(p.J());
        for (std::uint64_t bits = 0; bits < (1ull << p.J()); ++bits) {
            for (int j = 0; j < p.J(); ++j) s[j] = (bits >> j) & 1ull ? 1.0 : 0.0;
            terms.push_back(-energy(x, s, p));
        }
        e.configs.push_back(std::move(x));
        neg_f.push_back(logsumexp(terms));

        std::size_t k = 0;
        while (k < idx.size()) {
            if (++idx[k] < p.layout.blocks[k].width) break;
            idx[k++] = 0;
        }
        if (k == idx.size()) break;
    }
    e.log_z = logsumexp(neg_f);
    e.prob.resize(neg_f.size());
    for (std::size_t i = 0; i < neg_f.size(); ++i) e.prob[i] = std::exp(neg_f[i] - e.log_z);
    return e;
}

Eigen::VectorXd target_log_conditional(const Eigen::VectorXd& x, int block_index,
                                       const RbmParams& p) {
    check_x(x, p);
    const Block& blk = p.layout.blocks.at(block_index);
    if (blk.kind != VarKind::Categorical) throw UnsupportedKind(kind_name(blk.kind));
    Eigen::VectorXd probe = x;
    probe.segment(blk.offset, blk.width).setZero();
    Eigen::VectorXd neg_f(blk.width);
    for (int l = 0; l < blk.width; ++l) {
        probe[blk.offset + l] = 1.0;
        neg_f[l] = -free_energy(probe, p);
        probe[blk.offset + l] = 0.0;
    }
    double m = neg_f.maxCoeff();
    double z = 0.0;
    for (int l = 0; l < blk.width; ++l) z += std::exp(neg_f[l] - m);
    double log_z = m + std::log(z);
    return neg_f.array() - log_z;
}

}  // namespace mdcrbm
