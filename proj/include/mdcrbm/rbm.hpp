#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "mdcrbm/schema.hpp"

namespace mdcrbm {

// Energy over a design vector x (K slots grouped into blocks) and binary
// hidden vector s (J units):
//
//   E(x,s) = V(x) - x'Ws - c's
//   V(x)   = sum_{i in quadratic blocks} (x_i - b_i)^2 / 2
//          - sum_{i in linear blocks}    b_i x_i
//
// Categorical blocks are linear; Gaussian, Positive and Cyclic slots carry
// the quadratic term (unit variance, data standardized upstream). The free
// energy marginalizes s in closed form:
//
//   F(x) = V(x) - sum_j softplus((W'x + c)_j),  e^{-F(x)} = sum_s e^{-E(x,s)}
struct RbmParams {
    Layout layout;
    Eigen::MatrixXd W;  // K x J
    Eigen::VectorXd b;  // K
    Eigen::VectorXd c;  // J

    int K() const { return static_cast<int>(b.size()); }
    int J() const { return static_cast<int>(c.size()); }
    void check_shapes() const;  // ShapeMismatch on any inconsistency
    bool all_finite() const;
};

struct GibbsState {
    Eigen::VectorXd x;
    Eigen::VectorXd s;
    long step = 0;
};

double energy(const Eigen::VectorXd& x, const Eigen::VectorXd& s, const RbmParams& p);
double free_energy(const Eigen::VectorXd& x, const RbmParams& p);

// F over the columns of X at once; one entry per column.
Eigen::VectorXd free_energy_batch(const Eigen::MatrixXd& X, const RbmParams& p);

// dF/dW, dF/db, dF/dc at x. The trainer's CD estimator averages differences
// of these statistics; the finite-difference oracle checks them directly.
struct FreeEnergyGrad {
    Eigen::MatrixXd dW;
    Eigen::VectorXd db;
    Eigen::VectorXd dc;
};
FreeEnergyGrad free_energy_gradient(const Eigen::VectorXd& x, const RbmParams& p);

// p(s_j = 1 | x) = sigma((W'x + c)_j), elementwise.
Eigen::VectorXd hidden_conditional(const Eigen::VectorXd& x, const RbmParams& p);

// Per-block conditional p(x | s). `mean` holds the distribution's expected
// value per slot: softmax probabilities over categorical blocks, the
// activation itself for Gaussian/Cyclic slots, softplus(activation) for
// Positive slots. `activation` is Ws + b.
struct VisibleConditional {
    Eigen::VectorXd activation;
    Eigen::VectorXd mean;
};
VisibleConditional visible_conditional(const Eigen::VectorXd& s, const RbmParams& p);

Eigen::VectorXd sample_hidden(const Eigen::VectorXd& x, const RbmParams& p, std::mt19937_64& rng);
Eigen::VectorXd sample_visible(const Eigen::VectorXd& s, const RbmParams& p, std::mt19937_64& rng);

// One alternating sweep p(s|x) then p(x|s); clamp_slots marks visible slots
// restored to their pre-sweep values afterwards (empty = free chain).
void gibbs_sweep(GibbsState& state, const RbmParams& p, std::mt19937_64& rng,
                 const std::vector<bool>& clamp_slots = {});

// Exact enumeration for categorical-only layouts within the size guard.
struct Enumeration {
    double log_z = 0.0;
    std::vector<Eigen::VectorXd> configs;  // every joint one-hot x
    std::vector<double> prob;              // p(x), same order
};
Enumeration enumerate_exact(const RbmParams& p);

// log p(target block = each level | other blocks of x fixed), via per-level
// free energies. Shared by the generator's closed-form conditional and the
// trainer's likelihood monitor.
Eigen::VectorXd target_log_conditional(const Eigen::VectorXd& x, int block_index,
                                       const RbmParams& p);

}  // namespace mdcrbm
