#include <cmath>
#include <random>

#include "doctest.h"
#include "mdcrbm/elasticity.hpp"
#include "mdcrbm/numeric.hpp"
#include "oracles.hpp"

using namespace mdcrbm;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

Schema mixed_schema() {
    return Schema({{"mode", VarKind::Categorical, 3, 0.0, true},
                   {"income", VarKind::Gaussian, 0, 0.0, true},
                   {"dist", VarKind::Positive, 0, 0.0, true},
                   {"hour", VarKind::Cyclic, 0, 24.0, true}});
}

Model make_model(const Schema& schema, std::vector<double> mean, std::vector<double> sd,
                 std::uint64_t seed, double scale) {
    Model m;
    m.schema = schema;
    m.norm.mean = std::move(mean);
    m.norm.sd = std::move(sd);
    m.norm.fitted = true;
    std::mt19937_64 rng(seed);
    m.params = oracle::random_params(schema.layout(), 4, rng, scale);
    return m;
}

// p(target level | x) with the target block of the encoded vector replaced
// level by level; the jacobian under test differentiates exactly this map.
VectorXd probs_at(const VectorXd& x, int tgt, const RbmParams& p) {
    return target_log_conditional(x, tgt, p).array().exp();
}

}  // namespace

TEST_CASE("choice jacobian matches finite differences of the conditional") {
    Schema schema = mixed_schema();
    Model m = make_model(schema, {0, 4, 0, 0}, {1, 2, 3, 1}, 23, 0.6);

    Row raw{1.0, 5.5, 2.4, 13.0};
    ChoiceJacobian jac = choice_jacobian(raw, "mode", m);
    REQUIRE(jac.slots == std::vector<int>{3, 4, 5, 6});
    REQUIRE(jac.d.rows() == 3);
    REQUIRE(jac.d.cols() == 4);
    CHECK(std::abs(jac.prob.sum() - 1.0) < 1e-12);

    // probability mass is conserved: every column of dp sums to zero
    CHECK(jac.d.colwise().sum().cwiseAbs().maxCoeff() < 1e-12);

    Row probe = raw;
    probe[0] = 0.0;
    VectorXd x0 = encode_row(probe, schema, m.norm);
    const double h = 1e-5;
    double scale = std::max(jac.d.cwiseAbs().maxCoeff(), 1e-8);
    for (std::size_t col = 0; col < jac.slots.size(); ++col) {
        VectorXd xp = x0, xm = x0;
        xp[jac.slots[col]] += h;
        xm[jac.slots[col]] -= h;
        VectorXd fd = (probs_at(xp, 0, m.params) - probs_at(xm, 0, m.params)) / (2 * h);
        for (int l = 0; l < 3; ++l)
            CHECK(std::abs(jac.d(l, static_cast<Eigen::Index>(col)) - fd[l]) / scale < 1e-6);
    }
}

TEST_CASE("single-hidden-unit jacobian agrees with the closed form") {
    // Two levels, one gaussian slot, J=1: p0 = sigma(du) with
    // du = (b0-b1) + softplus(a0) - softplus(a1), a_l = w_l + w_g g + c, so
    // dp0/dg = p0 p1 w_g (sigma(a0) - sigma(a1)).
    Schema schema({{"m", VarKind::Categorical, 2, 0.0, true},
                   {"g", VarKind::Gaussian, 0, 0.0, true}});
    Model m;
    m.schema = schema;
    m.norm.mean = {0.0, 0.0};
    m.norm.sd = {1.0, 1.0};
    m.norm.fitted = true;
    m.params.layout = schema.layout();
    m.params.W = MatrixXd::Zero(3, 1);
    m.params.W << 0.7, -0.3, 1.1;
    m.params.b = VectorXd::Zero(3);
    m.params.b << 0.2, -0.1, 0.5;
    m.params.c = VectorXd::Zero(1);
    m.params.c << -0.4;

    double g = 0.9;
    ChoiceJacobian jac = choice_jacobian({0.0, g}, "m", m);
    double a0 = 0.7 + 1.1 * g - 0.4;
    double a1 = -0.3 + 1.1 * g - 0.4;
    double du = (0.2 - -0.1) + softplus(a0) - softplus(a1);
    double p0 = sigmoid(du);
    double want = p0 * (1 - p0) * 1.1 * (sigmoid(a0) - sigmoid(a1));
    CHECK(jac.prob[0] == doctest::Approx(p0).epsilon(1e-12));
    CHECK(jac.d(0, 0) == doctest::Approx(want).epsilon(1e-10));
    CHECK(jac.d(1, 0) == doctest::Approx(-want).epsilon(1e-10));
}

TEST_CASE("elasticity is invariant under a rescaling of raw units") {
    Schema schema = mixed_schema();
    Model a = make_model(schema, {0, 4, 0, 0}, {1, 2, 3, 1}, 29, 0.6);
    Model b = a;
    b.norm.mean = {0, 40, 0, 0};
    b.norm.sd = {1, 20, 30, 1};

    Row row_a{1.0, 5.5, 2.4, 13.0};
    Row row_b{1.0, 55.0, 24.0, 13.0};

    for (const char* var : {"income", "dist"}) {
        VectorXd ea = elasticity(row_a, "mode", var, a);
        VectorXd eb = elasticity(row_b, "mode", var, b);
        REQUIRE(ea.size() == 3);
        double scale = std::max(1.0, ea.cwiseAbs().maxCoeff());
        CHECK((ea - eb).cwiseAbs().maxCoeff() / scale < 1e-8);
    }
}

TEST_CASE("elasticity vanishes when couplings vanish") {
    Schema schema = mixed_schema();
    Model m = make_model(schema, {0, 4, 0, 0}, {1, 2, 3, 1}, 1, 0.0);
    m.params.b.segment(0, 3) << 0.3, -0.2, 0.1;

    VectorXd e = elasticity({0.0, 5.5, 2.4, 13.0}, "mode", "income", m);
    CHECK(e.cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("elasticity rejects non-continuous variables and dead levels") {
    Schema schema = mixed_schema();
    Model m = make_model(schema, {0, 4, 0, 0}, {1, 2, 3, 1}, 37, 0.5);
    Row row{1.0, 5.5, 2.4, 13.0};

    CHECK_THROWS_AS(elasticity(row, "mode", "mode", m), NonContinuousVariable);
    CHECK_THROWS_AS(elasticity(row, "mode", "hour", m), NonContinuousVariable);
    CHECK_THROWS_AS(elasticity(row, "income", "dist", m), TargetNotCategorical);

    Model dead = make_model(schema, {0, 4, 0, 0}, {1, 2, 3, 1}, 1, 0.0);
    dead.params.b.segment(0, 3) << 0.0, -40.0, 0.0;
    CHECK_THROWS_AS(elasticity(row, "mode", "income", dead), ZeroProbability);
}

TEST_CASE("elasticity density excludes dead rows and pools the rest") {
    // One hidden unit couples income to the choice; large income drives the
    // second level's probability under the floor.
    Schema schema({{"m", VarKind::Categorical, 2, 0.0, true},
                   {"income", VarKind::Gaussian, 0, 0.0, true}});
    Model m;
    m.schema = schema;
    m.norm.mean = {0.0, 0.0};
    m.norm.sd = {1.0, 1.0};
    m.norm.fitted = true;
    m.params.layout = schema.layout();
    m.params.W = MatrixXd::Zero(3, 1);
    m.params.W << 0.0, -60.0, 50.0;
    m.params.b = VectorXd::Zero(3);
    m.params.c = VectorXd::Zero(1);

    std::vector<Row> rows{{0.0, 0.0}, {1.0, 0.1}, {0.0, 2.0}};
    ElasticityReport rep = elasticity_density(rows, "m", "income", m, 6);
    CHECK(rep.excluded == 1);
    REQUIRE(rep.per_observation.size() == 2);
    REQUIRE(rep.mean.size() == 2);
    CHECK(rep.mean[0] ==
          doctest::Approx(0.5 * (rep.per_observation[0][0] + rep.per_observation[1][0]))
              .epsilon(1e-12));
    CHECK(rep.sd[0] >= 0.0);
    CHECK(rep.bin_edges.size() == rep.counts.size() + 1);
    long total = 0;
    for (long c : rep.counts) total += c;
    CHECK(total == 4);  // two kept rows, two levels each

    std::vector<Row> all_dead{{0.0, 2.0}, {1.0, 3.0}};
    CHECK_THROWS_AS(elasticity_density(all_dead, "m", "income", m, 6), ZeroProbability);
    CHECK_THROWS_AS(elasticity_density({}, "m", "income", m, 6), EmptySample);
    CHECK_THROWS_AS(elasticity_density(rows, "m", "income", m, 0), InvalidConfig);
}
