#pragma once

#include <string>
#include <vector>

#include "mdcrbm/schema.hpp"

namespace mdcrbm {

// Regularized upper incomplete gamma Q(a, x); series for x < a+1, continued
// fraction otherwise. Q(a, 0) = 1 exactly.
double gamma_q(double a, double x);

// Survival function of the chi-square distribution with df degrees of freedom.
double chi2_sf(double x, double df);

// Central moments m_k = mean((x - mean)^k) for k = 1..k_max; m_1 is 0.0 by
// construction.
std::vector<double> central_moments(const std::vector<double>& sample, int k_max = 4);

struct KwResult {
    double h = 0.0;
    double p = 1.0;
};

// Two-group Kruskal-Wallis with average ranks and tie correction; p from the
// chi-square approximation with 1 degree of freedom. All values tied across
// both samples gives (0, 1).
KwResult kruskal_wallis(const std::vector<double>& a, const std::vector<double>& b);

struct Chi2Result {
    double chi2 = 0.0;
    double msd = 0.0;  // mean squared difference of level proportions
    double p = 1.0;
    int df = 0;
};

// Goodness of fit of sample_b's level histogram against expectations from
// sample_a's proportions scaled to sample_b's size. Values are nonnegative
// integer level codes; `levels` < 0 infers the count from the data. Levels
// empty in both samples are pooled out.
Chi2Result chi_square_two_way(const std::vector<double>& a, const std::vector<double>& b,
                              int levels = -1);

double pearson(const std::vector<double>& x, const std::vector<double>& y);

struct PairCorr {
    std::string var_a;
    std::string var_b;
    double r_orig = 0.0;
    double r_gen = 0.0;
};

struct PairCorrReport {
    std::vector<PairCorr> pairs;
    double mean_diff = 0.0;      // mean over pairs of (r_gen - r_orig)
    double mean_abs_diff = 0.0;
};

// Pearson correlations of every requested variable pair in both tables.
// Categorical variables enter level-coded; cyclic variables enter as raw
// values.
PairCorrReport pair_correlations(const std::vector<Row>& original,
                                 const std::vector<Row>& generated, const Schema& schema,
                                 const std::vector<std::pair<std::string, std::string>>& pairs);

struct HistFit {
    double r2 = 0.0;
    double rmse = 0.0;
    int bins = 0;
};

// Bins fixed on sample_a: Freedman-Diaconis (Sturges when IQR is 0) clamped
// to [2, 200] for continuous data, one bin per level for categorical. R^2 on
// normalized heights; RMSE on counts with sample_b rescaled to sample_a's
// size. bins_override > 0 forces the continuous bin count.
HistFit hist_fit(const std::vector<double>& a, const std::vector<double>& b,
                 int bins_override = 0, int categorical_levels = 0);

struct VariableStats {
    std::string name;
    VarKind kind = VarKind::Gaussian;
    std::vector<double> moments_orig;
    std::vector<double> moments_gen;
    KwResult kw;
    Chi2Result chi2;  // categorical only (df 0 otherwise)
    HistFit hist;
};

struct StatsReport {
    std::vector<VariableStats> variables;
    PairCorrReport correlations;  // every variable pair, schema order
};

StatsReport validate_tables(const std::vector<Row>& original, const std::vector<Row>& generated,
                            const Schema& schema, int bins_override = 0);

// Structured text: one block per variable plus the correlation table.
std::string render_stats(const StatsReport& report);

}  // namespace mdcrbm
