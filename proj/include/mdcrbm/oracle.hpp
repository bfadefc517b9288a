#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mdcrbm/schema.hpp"

namespace mdcrbm {

// Built-in ground-truth generator standing in for survey data. The "trips"
// recipe draws: mode (4 levels), purpose (5 levels, conditional on mode),
// distance (lognormal per mode, so long distances suppress walking), and a
// bimodal time of day on a 24 h circle independent of the rest.
struct OracleRecipe {
    std::string name;
    Schema schema;
    // Ground-truth tables, rendered into the sidecar file.
    std::vector<double> mode_marginal;
    std::vector<std::vector<double>> purpose_given_mode;
    std::vector<std::pair<double, double>> distance_ln_params;  // per mode
    std::vector<std::pair<double, double>> time_peaks;          // (center h, sd h), equal weight
};

const OracleRecipe& oracle_recipe(const std::string& name);  // UnknownRecipe

std::vector<Row> oracle_sample(const OracleRecipe& recipe, long n, std::uint64_t seed);

// Human-readable ground-truth tables for downstream checks.
std::string render_oracle_truth(const OracleRecipe& recipe);

}  // namespace mdcrbm
