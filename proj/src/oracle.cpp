#include "mdcrbm/oracle.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "mdcrbm/errors.hpp"
#include "mdcrbm/rng.hpp"
#include "mdcrbm/text.hpp"

namespace mdcrbm {

namespace {

OracleRecipe make_trips() {
    OracleRecipe r;
    r.name = "trips";
    r.schema = Schema({
        {"mode", VarKind::Categorical, 4, 0.0, true},
        {"purpose", VarKind::Categorical, 5, 0.0, true},
        {"distance", VarKind::Positive, 0, 0.0, true},
        {"time", VarKind::Cyclic, 0, 24.0, true},
    });
    // modes: 0 drive, 1 transit, 2 bike, 3 walk
    r.mode_marginal = {0.45, 0.25, 0.10, 0.20};
    r.purpose_given_mode = {
        {0.40, 0.05, 0.25, 0.15, 0.15},
        {0.50, 0.20, 0.10, 0.12, 0.08},
        {0.25, 0.20, 0.10, 0.35, 0.10},
        {0.10, 0.10, 0.30, 0.30, 0.20},
    };
    r.distance_ln_params = {{3.8, 0.55}, {2.5, 0.4}, {1.3, 0.4}, {0.0, 0.5}};
    r.time_peaks = {{8.0, 1.5}, {17.5, 1.5}};
    return r;
}

int draw_discrete(const std::vector<double>& probs, std::mt19937_64& rng) {
    double u = draw_unit(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
}

}  // namespace

const OracleRecipe& oracle_recipe(const std::string& name) {
    static const OracleRecipe trips = make_trips();
    if (name == "trips") return trips;
    throw UnknownRecipe(name);
}

std::vector<Row> oracle_sample(const OracleRecipe& recipe, long n, std::uint64_t seed) {
    auto rng = substream(seed, "oracle:" + recipe.name);
    std::vector<Row> rows;
    rows.reserve(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        int mode = draw_discrete(recipe.mode_marginal, rng);
        int purpose = draw_discrete(recipe.purpose_given_mode[mode], rng);
        auto [mu, sigma] = recipe.distance_ln_params[mode];
        double distance = std::exp(mu + sigma * draw_gauss(rng));
        auto [center, sd] =
            recipe.time_peaks[draw_unit(rng) < 0.5 ? 0 : 1];
        double time = std::fmod(center + sd * draw_gauss(rng), 24.0);
        if (time < 0.0) time += 24.0;
        rows.push_back({static_cast<double>(mode), static_cast<double>(purpose), distance, time});
    }
    return rows;
}

std::string render_oracle_truth(const OracleRecipe& recipe) {
    std::ostringstream os;
    os << "recipe " << recipe.name << "\n\n";
    os << "mode_marginal";
    for (double p : recipe.mode_marginal) os << " " << format_double(p);
    os << "\n\npurpose_given_mode\n";
    for (std::size_t m = 0; m < recipe.purpose_given_mode.size(); ++m) {
        os << "mode " << m;
        for (double p : recipe.purpose_given_mode[m]) os << " " << format_double(p);
        os << "\n";
    }
    os << "\ndistance_lognormal_per_mode\n";
    for (std::size_t m = 0; m < recipe.distance_ln_params.size(); ++m)
        os << "mode " << m << " ln_mean " << format_double(recipe.distance_ln_params[m].first)
           << " ln_sd " << format_double(recipe.distance_ln_params[m].second) << "\n";
    os << "\ntime_peaks_hours\n";
    for (const auto& [center, sd] : recipe.time_peaks)
        os << "center " << format_double(center) << " sd " << format_double(sd) << "\n";
    return os.str();
}

}  // namespace mdcrbm
