#include "mdcrbm/commands.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "mdcrbm/elasticity.hpp"
#include "mdcrbm/errors.hpp"
#include "mdcrbm/generator.hpp"
#include "mdcrbm/model_io.hpp"
#include "mdcrbm/nn.hpp"
#include "mdcrbm/oracle.hpp"
#include "mdcrbm/rng.hpp"
#include "mdcrbm/stats.hpp"
#include "mdcrbm/table.hpp"
#include "mdcrbm/text.hpp"
#include "mdcrbm/trainer.hpp"

namespace mdcrbm {

namespace {

void write_text(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path);
    f << content;
    if (!f) throw IoError("write failed: " + path);
}

std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

std::vector<Row> complete_rows(const std::vector<Row>& rows) {
    std::vector<Row> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        bool ok = true;
        for (double v : r)
            if (std::isnan(v)) { ok = false; break; }
        if (ok) out.push_back(r);
    }
    return out;
}

std::vector<Row> load_rows(const std::string& path, const Schema& schema) {
    return align_to_schema(read_csv(path), schema);
}

// "var=value,var=?": value entries clamp, "?" marks unknown.
struct MaskSpec {
    std::vector<std::pair<std::string, std::optional<double>>> entries;
};

MaskSpec parse_mask(const std::string& text) {
    MaskSpec spec;
    std::istringstream is(text);
    std::string item;
    while (std::getline(is, item, ',')) {
        std::string t = trim(item);
        if (t.empty()) continue;
        auto eq = t.find('=');
        if (eq == std::string::npos) throw DataFormatError("mask entry needs '=': " + t);
        std::string name = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (value == "?")
            spec.entries.emplace_back(name, std::nullopt);
        else
            spec.entries.emplace_back(name, parse_double(value));
    }
    if (spec.entries.empty()) throw DataFormatError("empty mask");
    return spec;
}

std::string metrics_table(const TrainReport& report) {
    // Wall-clock excluded: file bytes stay deterministic under a fixed seed.
    std::ostringstream os;
    os << "epoch\ttrain_free_energy\tval_free_energy\ttrain_cll\tval_cll\tlr\n";
    for (std::size_t e = 0; e < report.epochs.size(); ++e) {
        const auto& m = report.epochs[e];
        os << e + 1 << "\t" << format_double(m.train_free_energy) << "\t"
           << format_double(m.val_free_energy) << "\t" << format_double(m.train_cll) << "\t"
           << format_double(m.val_cll) << "\t" << format_double(m.lr) << "\n";
    }
    return os.str();
}

struct TrainFlags {
    std::string schema_path;
    std::string data_path;
    std::string model_path;
    std::string out_path;
    int hidden = 16;
    TrainConfig config;
};

void add_train_flags(CLI::App* cmd, TrainFlags& f, bool with_model) {
    cmd->add_option("--schema", f.schema_path, "schema file")->required()->envname("MDCRBM_SCHEMA");
    cmd->add_option("--data", f.data_path, "training data csv")->required()->envname("MDCRBM_DATA");
    if (with_model)
        cmd->add_option("--model", f.model_path, "model file to write")->required();
    cmd->add_option("--out", f.out_path, "metrics table path");
    cmd->add_option("--hidden", f.hidden, "hidden unit count")->envname("MDCRBM_HIDDEN");
    cmd->add_option("--epochs", f.config.epochs, "training epochs")->envname("MDCRBM_EPOCHS");
    cmd->add_option("--batch", f.config.batch_size, "mini-batch size")->envname("MDCRBM_BATCH");
    cmd->add_option("--lr", f.config.lr0, "initial learning rate")->envname("MDCRBM_LR");
    cmd->add_option("--decay", f.config.decay, "per-batch learning-rate decay")
        ->envname("MDCRBM_DECAY");
    cmd->add_option("--cd-steps", f.config.cd_steps, "Gibbs steps per gradient")
        ->envname("MDCRBM_CD_STEPS");
    cmd->add_option("--seed", f.config.seed, "rng seed")->envname("MDCRBM_SEED");
    cmd->add_option("--target", f.config.monitor_variable,
                    "choice variable for the likelihood monitor");
    cmd->add_option("--val-fraction", f.config.validation_fraction, "validation split fraction");
    cmd->add_option("--init-scale", f.config.init_scale, "stddev of initial weights");
}

int cmd_synth_oracle(const std::string& recipe_name, long rows, std::uint64_t seed,
                     const std::string& out, std::string schema_out) {
    const OracleRecipe& recipe = oracle_recipe(recipe_name);
    if (schema_out.empty()) schema_out = out + ".schema";
    auto data = oracle_sample(recipe, rows, seed);
    write_csv(out, table_from_rows(data, recipe.schema));
    write_text(schema_out, render_schema(recipe.schema));
    write_text(out + ".truth", render_oracle_truth(recipe));
    std::cout << "wrote " << out << " (" << data.size() << " rows), " << schema_out << ", "
              << out << ".truth\n";
    return 0;
}

int cmd_train(const TrainFlags& f) {
    auto [schema, norm0] = parse_schema(read_text(f.schema_path));
    auto rows = complete_rows(load_rows(f.data_path, schema));
    NormStats norm = fit_norm(rows, schema);

    auto [params, report] = train(rows, schema, norm, f.hidden, f.config);
    Model model{schema, norm, std::move(params)};
    save_model(f.model_path, model);
    std::string metrics_path = f.out_path.empty() ? f.model_path + ".metrics" : f.out_path;
    write_text(metrics_path, metrics_table(report));
    if (report.diverged) {
        std::cerr << "training diverged: " << report.divergence_note
                  << " (last finite parameters saved)\n";
        return 3;
    }
    std::cout << "wrote " << f.model_path << " and " << metrics_path << "\n";
    return 0;
}

int cmd_generate(const std::string& model_path, const std::string& out, long rows,
                 int burn_in, int thin, std::uint64_t seed, const std::string& seed_data) {
    Model model = load_model(model_path);
    auto rng = substream(seed, "generate");
    std::optional<Eigen::MatrixXd> seeds;
    if (!seed_data.empty()) {
        auto raw = complete_rows(load_rows(seed_data, model.schema));
        if (!raw.empty()) seeds = encode_table(raw, model.schema, model.norm);
    }
    auto data = synthesize(model, static_cast<int>(rows), burn_in, thin, rng,
                           seeds ? &*seeds : nullptr);
    write_csv(out, table_from_rows(data, model.schema));
    std::cout << "wrote " << out << " (" << data.size() << " rows)\n";
    return 0;
}

int cmd_impute(const std::string& model_path, const std::string& mask_text,
               const std::string& data_path, const std::string& out, int sweeps,
               std::uint64_t seed) {
    Model model = load_model(model_path);
    MaskSpec spec = parse_mask(mask_text);
    auto rng = substream(seed, "impute");

    std::vector<Row> completed;
    if (data_path.empty()) {
        // Literal single-row mask; unmentioned variables stay unknown.
        ConditioningMask mask;
        mask.values.assign(model.schema.size(), std::nullopt);
        for (const auto& [name, value] : spec.entries)
            mask.values[model.schema.index_of(name)] = value;
        completed.push_back(impute(mask, model, sweeps, rng));
    } else {
        auto rows = load_rows(data_path, model.schema);
        for (const auto& row : rows) {
            ConditioningMask mask = ConditioningMask::from_row(row);
            for (const auto& [name, value] : spec.entries)
                mask.values[model.schema.index_of(name)] = value;
            completed.push_back(impute(mask, model, sweeps, rng));
        }
    }
    write_csv(out, table_from_rows(completed, model.schema));
    std::cout << "wrote " << out << " (" << completed.size() << " rows)\n";
    return 0;
}

int cmd_validate(const std::string& schema_path, const std::string& original,
                 const std::string& generated, const std::string& out, int bins) {
    auto [schema, norm] = parse_schema(read_text(schema_path));
    auto rows_o = load_rows(original, schema);
    auto rows_g = load_rows(generated, schema);
    StatsReport report = validate_tables(rows_o, rows_g, schema, bins);
    std::string text = render_stats(report);
    if (out.empty())
        std::cout << text;
    else {
        write_text(out, text);
        std::cout << "wrote " << out << "\n";
    }
    return 0;
}

int cmd_elasticity(const std::string& model_path, const std::string& data_path,
                   const std::string& target, const std::string& variable,
                   const std::string& out, int bins) {
    Model model = load_model(model_path);
    auto rows = complete_rows(load_rows(data_path, model.schema));
    ElasticityReport rep = elasticity_density(rows, target, variable, model, bins);

    std::ostringstream os;
    os << "observation\tlevel\telasticity\n";
    for (std::size_t n = 0; n < rep.per_observation.size(); ++n)
        for (Eigen::Index k = 0; k < rep.per_observation[n].size(); ++k)
            os << n << "\t" << k << "\t" << format_double(rep.per_observation[n][k]) << "\n";
    os << "\n[summary]\n";
    os << "target " << target << " variable " << variable << "\n";
    for (Eigen::Index k = 0; k < rep.mean.size(); ++k)
        os << "level " << k << " mean " << format_double(rep.mean[k]) << " sd "
           << format_double(rep.sd[k]) << "\n";
    os << "excluded " << rep.excluded << "\n";
    os << "histogram_edges";
    for (double e : rep.bin_edges) os << " " << format_double(e);
    os << "\nhistogram_counts";
    for (long c : rep.counts) os << " " << c;
    os << "\n";
    write_text(out, os.str());
    std::cout << "wrote " << out << "\n";
    return 0;
}

int cmd_benchmark(const TrainFlags& f, const std::string& target_flag) {
    auto [schema, norm0] = parse_schema(read_text(f.schema_path));
    auto rows = complete_rows(load_rows(f.data_path, schema));
    NormStats norm = fit_norm(rows, schema);

    TrainConfig config = f.config;
    if (!target_flag.empty()) config.monitor_variable = target_flag;
    auto [params, rbm_report] = train(rows, schema, norm, f.hidden, config);
    if (rbm_report.diverged) {
        std::cerr << "rbm training diverged: " << rbm_report.divergence_note << "\n";
        return 3;
    }
    std::string target = rbm_report.monitor_variable;
    if (target.empty()) throw TargetNotCategorical("(no categorical variable)");
    auto [nn_params, nn_report] = nn_train(rows, schema, norm, f.hidden, target, config);

    // Epoch 0 is the NN's pre-training point; the RBM columns start at 1.
    std::ostringstream os;
    os << "epoch\trbm_train_cll\trbm_val_cll\tnn_train_cll\tnn_val_cll\n";
    os << "0\t\t\t" << format_double(nn_report.curve[0].train_cll) << "\t"
       << format_double(nn_report.curve[0].val_cll) << "\n";
    for (std::size_t e = 0; e < rbm_report.epochs.size(); ++e) {
        os << e + 1 << "\t" << format_double(rbm_report.epochs[e].train_cll) << "\t"
           << format_double(rbm_report.epochs[e].val_cll) << "\t"
           << format_double(nn_report.curve[e + 1].train_cll) << "\t"
           << format_double(nn_report.curve[e + 1].val_cll) << "\n";
    }
    std::string out = f.out_path.empty() ? f.data_path + ".benchmark" : f.out_path;
    write_text(out, os.str());
    std::cout << "wrote " << out << "\n";
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Mixed discrete-continuous RBM: training, generation, validation"};
    app.require_subcommand(1);

    // synth-oracle
    auto* synth = app.add_subcommand("synth-oracle", "Write a ground-truth synthetic dataset");
    std::string recipe = "trips";
    long rows = 1000;
    std::uint64_t seed = 1;
    std::string out_path, schema_out;
    synth->add_option("--recipe", recipe, "built-in recipe name");
    synth->add_option("--rows", rows, "row count");
    synth->add_option("--seed", seed, "rng seed")->envname("MDCRBM_SEED");
    synth->add_option("--out", out_path, "output csv")->required();
    synth->add_option("--schema", schema_out, "schema output path (default <out>.schema)");

    // train
    auto* train_cmd = app.add_subcommand("train", "Fit an RBM to a dataset");
    TrainFlags tf;
    add_train_flags(train_cmd, tf, true);

    // generate
    auto* gen = app.add_subcommand("generate", "Sample synthetic rows from a model");
    std::string gen_model, gen_out, gen_seed_data;
    long gen_rows = 1000;
    int burn_in = 200, thin = 10;
    std::uint64_t gen_seed = 1;
    gen->add_option("--model", gen_model, "model file")->required();
    gen->add_option("--out", gen_out, "output csv")->required();
    gen->add_option("--rows", gen_rows, "row count");
    gen->add_option("--burn-in", burn_in, "sweeps before the first emitted state");
    gen->add_option("--thin", thin, "sweeps between emitted states");
    gen->add_option("--seed", gen_seed, "rng seed")->envname("MDCRBM_SEED");
    gen->add_option("--data", gen_seed_data, "csv providing the chain's start state");

    // impute
    auto* imp = app.add_subcommand("impute", "Clamped-Gibbs completion of unknown variables");
    std::string imp_model, imp_mask, imp_data, imp_out;
    int sweeps = 50;
    std::uint64_t imp_seed = 1;
    imp->add_option("--model", imp_model, "model file")->required();
    imp->add_option("--mask", imp_mask, "var=value,var=? (with --data, overrides its cells)")
        ->required();
    imp->add_option("--data", imp_data, "csv of rows to complete");
    imp->add_option("--out", imp_out, "output csv")->required();
    imp->add_option("--sweeps", sweeps, "Gibbs sweeps per row");
    imp->add_option("--seed", imp_seed, "rng seed")->envname("MDCRBM_SEED");

    // validate
    auto* val = app.add_subcommand("validate", "Statistical battery: original vs generated");
    std::string val_schema, val_orig, val_gen, val_out;
    int val_bins = 0;
    val->add_option("--schema", val_schema, "schema file")->required();
    val->add_option("original", val_orig, "original csv")->required();
    val->add_option("generated", val_gen, "generated csv")->required();
    val->add_option("--out", val_out, "report path (stdout when omitted)");
    val->add_option("--bins", val_bins, "histogram bin override")->envname("MDCRBM_BINS");

    // elasticity
    auto* ela = app.add_subcommand("elasticity", "Choice-probability elasticities over a dataset");
    std::string ela_model, ela_data, ela_target, ela_variable, ela_out;
    int ela_bins = 30;
    ela->add_option("--model", ela_model, "model file")->required();
    ela->add_option("--data", ela_data, "observation csv")->required();
    ela->add_option("--target", ela_target, "categorical choice variable")->required();
    ela->add_option("--variable", ela_variable, "continuous explanatory variable")->required();
    ela->add_option("--out", ela_out, "report path")->required();
    ela->add_option("--bins", ela_bins, "histogram bins")->envname("MDCRBM_BINS");

    // benchmark
    auto* bench = app.add_subcommand("benchmark", "RBM vs NN likelihood curves");
    TrainFlags bf;
    std::string bench_target;
    add_train_flags(bench, bf, false);
    bench->add_option("--nn-target", bench_target,
                      "classifier target (defaults to the monitor variable)");

    try {
        app.parse(argc, const_cast<char**>(argv));
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (synth->parsed()) return cmd_synth_oracle(recipe, rows, seed, out_path, schema_out);
        if (train_cmd->parsed()) return cmd_train(tf);
        if (gen->parsed())
            return cmd_generate(gen_model, gen_out, gen_rows, burn_in, thin, gen_seed,
                                gen_seed_data);
        if (imp->parsed()) return cmd_impute(imp_model, imp_mask, imp_data, imp_out, sweeps,
                                             imp_seed);
        if (val->parsed()) return cmd_validate(val_schema, val_orig, val_gen, val_out, val_bins);
        if (ela->parsed())
            return cmd_elasticity(ela_model, ela_data, ela_target, ela_variable, ela_out,
                                  ela_bins);
        if (bench->parsed()) return cmd_benchmark(bf, bench_target);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

}  // namespace mdcrbm
