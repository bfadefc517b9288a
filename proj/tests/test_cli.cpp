#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "mdcrbm/commands.hpp"

namespace fs = std::filesystem;

namespace {

int cli(std::initializer_list<std::string> args) {
    std::vector<std::string> store(args);
    std::vector<const char*> argv;
    argv.reserve(store.size());
    for (const auto& s : store) argv.push_back(s.c_str());
    return mdcrbm::run_cli(static_cast<int>(argv.size()), argv.data());
}

struct Scratch {
    fs::path dir;
    explicit Scratch(const std::string& name) : dir(fs::path("cli_scratch") / name) {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Scratch() {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }
    std::string operator()(const std::string& name) const { return (dir / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

void spit(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    f << content;
}

long line_count(const std::string& text) {
    long n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

}  // namespace

TEST_CASE("usage errors exit with code 1") {
    CHECK(cli({"mdcrbm"}) == 1);
    CHECK(cli({"mdcrbm", "no-such-command"}) == 1);
    CHECK(cli({"mdcrbm", "generate"}) == 1);  // required flags missing
    CHECK(cli({"mdcrbm", "train", "--bogus", "x"}) == 1);
    CHECK(cli({"mdcrbm", "--help"}) == 0);
}

TEST_CASE("missing inputs exit with code 2") {
    Scratch s("missing");
    CHECK(cli({"mdcrbm", "train", "--schema", s("none.schema"), "--data", s("none.csv"),
               "--model", s("m.bin")}) == 2);
    CHECK(cli({"mdcrbm", "generate", "--model", s("none.bin"), "--out", s("g.csv")}) == 2);
    CHECK(cli({"mdcrbm", "validate", "--schema", s("none.schema"), s("a.csv"), s("b.csv")}) == 2);
    CHECK(cli({"mdcrbm", "synth-oracle", "--recipe", "nope", "--out", s("x.csv")}) == 2);
}

TEST_CASE("synth-oracle writes deterministic files") {
    Scratch s("synth");
    CHECK(cli({"mdcrbm", "synth-oracle", "--recipe", "trips", "--rows", "50", "--seed", "9",
               "--out", s("a.csv")}) == 0);
    CHECK(fs::exists(s("a.csv")));
    CHECK(fs::exists(s("a.csv.schema")));
    CHECK(fs::exists(s("a.csv.truth")));

    CHECK(cli({"mdcrbm", "synth-oracle", "--recipe", "trips", "--rows", "50", "--seed", "9",
               "--out", s("b.csv")}) == 0);
    CHECK(slurp(s("a.csv")) == slurp(s("b.csv")));

    CHECK(cli({"mdcrbm", "synth-oracle", "--rows", "0", "--out", s("empty.csv")}) == 0);
    std::string header_only = slurp(s("empty.csv"));
    CHECK(line_count(header_only) == 1);
    CHECK(header_only == "mode,purpose,distance,time\n");

    std::string schema_text = slurp(s("a.csv.schema"));
    CHECK(schema_text.find("name = mode") != std::string::npos);
    CHECK(schema_text.find("kind = positive") != std::string::npos);
    CHECK(schema_text.find("period = 24") != std::string::npos);
}

TEST_CASE("train, generate, validate, impute, elasticity round-trip") {
    Scratch s("roundtrip");
    REQUIRE(cli({"mdcrbm", "synth-oracle", "--rows", "400", "--seed", "5", "--out",
                 s("data.csv")}) == 0);

    auto train_to = [&](const std::string& model) {
        return cli({"mdcrbm", "train", "--schema", s("data.csv.schema"), "--data", s("data.csv"),
                    "--model", s(model), "--hidden", "4", "--epochs", "3", "--batch", "64",
                    "--lr", "0.05", "--cd-steps", "1", "--seed", "11"});
    };
    REQUIRE(train_to("model.bin") == 0);
    CHECK(fs::exists(s("model.bin")));
    std::string metrics = slurp(s("model.bin.metrics"));
    CHECK(line_count(metrics) == 4);  // header plus one row per epoch
    CHECK(metrics.rfind("epoch\ttrain_free_energy\tval_free_energy\ttrain_cll\tval_cll\tlr\n",
                        0) == 0);

    REQUIRE(train_to("model2.bin") == 0);
    CHECK(slurp(s("model.bin")) == slurp(s("model2.bin")));

    REQUIRE(cli({"mdcrbm", "generate", "--model", s("model.bin"), "--out", s("gen.csv"),
                 "--rows", "120", "--burn-in", "20", "--thin", "2", "--seed", "3"}) == 0);
    std::string gen = slurp(s("gen.csv"));
    CHECK(line_count(gen) == 121);

    REQUIRE(cli({"mdcrbm", "validate", "--schema", s("data.csv.schema"), s("data.csv"),
                 s("gen.csv"), "--out", s("report.txt")}) == 0);
    std::string report = slurp(s("report.txt"));
    CHECK(report.find("[variable mode]") != std::string::npos);
    CHECK(report.find("[variable distance]") != std::string::npos);
    CHECK(report.find("[correlations]") != std::string::npos);

    // a table validated against itself produces exact reference values
    REQUIRE(cli({"mdcrbm", "validate", "--schema", s("data.csv.schema"), s("data.csv"),
                 s("data.csv"), "--out", s("self.txt")}) == 0);
    std::string self = slurp(s("self.txt"));
    CHECK(self.find("chi_square 0 msd 0 p 1") != std::string::npos);
    CHECK(self.find("kruskal_wallis H 0 p 1") != std::string::npos);
    CHECK(self.find("hist_r2 1 rmse 0") != std::string::npos);

    REQUIRE(cli({"mdcrbm", "impute", "--model", s("model.bin"), "--mask",
                 "mode=?,purpose=0,distance=4.2,time=8.5", "--out", s("imp.csv"), "--sweeps",
                 "10", "--seed", "2"}) == 0);
    std::string imp = slurp(s("imp.csv"));
    CHECK(line_count(imp) == 2);
    std::istringstream is(imp);
    std::string header, row;
    std::getline(is, header);
    std::getline(is, row);
    CHECK(header == "mode,purpose,distance,time");
    CHECK(row.substr(row.find(',')) == ",0,4.2,8.5");  // clamped cells round-trip

    CHECK(cli({"mdcrbm", "impute", "--model", s("model.bin"), "--mask",
               "mode=1,purpose=0,distance=4.2,time=8.5", "--out", s("imp2.csv")}) == 2);

    REQUIRE(cli({"mdcrbm", "elasticity", "--model", s("model.bin"), "--data", s("data.csv"),
                 "--target", "mode", "--variable", "distance", "--out", s("ela.txt")}) == 0);
    std::string ela = slurp(s("ela.txt"));
    CHECK(ela.find("[summary]") != std::string::npos);
    CHECK(ela.find("target mode variable distance") != std::string::npos);
    CHECK(ela.find("histogram_counts") != std::string::npos);
}

TEST_CASE("benchmark writes paired likelihood curves") {
    Scratch s("bench");
    REQUIRE(cli({"mdcrbm", "synth-oracle", "--rows", "300", "--seed", "21", "--out",
                 s("data.csv")}) == 0);
    REQUIRE(cli({"mdcrbm", "benchmark", "--schema", s("data.csv.schema"), "--data",
                 s("data.csv"), "--hidden", "4", "--epochs", "2", "--batch", "64", "--lr",
                 "0.05", "--seed", "7", "--out", s("bench.tsv")}) == 0);
    std::string bench = slurp(s("bench.tsv"));
    CHECK(line_count(bench) == 4);  // header, epoch 0, two epochs
    CHECK(bench.rfind("epoch\trbm_train_cll\trbm_val_cll\tnn_train_cll\tnn_val_cll\n", 0) == 0);
    CHECK(bench.find("\n0\t\t\t-") != std::string::npos);  // NN-only row at epoch 0
}

TEST_CASE("diverging training exits with code 3") {
    Scratch s("diverge");
    std::ostringstream schema;
    schema << "[variable]\nname = g1\nkind = gaussian\n\n"
           << "[variable]\nname = g2\nkind = gaussian\n\n"
           << "[variable]\nname = m\nkind = categorical\nlevels = 2\n";
    spit(s("d.schema"), schema.str());
    std::ostringstream csv;
    csv << "g1,g2,m\n";
    for (int i = 0; i < 200; ++i)
        csv << std::sin(0.7 * i) << "," << std::cos(1.3 * i) << "," << i % 2 << "\n";
    spit(s("d.csv"), csv.str());

    CHECK(cli({"mdcrbm", "train", "--schema", s("d.schema"), "--data", s("d.csv"), "--model",
               s("m.bin"), "--hidden", "6", "--epochs", "2", "--batch", "4", "--lr", "0.9",
               "--init-scale", "100", "--seed", "1"}) == 3);
    CHECK(fs::exists(s("m.bin")));  // last finite parameters still saved
}
