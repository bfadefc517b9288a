#include <cmath>
#include <limits>

#include "doctest.h"
#include "mdcrbm/schema.hpp"
#include "mdcrbm/table.hpp"
#include "mdcrbm/text.hpp"

using namespace mdcrbm;

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

Schema trips_like_schema() {
    return Schema({{"mode", VarKind::Categorical, 4, 0.0, true},
                   {"income", VarKind::Gaussian, 0, 0.0, true},
                   {"distance", VarKind::Positive, 0, 0.0, true},
                   {"depart", VarKind::Cyclic, 0, 24.0, true}});
}

NormStats identity_norm(const Schema& s) {
    NormStats n;
    n.mean.assign(s.size(), 0.0);
    n.sd.assign(s.size(), 1.0);
    n.fitted = true;
    return n;
}

}  // namespace

TEST_CASE("layout assigns contiguous slots per kind") {
    Schema s = trips_like_schema();
    CHECK(s.width() == 4 + 1 + 1 + 2);
    CHECK(s.block(0).offset == 0);
    CHECK(s.block(0).width == 4);
    CHECK(s.block(1).offset == 4);
    CHECK(s.block(2).offset == 5);
    CHECK(s.block(3).offset == 6);
    CHECK(s.block(3).width == 2);
}

TEST_CASE("schema validation rejects degenerate specs") {
    CHECK_THROWS_AS(Schema({{"m", VarKind::Categorical, 1, 0.0, true}}), SchemaParseError);
    CHECK_THROWS_AS(Schema({{"t", VarKind::Cyclic, 0, 0.0, true}}), SchemaParseError);
    CHECK_THROWS_AS(Schema({{"a", VarKind::Gaussian, 0, 0.0, true},
                            {"a", VarKind::Gaussian, 0, 0.0, true}}),
                    SchemaParseError);
}

TEST_CASE("fit_norm reproduces sample statistics") {
    Schema s({{"g", VarKind::Gaussian, 0, 0.0, true}});
    NormStats n = fit_norm({{2.0}, {4.0}, {6.0}}, s);
    CHECK(n.mean[0] == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(n.sd[0] == doctest::Approx(2.0).epsilon(1e-15));

    NormStats n2 = fit_norm({{-1.0}, {1.0}}, s);
    CHECK(n2.mean[0] == doctest::Approx(0.0));
    CHECK(n2.sd[0] == doctest::Approx(1.4142135623730951).epsilon(1e-15));
}

TEST_CASE("fit_norm rejects constant columns and skips missing cells") {
    Schema s({{"g", VarKind::Gaussian, 0, 0.0, true}});
    CHECK_THROWS_AS(fit_norm({{0.0}, {0.0}}, s), ConstantColumn);

    NormStats n = fit_norm({{2.0}, {kNan}, {4.0}, {6.0}}, s);
    CHECK(n.mean[0] == doctest::Approx(4.0));
    CHECK(n.sd[0] == doctest::Approx(2.0));
}

TEST_CASE("encode_row produces one-hot, standardized and cyclic slots") {
    Schema s = trips_like_schema();
    NormStats n = identity_norm(s);
    n.mean[1] = 4.0;
    n.sd[1] = 2.0;
    n.sd[2] = 3.0;

    Eigen::VectorXd x = encode_row({2.0, 4.0, 6.0, 6.0}, s, n);
    CHECK(x[0] == 0.0);
    CHECK(x[1] == 0.0);
    CHECK(x[2] == 1.0);
    CHECK(x[3] == 0.0);
    CHECK(x[4] == doctest::Approx(0.0));                   // value at the mean
    CHECK(x[5] == doctest::Approx(2.0));                   // scale-only positive
    CHECK(x[6] == doctest::Approx(1.0).epsilon(1e-15));    // sin at quarter period
    CHECK(x[7] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("encode_row rejects out-of-domain values") {
    Schema s = trips_like_schema();
    NormStats n = identity_norm(s);
    CHECK_THROWS_AS(encode_row({9.0, 0.0, 1.0, 1.0}, s, n), UnknownLevel);
    CHECK_THROWS_AS(encode_row({0.0, 0.0, -1.0, 1.0}, s, n), OutOfDomain);
    CHECK_THROWS_AS(encode_row({0.0, kNan, 1.0, 1.0}, s, n), OutOfDomain);
}

TEST_CASE("decode inverts encode") {
    Schema s = trips_like_schema();
    NormStats n = identity_norm(s);
    n.mean[1] = -3.0;
    n.sd[1] = 0.7;
    n.sd[2] = 12.5;

    Row row{3.0, -2.1, 17.25, 23.5};
    Row back = decode_vector(encode_row(row, s, n), s, n);
    CHECK(back[0] == row[0]);
    CHECK(back[1] == doctest::Approx(row[1]).epsilon(1e-12));
    CHECK(back[2] == doctest::Approx(row[2]).epsilon(1e-12));
    CHECK(back[3] == doctest::Approx(row[3]).epsilon(1e-12));
}

TEST_CASE("decode maps standardized values back through the norm") {
    Schema s({{"g", VarKind::Gaussian, 0, 0.0, true}});
    NormStats n;
    n.mean = {4.0};
    n.sd = {2.0};
    n.fitted = true;
    Eigen::VectorXd x(1);
    x[0] = 1.5;
    CHECK(decode_vector(x, s, n)[0] == doctest::Approx(7.0));
}

TEST_CASE("decode clips negative positive-kind samples to zero") {
    Schema s({{"d", VarKind::Positive, 0, 0.0, true}});
    NormStats n;
    n.mean = {5.0};
    n.sd = {2.0};
    n.fitted = true;
    Eigen::VectorXd x(1);
    x[0] = -0.3;
    CHECK(decode_vector(x, s, n)[0] == 0.0);
}

TEST_CASE("schema text round-trips including fitted norms") {
    Schema s = trips_like_schema();
    std::vector<Row> rows{{0.0, 1.0, 2.0, 3.0}, {1.0, 3.0, 5.0, 9.0}, {2.0, 7.0, 6.0, 15.0}};
    NormStats n = fit_norm(rows, s);

    auto [s2, n2] = parse_schema(render_schema(s, &n));
    REQUIRE(s2.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(s2.var(i).name == s.var(i).name);
        CHECK(s2.var(i).kind == s.var(i).kind);
        CHECK(s2.var(i).levels == s.var(i).levels);
        CHECK(s2.var(i).period == s.var(i).period);
        CHECK(n2.mean[i] == n.mean[i]);  // to_chars text is exact
        CHECK(n2.sd[i] == n.sd[i]);
    }
}

TEST_CASE("parse_schema reports malformed input") {
    CHECK_THROWS_AS(parse_schema("[variable]\nkind = categorical\n"), SchemaParseError);
    CHECK_THROWS_AS(parse_schema("name = stray\n"), SchemaParseError);
    CHECK_THROWS_AS(parse_schema("[variable x]\nkind = hexagonal\n"), SchemaParseError);
}

TEST_CASE("filter_rows applies bounds and completeness") {
    Schema s({{"m", VarKind::Categorical, 2, 0.0, true},
              {"d", VarKind::Positive, 0, 0.0, false}});
    std::vector<Row> rows{{0.0, 1.0}, {1.0, 0.2}, {0.0, kNan}, {1.0, 5.0}};

    FilterRules rules;
    rules.min_value = {{"d", 0.5}};
    auto kept = filter_rows(rows, rules, s);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0][1] == 1.0);
    CHECK(kept[1][1] == 5.0);

    FilterRules complete_only;
    CHECK(filter_rows(rows, complete_only, s).size() == 3);
}

TEST_CASE("csv read/write round-trips missing cells") {
    Schema s({{"a", VarKind::Gaussian, 0, 0.0, true}, {"b", VarKind::Gaussian, 0, 0.0, true}});
    Table t = read_csv_text("b,a\n1.5,2\n,0.25\n");
    auto rows = align_to_schema(t, s);  // reordered into schema order
    REQUIRE(rows.size() == 2);
    CHECK(rows[0][0] == 2.0);
    CHECK(rows[0][1] == 1.5);
    CHECK(std::isnan(rows[1][1]));
    CHECK(rows[1][0] == 0.25);

    CHECK_THROWS_AS(read_csv_text("a,b\n1\n"), DataFormatError);
    CHECK_THROWS_AS(align_to_schema(read_csv_text("a\n1\n"), s), MissingColumn);
}

TEST_CASE("format_double escapes nothing and parse_double round-trips") {
    double v = 0.1 + 0.2;
    CHECK(parse_double(format_double(v)) == v);
    CHECK_THROWS_AS(parse_double("1.5x"), DataFormatError);
    CHECK_THROWS_AS(parse_double(""), DataFormatError);
}
