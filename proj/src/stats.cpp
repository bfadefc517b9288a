#include "mdcrbm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "mdcrbm/errors.hpp"
#include "mdcrbm/text.hpp"

namespace mdcrbm {

namespace {

// Regularized lower incomplete gamma via its power series (x < a+1).
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma via Lentz's continued fraction (x >= a+1).
double gamma_q_cf(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Average ranks of the combined sample; returns (rank sums per group, tie term).
struct Ranked {
    double sum_a = 0.0;
    double sum_b = 0.0;
    double tie_term = 0.0;  // sum of t^3 - t over tie groups
};

Ranked rank_two_groups(const std::vector<double>& a, const std::vector<double>& b) {
    struct Item {
        double value;
        bool from_a;
    };
    std::vector<Item> items;
    items.reserve(a.size() + b.size());
    for (double v : a) items.push_back({v, true});
    for (double v : b) items.push_back({v, false});
    std::sort(items.begin(), items.end(),
              [](const Item& l, const Item& r) { return l.value < r.value; });

    Ranked out;
    std::size_t i = 0;
    while (i < items.size()) {
        std::size_t j = i;
        while (j < items.size() && items[j].value == items[i].value) ++j;
        // ranks i+1 .. j averaged
        double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k)
            (items[k].from_a ? out.sum_a : out.sum_b) += avg;
        double t = static_cast<double>(j - i);
        out.tie_term += t * t * t - t;
        i = j;
    }
    return out;
}

std::vector<long> level_counts(const std::vector<double>& v, int levels,
                               const std::string& who) {
    std::vector<long> counts(levels, 0);
    for (double x : v) {
        double r = std::nearbyint(x);
        if (std::abs(x - r) > 1e-9 || r < 0 || r >= levels)
            throw LevelMismatch(who + " value " + format_double(x) + " outside 0.." +
                                std::to_string(levels - 1));
        counts[static_cast<int>(r)] += 1;
    }
    return counts;
}

int infer_levels(const std::vector<double>& a, const std::vector<double>& b) {
    double hi = 0.0;
    for (double v : a) hi = std::max(hi, v);
    for (double v : b) hi = std::max(hi, v);
    return static_cast<int>(std::nearbyint(hi)) + 1;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
    double pos = q * static_cast<double>(sorted.size() - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= sorted.size()) return sorted.back();
    double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

std::vector<double> level_coded_column(const std::vector<Row>& rows, int idx) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows)
        if (!std::isnan(r[idx])) out.push_back(r[idx]);
    return out;
}

}  // namespace

double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw Error("gamma_q domain: a > 0, x >= 0 required", 3);
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double chi2_sf(double x, double df) {
    return gamma_q(df / 2.0, x / 2.0);
}

std::vector<double> central_moments(const std::vector<double>& sample, int k_max) {
    if (sample.empty()) throw EmptySample();
    if (k_max < 1) throw InvalidConfig("k_max must be >= 1");
    double mean = std::accumulate(sample.begin(), sample.end(), 0.0) /
                  static_cast<double>(sample.size());
    std::vector<double> m(k_max, 0.0);
    for (double v : sample) {
        double d = v - mean;
        double pw = d;
        for (int k = 1; k < k_max; ++k) {
            pw *= d;
            m[k] += pw;
        }
    }
    for (int k = 1; k < k_max; ++k) m[k] /= static_cast<double>(sample.size());
    m[0] = 0.0;
    return m;
}

KwResult kruskal_wallis(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) throw EmptySample();
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double n = na + nb;

    Ranked r = rank_two_groups(a, b);
    double grand = (n + 1.0) / 2.0;
    double da = r.sum_a / na - grand;
    double db = r.sum_b / nb - grand;
    double h = 12.0 / (n * (n + 1.0)) * (na * da * da + nb * db * db);

    double correction = 1.0 - r.tie_term / (n * n * n - n);
    if (correction <= 0.0) return {0.0, 1.0};  // every value tied
    h /= correction;
    return {h, chi2_sf(h, 1.0)};
}

Chi2Result chi_square_two_way(const std::vector<double>& a, const std::vector<double>& b,
                              int levels) {
    if (a.empty() || b.empty()) throw EmptySample();
    if (levels < 0) levels = infer_levels(a, b);
    if (levels < 1) throw LevelMismatch("no levels");
    std::vector<long> ca = level_counts(a, levels, "sample_a");
    std::vector<long> cb = level_counts(b, levels, "sample_b");

    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    Chi2Result out;
    int kept = 0;
    for (int l = 0; l < levels; ++l) {
        if (ca[l] == 0 && cb[l] == 0) continue;  // pooled out
        ++kept;
        double pa = static_cast<double>(ca[l]) / na;
        double pb = static_cast<double>(cb[l]) / nb;
        // Multiply before dividing so equal counts give an exactly zero chi2.
        double expected = static_cast<double>(ca[l]) * nb / na;
        double observed = static_cast<double>(cb[l]);
        if (expected == 0.0)
            throw ZeroExpected("level " + std::to_string(l) + " absent in sample_a");
        double d = observed - expected;
        out.chi2 += d * d / expected;
        double pd = pa - pb;
        out.msd += pd * pd;
    }
    out.msd /= static_cast<double>(kept);
    out.df = kept - 1;
    out.p = out.df > 0 ? chi2_sf(out.chi2, static_cast<double>(out.df)) : 1.0;
    return out;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw LengthMismatch(y.size(), x.size());
    if (x.size() < 2) throw EmptySample();
    const double n = static_cast<double>(x.size());
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw ConstantColumn("pearson input");
    return sxy / std::sqrt(sxx * syy);
}

PairCorrReport pair_correlations(const std::vector<Row>& original,
                                 const std::vector<Row>& generated, const Schema& schema,
                                 const std::vector<std::pair<std::string, std::string>>& pairs) {
    PairCorrReport rep;
    for (const auto& [na, nb] : pairs) {
        int ia = schema.index_of(na);
        int ib = schema.index_of(nb);
        PairCorr pc;
        pc.var_a = na;
        pc.var_b = nb;
        pc.r_orig = pearson(level_coded_column(original, ia), level_coded_column(original, ib));
        pc.r_gen = pearson(level_coded_column(generated, ia), level_coded_column(generated, ib));
        rep.pairs.push_back(pc);
    }
    if (!rep.pairs.empty()) {
        for (const auto& pc : rep.pairs) {
            rep.mean_diff += pc.r_gen - pc.r_orig;
            rep.mean_abs_diff += std::abs(pc.r_gen - pc.r_orig);
        }
        rep.mean_diff /= static_cast<double>(rep.pairs.size());
        rep.mean_abs_diff /= static_cast<double>(rep.pairs.size());
    }
    return rep;
}

HistFit hist_fit(const std::vector<double>& a, const std::vector<double>& b, int bins_override,
                 int categorical_levels) {
    if (a.empty() || b.empty()) throw EmptySample();
    std::vector<double> counts_a, counts_b;

    if (categorical_levels > 0) {
        auto ca = level_counts(a, categorical_levels, "sample_a");
        auto cb = level_counts(b, categorical_levels, "sample_b");
        counts_a.assign(ca.begin(), ca.end());
        counts_b.assign(cb.begin(), cb.end());
    } else {
        std::vector<double> sa = a;
        std::sort(sa.begin(), sa.end());
        double lo = sa.front(), hi = sa.back();
        int bins;
        if (bins_override > 0) {
            bins = bins_override;
        } else {
            double iqr = quantile_sorted(sa, 0.75) - quantile_sorted(sa, 0.25);
            double width = 2.0 * iqr / std::cbrt(static_cast<double>(sa.size()));
            if (width > 0.0 && hi > lo)
                bins = static_cast<int>(std::ceil((hi - lo) / width));
            else
                bins = static_cast<int>(std::ceil(std::log2(static_cast<double>(sa.size())))) + 1;
            bins = std::clamp(bins, 2, 200);
        }
        if (hi == lo) { lo -= 0.5; hi += 0.5; }
        counts_a.assign(bins, 0.0);
        counts_b.assign(bins, 0.0);
        auto bin_of = [&](double v) {
            int k = static_cast<int>((v - lo) / (hi - lo) * bins);
            return std::clamp(k, 0, bins - 1);  // out-of-range into edge bins
        };
        for (double v : a) counts_a[bin_of(v)] += 1.0;
        for (double v : b) counts_b[bin_of(v)] += 1.0;
    }

    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double k = static_cast<double>(counts_a.size());

    double mean_pa = 0.0;
    for (double c : counts_a) mean_pa += c / na;
    mean_pa /= k;
    double ss_tot = 0.0, ss_res = 0.0, mse = 0.0;
    for (std::size_t l = 0; l < counts_a.size(); ++l) {
        double pa = counts_a[l] / na;
        double pb = counts_b[l] / nb;
        ss_tot += (pa - mean_pa) * (pa - mean_pa);
        ss_res += (pa - pb) * (pa - pb);
        double d = counts_a[l] - counts_b[l] * na / nb;
        mse += d * d;
    }

    HistFit fit;
    fit.bins = static_cast<int>(counts_a.size());
    fit.rmse = std::sqrt(mse / k);
    if (ss_res == 0.0) fit.r2 = 1.0;
    else if (ss_tot == 0.0) fit.r2 = 0.0;  // uniform original, imperfect fit
    else fit.r2 = 1.0 - ss_res / ss_tot;
    return fit;
}

StatsReport validate_tables(const std::vector<Row>& original, const std::vector<Row>& generated,
                            const Schema& schema, int bins_override) {
    StatsReport rep;
    for (std::size_t i = 0; i < schema.size(); ++i) {
        const auto& v = schema.var(i);
        VariableStats vs;
        vs.name = v.name;
        vs.kind = v.kind;
        auto col_o = level_coded_column(original, static_cast<int>(i));
        auto col_g = level_coded_column(generated, static_cast<int>(i));
        vs.moments_orig = central_moments(col_o);
        vs.moments_gen = central_moments(col_g);
        vs.kw = kruskal_wallis(col_o, col_g);
        if (v.kind == VarKind::Categorical) {
            vs.chi2 = chi_square_two_way(col_o, col_g, v.levels);
            vs.hist = hist_fit(col_o, col_g, 0, v.levels);
        } else {
            vs.hist = hist_fit(col_o, col_g, bins_override);
        }
        rep.variables.push_back(std::move(vs));
    }
    std::vector<std::pair<std::string, std::string>> pairs;
    for (std::size_t i = 0; i < schema.size(); ++i)
        for (std::size_t j = i + 1; j < schema.size(); ++j)
            pairs.emplace_back(schema.var(i).name, schema.var(j).name);
    rep.correlations = pair_correlations(original, generated, schema, pairs);
    return rep;
}

std::string render_stats(const StatsReport& report) {
    std::ostringstream os;
    for (const auto& vs : report.variables) {
        os << "[variable " << vs.name << "]\n";
        for (std::size_t k = 0; k < vs.moments_orig.size(); ++k)
            os << "moment_" << k + 1 << " original " << format_double(vs.moments_orig[k])
               << " generated " << format_double(vs.moments_gen[k]) << "\n";
        os << "kruskal_wallis H " << format_double(vs.kw.h) << " p " << format_double(vs.kw.p)
           << "\n";
        if (vs.kind == VarKind::Categorical)
            os << "chi_square " << format_double(vs.chi2.chi2) << " msd "
               << format_double(vs.chi2.msd) << " p " << format_double(vs.chi2.p) << "\n";
        os << "hist_r2 " << format_double(vs.hist.r2) << " rmse " << format_double(vs.hist.rmse)
           << " bins " << vs.hist.bins << "\n\n";
    }
    os << "[correlations]\n";
    for (const auto& pc : report.correlations.pairs)
        os << pc.var_a << " " << pc.var_b << " original " << format_double(pc.r_orig)
           << " generated " << format_double(pc.r_gen) << "\n";
    os << "mean_diff " << format_double(report.correlations.mean_diff) << "\n";
    os << "mean_abs_diff " << format_double(report.correlations.mean_abs_diff) << "\n";
    return os.str();
}

}  // namespace mdcrbm
