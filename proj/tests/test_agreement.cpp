#include "policyeval/agreement.hpp"

#include <cmath>
#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "policyeval/report.hpp"
#include "policyeval/rng.hpp"
#include "test_util.hpp"

using namespace policyeval;
using json = nlohmann::json;

namespace {

PairedSeries series(std::vector<double> x, std::vector<double> y) {
    PairedSeries s;
    s.x = std::move(x);
    s.y = std::move(y);
    return s;
}

RatingsTable table(std::vector<std::vector<const char*>> rows) {
    RatingsTable t;
    for (const auto& row : rows) {
        std::vector<std::optional<std::string>> unit;
        for (const char* cell : row) {
            if (cell) unit.emplace_back(std::string(cell));
            else unit.emplace_back(std::nullopt);
        }
        t.cells.push_back(std::move(unit));
    }
    return t;
}

}  // namespace

TEST_CASE("binarize boundary at the threshold") {
    CHECK(binarize(4.0) == Verdict::Accept);
    CHECK(binarize(3.5) == Verdict::Reject);
    CHECK(binarize(5.0) == Verdict::Accept);
    CHECK(binarize(0.0) == Verdict::Reject);
    CHECK(binarize(2.0, 2.0) == Verdict::Accept);
    CHECK(binarize(1.9, 2.0) == Verdict::Reject);
    CHECK_RAISES(ErrorCode::ValidationError, binarize(std::nan("")));
}

TEST_CASE("cohen kappa on a hand-tallied 2x2 table") {
    ConfusionMatrix m;
    m.categories = {"Accept", "Reject"};
    m.counts = {{20, 5}, {10, 15}};
    const auto r = cohen_kappa(m);
    CHECK(r.value == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(r.n == 50);
}

TEST_CASE("cohen kappa is exactly 1 on diagonal tables") {
    ConfusionMatrix m;
    m.categories = {"a", "b", "c"};
    m.counts = {{7, 0, 0}, {0, 3, 0}, {0, 0, 11}};
    CHECK(cohen_kappa(m).value == 1.0);
}

TEST_CASE("cohen kappa rejects single-category marginals") {
    ConfusionMatrix m;
    m.categories = {"Accept", "Reject"};
    m.counts = {{17, 0}, {0, 0}};
    CHECK_RAISES(ErrorCode::DegenerateMarginals, cohen_kappa(m));
}

TEST_CASE("cohen kappa is symmetric under transposition") {
    Rng rng(11);
    for (int iter = 0; iter < 50; ++iter) {
        const std::size_t k = 2 + rng.uniform_below(3);
        ConfusionMatrix m;
        m.counts.assign(k, std::vector<long long>(k, 0));
        for (auto& row : m.counts)
            for (auto& c : row) c = static_cast<long long>(rng.uniform_below(9));
        for (std::size_t i = 0; i < k; ++i) m.categories.push_back(std::string(1, char('a' + i)));
        if (m.total() == 0) continue;
        double a, b;
        try {
            a = cohen_kappa(m).value;
            b = cohen_kappa(m.transposed()).value;
        } catch (const Error&) {
            continue;  // degenerate draw
        }
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
        CHECK(a >= -1.0 - 1e-12);
        CHECK(a <= 1.0 + 1e-12);
    }
}

TEST_CASE("confusion matrix tallies label pairs") {
    const auto m = ConfusionMatrix::from_pairs({"x", "y", "x", "x"}, {"x", "y", "y", "x"});
    REQUIRE(m.categories == std::vector<std::string>{"x", "y"});
    CHECK(m.counts[0][0] == 2);
    CHECK(m.counts[0][1] == 1);
    CHECK(m.counts[1][0] == 0);
    CHECK(m.counts[1][1] == 1);
    CHECK_RAISES(ErrorCode::LengthMismatch, ConfusionMatrix::from_pairs({"x"}, {"x", "y"}));
    CHECK_RAISES(ErrorCode::EmptyResultSet, ConfusionMatrix::from_pairs({}, {}));
}

TEST_CASE("krippendorff alpha is exactly 1 on perfect agreement") {
    const auto t = table({{"A", "A", "A"}, {"B", "B", nullptr}, {"A", "A", "A"}});
    CHECK(krippendorff_alpha(t).value == 1.0);
    // even when only one category ever appears
    const auto t1 = table({{"A", "A"}, {"A", "A"}});
    CHECK(krippendorff_alpha(t1).value == 1.0);
}

TEST_CASE("krippendorff alpha small-sample worked example") {
    // two raters, four units: agree, agree, disagree, disagree
    const auto t = table({{"A", "A"}, {"B", "B"}, {"A", "B"}, {"B", "A"}});
    const auto r = krippendorff_alpha(t);
    // D_o = 0.5, D_e = 32/56, alpha = 1 - 0.5*56/32 = 0.125
    CHECK(r.value == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(r.n == 8);
    const auto ref = oracle::alpha_pairs(t.cells);
    REQUIRE(ref.has_value());
    CHECK(r.value == doctest::Approx(*ref).epsilon(1e-12));
}

TEST_CASE("krippendorff alpha on a single disagreeing unit is <= 0") {
    const auto t = table({{"A", "B"}});
    CHECK(krippendorff_alpha(t).value <= 0.0);
}

TEST_CASE("krippendorff alpha needs at least one pairable unit") {
    const auto t = table({{"A", nullptr, nullptr}, {nullptr, "B", nullptr}});
    CHECK_RAISES(ErrorCode::NoPairableValues, krippendorff_alpha(t));
}

TEST_CASE("krippendorff alpha ignores units with fewer than two ratings") {
    const auto base = table({{"A", "A"}, {"B", "B"}, {"A", "B"}, {"B", "A"}});
    auto padded = base;
    padded.cells.push_back({std::optional<std::string>("C"), std::nullopt});
    CHECK(krippendorff_alpha(base).value ==
          doctest::Approx(krippendorff_alpha(padded).value).epsilon(1e-12));
}

TEST_CASE("krippendorff alpha matches the pair-enumeration oracle") {
    Rng rng(23);
    const char* labels[] = {"A", "B", "C"};
    int checked = 0;
    for (int iter = 0; iter < 200; ++iter) {
        RatingsTable t;
        const std::size_t units = 1 + rng.uniform_below(5);
        for (std::size_t u = 0; u < units; ++u) {
            std::vector<std::optional<std::string>> row;
            for (std::size_t r = 0; r < 3; ++r) {
                if (rng.uniform01() < 0.3) row.emplace_back(std::nullopt);
                else row.emplace_back(std::string(labels[rng.uniform_below(3)]));
            }
            t.cells.push_back(std::move(row));
        }
        const auto ref = oracle::alpha_pairs(t.cells);
        if (!ref) {
            CHECK_RAISES(ErrorCode::NoPairableValues, krippendorff_alpha(t));
            continue;
        }
        const auto got = krippendorff_alpha(t);
        CHECK(got.value == doctest::Approx(*ref).epsilon(1e-10));
        ++checked;
    }
    CHECK(checked > 100);
}

TEST_CASE("pearson on two four-model leaderboard columns") {
    const std::vector<double> ours = {59.10, 59.47, 64.13, 63.82};
    const auto r1 = pearson(series({81.9, 80.3, 80.3, 77.9}, ours));
    CHECK(r1.value == doctest::Approx(-0.69).epsilon(0.015));
    const auto r2 = pearson(series({80.1, 79.8, 78.1, 81.7}, ours));
    CHECK(std::fabs(r2.value - (-0.07)) < 0.01);
}

TEST_CASE("pearson is 1 on positive affine relations") {
    const std::vector<double> x = {1, 2, 3, 4, 5};
    std::vector<double> y;
    for (double v : x) y.push_back(2 * v + 1);
    CHECK(pearson(series(x, y)).value == doctest::Approx(1.0).epsilon(1e-12));
    for (auto& v : y) v = -v;
    CHECK(pearson(series(x, y)).value == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("pearson rejects constant series") {
    CHECK_RAISES(ErrorCode::DegenerateVariance, pearson(series({1, 1, 1}, {1, 2, 3})));
    CHECK_RAISES(ErrorCode::DegenerateVariance, pearson(series({1, 2, 3}, {5, 5, 5})));
}

TEST_CASE("pearson invariant under positive affine transforms") {
    Rng rng(7);
    for (int iter = 0; iter < 20; ++iter) {
        std::vector<double> x, y;
        for (int i = 0; i < 8; ++i) {
            x.push_back(rng.normal());
            y.push_back(rng.normal());
        }
        const double base = pearson(series(x, y)).value;
        std::vector<double> xt;
        for (double v : x) xt.push_back(3.5 * v + 11.0);
        CHECK(pearson(series(xt, y)).value == doctest::Approx(base).epsilon(1e-9));
    }
}

TEST_CASE("spearman uses average ranks for tied values") {
    const std::vector<double> base = {89, 82, 83, 66, 75, 84, 60};
    const std::vector<double> tied = {88, 88, 85, 74, 82, 49, 81};
    const auto r = spearman(series(base, tied));
    CHECK(r.value == doctest::Approx(0.342).epsilon(0.015));
    // the no-tie shortcut lands at ~0.348 on this data; make sure we differ
    CHECK(std::fabs(r.value - oracle::spearman_shortcut(base, tied)) > 0.004);
}

TEST_CASE("spearman on an untied column pair") {
    const auto r = spearman(series({89, 82, 83, 66, 75, 84, 60}, {88, 85, 87, 67, 78, 85, 75}));
    CHECK(std::fabs(r.value - 0.901) < 0.005);
}

TEST_CASE("spearman invariant under strictly increasing transforms") {
    Rng rng(99);
    for (int iter = 0; iter < 20; ++iter) {
        std::vector<double> x, y;
        for (int i = 0; i < 9; ++i) {
            x.push_back(rng.normal());
            y.push_back(rng.normal());
        }
        const double base = spearman(series(x, y)).value;
        std::vector<double> xt;
        for (double v : x) xt.push_back(std::exp(v));
        CHECK(spearman(series(xt, y)).value == doctest::Approx(base).epsilon(1e-12));
        std::vector<double> xc;
        for (double v : x) xc.push_back(v * v * v);
        CHECK(spearman(series(xc, y)).value == doctest::Approx(base).epsilon(1e-12));
    }
    const std::vector<double> x = {3, 1, 4, 1.5, 9, 2.6};
    std::vector<double> fx;
    for (double v : x) fx.push_back(std::exp(v));
    CHECK(spearman(series(x, fx)).value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("spearman and kendall match brute-force oracles on random vectors") {
    Rng rng(41);
    for (int iter = 0; iter < 200; ++iter) {
        const std::size_t n = 3 + rng.uniform_below(8);
        std::vector<double> x, y;
        for (std::size_t i = 0; i < n; ++i) {
            // mix continuous draws and a coarse grid so ties appear often
            x.push_back(iter % 2 ? rng.normal() : 0.5 * rng.uniform_below(4));
            y.push_back(iter % 3 ? rng.normal() : 0.5 * rng.uniform_below(4));
        }
        const auto s = series(x, y);
        double rho_ref, tau_ref;
        try {
            rho_ref = oracle::rank_pearson(x, y);
            tau_ref = oracle::kendall_pairs(x, y);
        } catch (...) {
            continue;
        }
        if (!std::isfinite(rho_ref) || !std::isfinite(tau_ref)) {
            CHECK_THROWS_AS(spearman(s), Error);
            continue;
        }
        CHECK(spearman(s).value == doctest::Approx(rho_ref).epsilon(1e-9));
        CHECK(kendall_tau_b(s).value == doctest::Approx(tau_ref).epsilon(1e-9));
        // without ties the classic shortcut agrees too
        bool has_tie = false;
        for (std::size_t i = 0; i < n && !has_tie; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (x[i] == x[j] || y[i] == y[j]) {
                    has_tie = true;
                    break;
                }
        if (!has_tie)
            CHECK(spearman(s).value ==
                  doctest::Approx(oracle::spearman_shortcut(x, y)).epsilon(1e-9));
    }
}

TEST_CASE("spearman requires variation") {
    CHECK_RAISES(ErrorCode::DegenerateVariance, spearman(series({2, 2, 2}, {1, 2, 3})));
}

TEST_CASE("kendall tau-b on a column pair with one tie") {
    const auto r = kendall_tau_b(
        series({89, 82, 83, 66, 75, 84, 60}, {88, 88, 85, 74, 82, 49, 81}));
    CHECK(std::fabs(r.value - 0.293) < 0.005);
}

TEST_CASE("kendall tau extremes") {
    const std::vector<double> x = {1, 2, 3, 4, 5, 6};
    CHECK(kendall_tau_b(series(x, x)).value == doctest::Approx(1.0).epsilon(1e-12));
    const std::vector<double> rev = {6, 5, 4, 3, 2, 1};
    CHECK(kendall_tau_b(series(x, rev)).value == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK_RAISES(ErrorCode::DegenerateVariance, kendall_tau_b(series({3, 3, 3}, {1, 2, 3})));
}

TEST_CASE("mae basics") {
    CHECK(mae(series({1, 2, 3}, {1, 2, 3})).value == 0.0);
    CHECK(mae(series({1, 2}, {3, 5})).value == doctest::Approx(2.5));
    CHECK_RAISES(ErrorCode::EmptyResultSet, mae(series({}, {})));
    CHECK_RAISES(ErrorCode::LengthMismatch, mae(series({1}, {1, 2})));
}

TEST_CASE("sample std uses the n-1 denominator") {
    CHECK(format_fixed(sample_std({4.00, 4.50, 4.00}), 2) == "0.29");
    CHECK(sample_std({4.00, 4.50, 4.00}) == doctest::Approx(std::sqrt(1.0 / 12.0)).epsilon(1e-12));
    CHECK(sample_std({2, 2, 2, 2}) == 0.0);
    CHECK_RAISES(ErrorCode::EmptyResultSet, sample_std({1.0}));
    CHECK_RAISES(ErrorCode::EmptyResultSet, sample_std({}));
}

TEST_CASE("average ranks handle tie blocks") {
    CHECK(average_ranks({10, 20, 30}) == std::vector<double>{1, 2, 3});
    CHECK(average_ranks({20, 10, 20}) == std::vector<double>{2.5, 1, 2.5});
    CHECK(average_ranks({5, 5, 5, 5}) == std::vector<double>{2.5, 2.5, 2.5, 2.5});
    Rng rng(3);
    for (int iter = 0; iter < 50; ++iter) {
        std::vector<double> v;
        const std::size_t n = 1 + rng.uniform_below(10);
        for (std::size_t i = 0; i < n; ++i) v.push_back(0.5 * rng.uniform_below(5));
        CHECK(average_ranks(v) == oracle::counting_ranks(v));
    }
}

TEST_CASE("frozen reference fixtures agree") {
    std::ifstream in(std::string(TEST_DATA_DIR) + "/agreement_cases.json");
    REQUIRE(in.good());
    const json doc = json::parse(in);
    for (const auto& c : doc.at("paired")) {
        const auto s = series(c.at("x").get<std::vector<double>>(),
                              c.at("y").get<std::vector<double>>());
        CHECK(pearson(s).value == doctest::Approx(c.at("pearson").get<double>()).epsilon(1e-9));
        CHECK(spearman(s).value == doctest::Approx(c.at("spearman").get<double>()).epsilon(1e-9));
        CHECK(kendall_tau_b(s).value ==
              doctest::Approx(c.at("kendall_b").get<double>()).epsilon(1e-9));
        CHECK(mae(s).value == doctest::Approx(c.at("mae").get<double>()).epsilon(1e-9));
    }
    for (const auto& c : doc.at("std")) {
        CHECK(sample_std(c.at("xs").get<std::vector<double>>()) ==
              doctest::Approx(c.at("std").get<double>()).epsilon(1e-9));
    }
}

TEST_CASE("length mismatch is reported for every paired statistic") {
    const auto bad = series({1, 2, 3}, {1, 2});
    CHECK_RAISES(ErrorCode::LengthMismatch, pearson(bad));
    CHECK_RAISES(ErrorCode::LengthMismatch, spearman(bad));
    CHECK_RAISES(ErrorCode::LengthMismatch, kendall_tau_b(bad));
}
