#include "policyeval/scoring.hpp"

#include "doctest.h"
#include "policyeval/report.hpp"
#include "policyeval/rng.hpp"
#include "test_util.hpp"

using namespace policyeval;

namespace {

Question mc_question(std::vector<std::string> options, int gold) {
    Question q;
    q.id = "mc-q";
    q.source_policy_id = "p";
    q.region = Region::CN;
    q.tag = {1, "1-1"};
    q.format = Format::MC;
    q.stem = "pick one";
    q.options = std::move(options);
    q.gold_index = gold;
    return q;
}

Question tf_question(bool gold) {
    Question q;
    q.id = "tf-q";
    q.source_policy_id = "p";
    q.region = Region::US;
    q.tag = {2, "2-1"};
    q.format = Format::TF;
    q.stem = "claim";
    q.gold_bool = gold;
    return q;
}

ItemResult obj(bool correct, Format f = Format::MC) {
    ItemResult r;
    r.question_id = "x";
    r.format = f;
    r.correct = correct;
    return r;
}

ItemResult oe(double score) {
    ItemResult r;
    r.question_id = "x";
    r.format = Format::OE;
    r.oe_score = score;
    return r;
}

}  // namespace

TEST_CASE("mc grading by standalone letter") {
    const auto q = mc_question({"wind", "xenon", "yeast", "zinc"}, 2);
    CHECK(grade_objective(q, "C").correct);
    CHECK(grade_objective(q, "c").correct);
    CHECK(grade_objective(q, "(C)").correct);
    CHECK(grade_objective(q, "The answer is C.").correct);
    CHECK_FALSE(grade_objective(q, "B").correct);
    CHECK_FALSE(grade_objective(q, "B").unparseable);

    const auto q2 = mc_question({"wind", "xenon", "yeast", "zinc"}, 1);
    CHECK(grade_objective(q2, "The answer is (B) because of the statute.").correct);
}

TEST_CASE("mc grading skips out-of-range letters and contractions") {
    const auto q = mc_question({"wind", "xenon", "yeast", "zinc"}, 2);
    // E is the fifth letter, outside a 4-option set; the later C should win
    CHECK(grade_objective(q, "E is tempting but C is right").correct);
    // the d in "I'd" must not read as option D
    CHECK(grade_objective(q, "I'd say C").correct);
}

TEST_CASE("mc grading falls back to full-text option match") {
    const auto q = mc_question({"solar tax credit", "wind subsidy", "coal levy"}, 1);
    CHECK(grade_objective(q, "wind subsidy").correct);
    CHECK(grade_objective(q, "  Wind   Subsidy. ").correct);
    CHECK_FALSE(grade_objective(q, "coal levy").correct);
    CHECK_FALSE(grade_objective(q, "coal levy").unparseable);
}

TEST_CASE("mc grading flags unparseable output") {
    const auto q = mc_question({"solar tax credit", "wind subsidy", "coal levy"}, 1);
    const auto g = grade_objective(q, "no idea, sorry");
    CHECK_FALSE(g.correct);
    CHECK(g.unparseable);
}

TEST_CASE("tf grading accepts plain and localized answers") {
    const auto qt = tf_question(true);
    CHECK(grade_objective(qt, "True").correct);
    CHECK(grade_objective(qt, "true.").correct);
    CHECK(grade_objective(qt, "T").correct);
    CHECK(grade_objective(qt, "YES").correct);
    CHECK(grade_objective(qt, "正确").correct);
    CHECK(grade_objective(qt, "该说法正确。").correct);
    CHECK_FALSE(grade_objective(qt, "False").correct);

    const auto qf = tf_question(false);
    CHECK(grade_objective(qf, "The statement is false.").correct);
    CHECK(grade_objective(qf, "错误").correct);
    CHECK(grade_objective(qf, "no").correct);
}

TEST_CASE("tf grading flags unparseable output") {
    const auto g = grade_objective(tf_question(true), "it depends on the reading");
    CHECK_FALSE(g.correct);
    CHECK(g.unparseable);
}

TEST_CASE("grading an open-ended question is refused") {
    Question q;
    q.id = "oe-q";
    q.source_policy_id = "p";
    q.region = Region::CN;
    q.tag = {3, "3-4"};
    q.format = Format::OE;
    q.stem = "essay";
    q.reference = ReferenceAnswer{"ref", {"kp"}};
    CHECK_RAISES(ErrorCode::ValidationError, grade_objective(q, "anything"));
}

TEST_CASE("accuracy is correct over total") {
    CHECK(accuracy({obj(true), obj(true), obj(true), obj(false)}) == doctest::Approx(0.75));
    CHECK(accuracy({obj(true), obj(true)}) == 1.0);
    CHECK(accuracy({obj(false), obj(false)}) == 0.0);
    CHECK_RAISES(ErrorCode::EmptyResultSet, accuracy({}));
    CHECK_RAISES(ErrorCode::ValidationError, accuracy({obj(true), oe(4.0)}));
}

TEST_CASE("score breakdown tallies by format") {
    const auto b = breakdown({obj(true, Format::MC), obj(false, Format::MC),
                              obj(true, Format::TF), oe(4.0)});
    CHECK(b.s_mc == 1);
    CHECK(b.t_mc == 2);
    CHECK(b.s_tf == 1);
    CHECK(b.t_tf == 1);
    CHECK(b.s_oe == doctest::Approx(4.0));
    CHECK(b.t_oe == 1);
    CHECK_RAISES(ErrorCode::ScoreOutOfRange, breakdown({oe(5.5)}));
    CHECK_RAISES(ErrorCode::ScoreOutOfRange, breakdown({oe(-0.5)}));
    auto bad = obj(true);
    bad.oe_score = 3.0;
    CHECK_RAISES(ErrorCode::ValidationError, breakdown({bad}));
}

TEST_CASE("weighted level-3 score") {
    ScoreBreakdown b;
    b.s_mc = 1;
    b.t_mc = 2;
    b.s_tf = 1;
    b.t_tf = 1;
    b.s_oe = 4.0;
    b.t_oe = 1;
    CHECK(level3_score(b) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("level-3 score reduces to accuracy without open-ended items") {
    Rng rng(17);
    for (int iter = 0; iter < 30; ++iter) {
        std::vector<ItemResult> rs;
        const int n = 1 + static_cast<int>(rng.uniform_below(12));
        for (int i = 0; i < n; ++i)
            rs.push_back(obj(rng.uniform01() < 0.5,
                             rng.uniform01() < 0.5 ? Format::MC : Format::TF));
        CHECK(level3_score(breakdown(rs)) == accuracy(rs));
    }
}

TEST_CASE("level-3 score extremes and monotonicity") {
    ScoreBreakdown all_oe;
    all_oe.t_oe = 3;
    all_oe.s_oe = 15.0;
    CHECK(level3_score(all_oe) == 1.0);

    ScoreBreakdown b;
    b.t_mc = 4;
    b.t_tf = 2;
    b.t_oe = 2;
    double last = -1.0;
    for (double s = 0.0; s <= 10.0; s += 0.5) {
        b.s_oe = s;
        const double v = level3_score(b);
        CHECK(v >= last);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        last = v;
    }
}

TEST_CASE("level-3 score validates its counters") {
    ScoreBreakdown b;
    CHECK_RAISES(ErrorCode::EmptyResultSet, level3_score(b));
    b.t_mc = 1;
    b.s_mc = 2;
    CHECK_RAISES(ErrorCode::ValidationError, level3_score(b));
    ScoreBreakdown c;
    c.t_oe = 1;
    c.s_oe = 5.5;
    CHECK_RAISES(ErrorCode::ValidationError, level3_score(c));
}

TEST_CASE("aggregate reproduces a known leaderboard row") {
    const std::vector<CellScore> cells = {
        {1, Region::CN, 0.4601}, {1, Region::US, 0.5269}, {2, Region::CN, 0.5634},
        {2, Region::US, 0.6340}, {3, Region::CN, 0.7024}, {3, Region::US, 0.6813},
    };
    const auto row = aggregate("model-a", cells);
    CHECK(format_fixed(row.overall * 100.0, 2) == "59.47");
    CHECK(format_fixed(row.cn_mean * 100.0, 2) == "57.53");
    CHECK(format_fixed(row.us_mean * 100.0, 2) == "61.41");
}

TEST_CASE("aggregate of constant cells is the constant") {
    std::vector<CellScore> cells;
    for (int level = 1; level <= 3; ++level)
        for (Region r : {Region::CN, Region::US}) cells.push_back({level, r, 0.37});
    const auto row = aggregate("flat", cells);
    CHECK(row.overall == doctest::Approx(0.37).epsilon(1e-15));
    CHECK(row.cn_mean == doctest::Approx(0.37).epsilon(1e-15));
}

TEST_CASE("aggregate demands exactly one cell per level and region") {
    std::vector<CellScore> five = {
        {1, Region::CN, 0.5}, {1, Region::US, 0.5}, {2, Region::CN, 0.5},
        {2, Region::US, 0.5}, {3, Region::CN, 0.5},
    };
    CHECK_RAISES(ErrorCode::MissingCell, aggregate("m", five));
    auto six = five;
    six.push_back({3, Region::CN, 0.6});  // duplicate, still no (3, US)
    CHECK_RAISES(ErrorCode::MissingCell, aggregate("m", six));
    CHECK_RAISES(ErrorCode::ValidationError, aggregate("m", {{4, Region::CN, 0.5}}));
    CHECK_RAISES(ErrorCode::ValidationError, aggregate("m", {{1, Region::CN, 1.5}}));
}

TEST_CASE("leaderboard serializers") {
    const std::vector<CellScore> cells = {
        {1, Region::CN, 0.10}, {1, Region::US, 0.20}, {2, Region::CN, 0.30},
        {2, Region::US, 0.40}, {3, Region::CN, 0.50}, {3, Region::US, 0.60},
    };
    Leaderboard lb;
    lb.rows.push_back(aggregate("alpha, inc", cells));

    const auto j = leaderboard_to_json(lb);
    CHECK(j.at("leaderboard").at("alpha, inc").at("cells").at("2").at("US").get<double>() ==
          doctest::Approx(0.40));
    CHECK(j.at("leaderboard").at("alpha, inc").at("overall").get<double>() ==
          doctest::Approx(0.35));

    const auto csv = leaderboard_to_csv(lb);
    CHECK(csv.find("model,level,region,accuracy_pct\n") == 0);
    CHECK(csv.find("\"alpha, inc\",1,CN,10.00\n") != std::string::npos);
    CHECK(csv.find("\"alpha, inc\",3,US,60.00\n") != std::string::npos);
    // header + 6 cells
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
}
