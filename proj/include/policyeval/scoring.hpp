#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "policyeval/corpus.hpp"

namespace policyeval {

// ============================================================
// Item-level grading
// ============================================================

struct ItemResult {
    std::string question_id;
    Format format = Format::MC;
    std::optional<bool> correct;     // MC / TF
    std::optional<double> oe_score;  // OE, 0..5
    bool unparseable = false;        // objective output that no rule matched
};

struct ObjectiveGrade {
    bool correct = false;
    bool unparseable = false;
};

/// Grade an MC or TF answer. MC: first standalone option letter within
/// range; if none, normalized whole-output match against an option text.
/// TF: normalized true/false synonyms. Unmatched output grades incorrect
/// with the unparseable flag set, so refusal rates stay recoverable.
ObjectiveGrade grade_objective(const Question& q, const std::string& model_output);

/// correct / total over objective items only.
double accuracy(const std::vector<ItemResult>& results);

// ============================================================
// Level-3 weighted score
// ============================================================

struct ScoreBreakdown {
    long long s_mc = 0;  // correct MC answers
    long long s_tf = 0;  // correct TF answers
    double s_oe = 0.0;   // summed open-ended scores (0..5 each)
    long long t_mc = 0;
    long long t_tf = 0;
    long long t_oe = 0;
};

/// Tally a mixed result list into the six counters.
ScoreBreakdown breakdown(const std::vector<ItemResult>& results);

/// (s_mc + s_tf + s_oe) / (t_mc + t_tf + 5 * t_oe); open-ended items
/// carry 5x the weight of objective ones.
double level3_score(const ScoreBreakdown& b);

// ============================================================
// Leaderboard aggregation
// ============================================================

struct CellScore {
    int level = 0;
    Region region = Region::CN;
    double accuracy = 0.0;  // fraction in [0,1]
};

struct LeaderboardRow {
    std::string model;
    std::array<double, 6> cells{};  // (level-1)*2 + (region CN?0:1)
    double cn_mean = 0.0;
    double us_mean = 0.0;
    double overall = 0.0;
};

/// Requires exactly one cell per (level, region); overall is the
/// unweighted mean of the six cells, region means of their three.
LeaderboardRow aggregate(const std::string& model, const std::vector<CellScore>& cells);

struct Leaderboard {
    std::vector<LeaderboardRow> rows;
};

/// Machine report: nested object keyed model -> level -> region, raw fractions.
nlohmann::json leaderboard_to_json(const Leaderboard& lb);

/// Flat table: model,level,region,accuracy_pct with two decimals.
std::string leaderboard_to_csv(const Leaderboard& lb);

}  // namespace policyeval
