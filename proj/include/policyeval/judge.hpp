#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "policyeval/corpus.hpp"
#include "policyeval/providers.hpp"
#include "policyeval/rng.hpp"

namespace policyeval {

// ============================================================
// Scores
// ============================================================

struct JudgeScore {
    std::string judge_name;
    double score = 0.0;  // 0..5 in half steps
    std::string raw_text;
    std::string reasoning;
};

struct ParsedScore {
    double score = 0.0;
    std::string reasoning;
};

/// Extract the score from judge output: the first line reading
/// "Score: <number>" (case-insensitive), plus everything after the first
/// "Reasoning:" marker. Raises NoScoreFound / ScoreOutOfRange /
/// ScoreNotHalfStep.
ParsedScore parse_judge_score(const std::string& text);

/// Fill {question}, {reference_answer_with_point_marks} and {user_answer}.
/// The reference renders as its text followed by key points marked
/// "(1) ...", "(2) ...", one per line.
std::string render_judge_prompt(const std::string& tmpl, const Question& q,
                                const std::string& user_answer);

std::string render_reference_with_marks(const ReferenceAnswer& ref);

// ============================================================
// Protocol
// ============================================================

using JudgePool = std::vector<Provider*>;

struct JudgeProtocol {
    double tiebreak_threshold = 1.0;  // strict: |s1-s2| > threshold
    int max_calls = 6;                // global per-question budget
    int retries_per_judge = 2;        // extra attempts before resampling
};

struct JudgementRecord {
    std::string question_id;
    int run_index = 0;
    std::array<JudgeScore, 2> initial;
    std::optional<JudgeScore> tiebreak;
    double final_score = 0.0;
    int calls_used = 0;
};

nlohmann::json judgement_to_json(const JudgementRecord& r);

/// Dual-judge scoring with discrepancy tie-break: sample two distinct
/// judges; when their scores differ by strictly more than the threshold,
/// a third distinct judge is drawn; the final score is the mean of all
/// collected scores. Output a judge cannot parse is retried, then the
/// judge is replaced; every call counts against the budget.
JudgementRecord judge_once(const Question& q, const std::string& answer,
                           const JudgePool& pool, Rng& rng,
                           const std::string& prompt_template,
                           const JudgeProtocol& protocol = {}, int run_index = 0);

// ============================================================
// Studies
// ============================================================

struct StabilityCase {
    std::string question_id;
    std::vector<double> finals;  // one per run
    double mean = 0.0;
    double std_dev = 0.0;  // n-1 denominator
};

struct StabilityReport {
    std::vector<StabilityCase> cases;
    int runs = 0;
};

struct JudgeCase {
    Question question;
    std::string answer;
};

/// Re-judge every case `runs` times with fresh judge draws and report
/// the spread of the final scores.
StabilityReport stability_study(const std::vector<JudgeCase>& cases, const JudgePool& pool,
                                Rng& rng, const std::string& prompt_template, int runs = 3,
                                const JudgeProtocol& protocol = {});

struct AlignmentReport {
    double pearson_r = 0.0;
    double mae = 0.0;
    double agreement_rate = 0.0;  // fraction with |model - human| <= margin
    double margin = 1.0;
    std::size_t n = 0;
};

AlignmentReport alignment_study(const std::vector<double>& model_scores,
                                const std::vector<double>& human_scores, double margin = 1.0);

}  // namespace policyeval
