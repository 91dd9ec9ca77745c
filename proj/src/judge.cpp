#include "policyeval/judge.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <set>

#include "policyeval/agreement.hpp"
#include "policyeval/errors.hpp"
#include "policyeval/text.hpp"

namespace policyeval {

// ============================================================
// Parsing
// ============================================================

namespace {

bool istarts_with(const std::string& line, const char* prefix) {
    std::size_t i = 0;
    for (; prefix[i] != '\0'; ++i) {
        if (i >= line.size()) return false;
        if (std::tolower(static_cast<unsigned char>(line[i])) !=
            std::tolower(static_cast<unsigned char>(prefix[i])))
            return false;
    }
    return true;
}

std::size_t ifind(const std::string& text, const char* needle) {
    const std::size_t n = std::string(needle).size();
    if (n == 0 || text.size() < n) return std::string::npos;
    for (std::size_t i = 0; i + n <= text.size(); ++i) {
        std::size_t j = 0;
        while (j < n && std::tolower(static_cast<unsigned char>(text[i + j])) ==
                            std::tolower(static_cast<unsigned char>(needle[j])))
            ++j;
        if (j == n) return i;
    }
    return std::string::npos;
}

}  // namespace

ParsedScore parse_judge_score(const std::string& text) {
    std::optional<double> score;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        const std::string line = trim(text.substr(start, end - start));
        if (istarts_with(line, "score:")) {
            const char* p = line.c_str() + 6;
            char* parse_end = nullptr;
            const double v = std::strtod(p, &parse_end);
            if (parse_end != p) {
                score = v;
                break;
            }
            // a "Score:" line without a number does not match; keep scanning
        }
        if (end == text.size()) break;
        start = end + 1;
    }
    if (!score) raise(ErrorCode::NoScoreFound, "no \"Score: <number>\" line in judge output");
    if (*score < 0.0 || *score > 5.0)
        raise(ErrorCode::ScoreOutOfRange,
              "judge score " + std::to_string(*score) + " outside [0,5]");
    const double doubled = *score * 2.0;
    if (std::fabs(doubled - std::round(doubled)) > 1e-9)
        raise(ErrorCode::ScoreNotHalfStep,
              "judge score " + std::to_string(*score) + " is not a 0.5 multiple");

    ParsedScore out;
    out.score = *score;
    const std::size_t marker = ifind(text, "reasoning:");
    if (marker != std::string::npos) out.reasoning = trim(text.substr(marker + 10));
    return out;
}

std::string render_reference_with_marks(const ReferenceAnswer& ref) {
    std::string out = ref.text;
    for (std::size_t i = 0; i < ref.key_points.size(); ++i) {
        if (!out.empty()) out += "\n";
        out += "(" + std::to_string(i + 1) + ") " + ref.key_points[i];
    }
    return out;
}

std::string render_judge_prompt(const std::string& tmpl, const Question& q,
                                const std::string& user_answer) {
    if (q.format != Format::OE || !q.reference)
        raise(ErrorCode::ValidationError,
              "question \"" + q.id + "\" is not an open-ended item with a reference");
    std::string out = replace_all(tmpl, "{question}", q.stem);
    out = replace_all(std::move(out), "{reference_answer_with_point_marks}",
                      render_reference_with_marks(*q.reference));
    return replace_all(std::move(out), "{user_answer}", user_answer);
}

// ============================================================
// Protocol
// ============================================================

nlohmann::json judgement_to_json(const JudgementRecord& r) {
    nlohmann::json judges = nlohmann::json::array();
    for (const auto& s : r.initial)
        judges.push_back({{"judge", s.judge_name}, {"score", s.score}});
    nlohmann::json j = {{"question_id", r.question_id},
                        {"run", r.run_index},
                        {"initial", std::move(judges)},
                        {"final", r.final_score},
                        {"calls_used", r.calls_used}};
    if (r.tiebreak)
        j["tiebreak"] = {{"judge", r.tiebreak->judge_name}, {"score", r.tiebreak->score}};
    return j;
}

namespace {

struct JudgeSession {
    const JudgePool& pool;
    Rng& rng;
    const JudgeProtocol& protocol;
    const std::string& prompt;
    const std::string& question_id;
    int run_index;
    int calls = 0;
    std::set<std::size_t> failed;  // judges that burned their retries

    std::size_t resample(const std::set<std::size_t>& busy) {
        std::vector<std::size_t> eligible;
        for (std::size_t i = 0; i < pool.size(); ++i)
            if (!busy.count(i) && !failed.count(i)) eligible.push_back(i);
        if (eligible.empty())
            raise(ErrorCode::PoolTooSmall,
                  "no eligible judge left in a pool of " + std::to_string(pool.size()));
        return eligible[rng.uniform_below(eligible.size())];
    }

    /// Score with one judge, retrying and resampling per protocol; `busy`
    /// holds the judges already seated for this question.
    JudgeScore acquire(std::size_t judge_idx, const std::set<std::size_t>& busy) {
        int attempts_on_current = 0;
        for (;;) {
            if (calls >= protocol.max_calls)
                raise(ErrorCode::JudgingExhausted,
                      "judge call budget of " + std::to_string(protocol.max_calls) +
                          " spent on question \"" + question_id + "\"");
            ++calls;
            ++attempts_on_current;
            Provider* judge = pool[judge_idx];
            try {
                CompletionRequest req;
                req.prompt = prompt;
                req.request_tag = "judge:" + question_id + ":run" +
                                  std::to_string(run_index) + ":" + judge->spec().name;
                const auto completion = judge->complete(req);
                const auto parsed = parse_judge_score(completion.text);
                JudgeScore s;
                s.judge_name = judge->spec().name;
                s.score = parsed.score;
                s.raw_text = completion.text;
                s.reasoning = parsed.reasoning;
                return s;
            } catch (const Error& e) {
                if (e.code() == ErrorCode::JudgingExhausted || e.code() == ErrorCode::PoolTooSmall)
                    throw;
                if (attempts_on_current > protocol.retries_per_judge) {
                    failed.insert(judge_idx);
                    judge_idx = resample(busy);
                    attempts_on_current = 0;
                }
            }
        }
    }
};

}  // namespace

JudgementRecord judge_once(const Question& q, const std::string& answer,
                           const JudgePool& pool, Rng& rng,
                           const std::string& prompt_template,
                           const JudgeProtocol& protocol, int run_index) {
    if (pool.size() < 2)
        raise(ErrorCode::PoolTooSmall,
              "judging needs at least 2 judges, got " + std::to_string(pool.size()));
    for (const auto* p : pool)
        if (p == nullptr) raise(ErrorCode::ValidationError, "null judge in pool");
    const std::string prompt = render_judge_prompt(prompt_template, q, answer);

    JudgeSession session{pool, rng, protocol, prompt, q.id, run_index};

    const auto picks = rng.sample_indices(pool.size(), 2);
    std::set<std::size_t> busy(picks.begin(), picks.end());

    JudgementRecord rec;
    rec.question_id = q.id;
    rec.run_index = run_index;
    rec.initial[0] = session.acquire(picks[0], busy);
    rec.initial[1] = session.acquire(picks[1], busy);

    double total = rec.initial[0].score + rec.initial[1].score;
    double count = 2.0;
    if (std::fabs(rec.initial[0].score - rec.initial[1].score) > protocol.tiebreak_threshold) {
        if (pool.size() < 3)
            raise(ErrorCode::PoolTooSmall,
                  "tiebreak needs a third distinct judge; pool has " +
                      std::to_string(pool.size()));
        const std::size_t third = session.resample(busy);
        busy.insert(third);
        rec.tiebreak = session.acquire(third, busy);
        total += rec.tiebreak->score;
        count += 1.0;
    }
    rec.final_score = total / count;
    rec.calls_used = session.calls;
    return rec;
}

// ============================================================
// Studies
// ============================================================

StabilityReport stability_study(const std::vector<JudgeCase>& cases, const JudgePool& pool,
                                Rng& rng, const std::string& prompt_template, int runs,
                                const JudgeProtocol& protocol) {
    if (runs < 2) raise(ErrorCode::ValidationError, "stability_study needs runs >= 2");
    StabilityReport report;
    report.runs = runs;
    for (const auto& c : cases) {
        StabilityCase sc;
        sc.question_id = c.question.id;
        for (int r = 0; r < runs; ++r) {
            const auto rec =
                judge_once(c.question, c.answer, pool, rng, prompt_template, protocol, r);
            sc.finals.push_back(rec.final_score);
        }
        double sum = 0.0;
        for (double f : sc.finals) sum += f;
        sc.mean = sum / static_cast<double>(sc.finals.size());
        sc.std_dev = sample_std(sc.finals);
        report.cases.push_back(std::move(sc));
    }
    return report;
}

AlignmentReport alignment_study(const std::vector<double>& model_scores,
                                const std::vector<double>& human_scores, double margin) {
    PairedSeries s;
    s.x = model_scores;
    s.y = human_scores;
    AlignmentReport out;
    out.pearson_r = pearson(s).value;  // validates lengths and variance
    out.mae = mae(s).value;
    long long hits = 0;
    for (std::size_t i = 0; i < s.x.size(); ++i)
        if (std::fabs(s.x[i] - s.y[i]) <= margin) ++hits;
    out.agreement_rate = static_cast<double>(hits) / static_cast<double>(s.x.size());
    out.margin = margin;
    out.n = s.x.size();
    return out;
}

}  // namespace policyeval
