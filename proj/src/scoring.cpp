#include "policyeval/scoring.hpp"

#include <cctype>
#include <cmath>

#include "policyeval/errors.hpp"
#include "policyeval/report.hpp"
#include "policyeval/text.hpp"

namespace policyeval {

namespace {

bool is_word_char(unsigned char c) { return std::isalnum(c) != 0; }

// apostrophes glue contractions ("I'd") so their letters never read as options
bool is_letter_boundary_char(unsigned char c) { return std::isalnum(c) != 0 || c == '\''; }

/// First standalone A..Z (case-insensitive) whose index fits the option
/// count; -1 when absent.
int first_option_letter(const std::string& text, std::size_t n_options) {
    for (std::size_t i = 0; i < text.size(); ++i) {
        const auto c = static_cast<unsigned char>(text[i]);
        if (!std::isalpha(c)) continue;
        const bool prev_word =
            i > 0 && is_letter_boundary_char(static_cast<unsigned char>(text[i - 1]));
        const bool next_word = i + 1 < text.size() &&
                               is_letter_boundary_char(static_cast<unsigned char>(text[i + 1]));
        if (prev_word || next_word) continue;
        const int idx = std::toupper(c) - 'A';
        if (idx >= 0 && static_cast<std::size_t>(idx) < n_options) return idx;
    }
    return -1;
}

const std::vector<std::string>& true_exact() {
    static const std::vector<std::string> v = {"true", "t",  "yes", "correct",
                                               "right", "正确", "对",  "是"};
    return v;
}

const std::vector<std::string>& false_exact() {
    static const std::vector<std::string> v = {"false", "f",  "no", "incorrect",
                                               "wrong", "错误", "错",  "否"};
    return v;
}

/// Position of word (ASCII word-boundary match) in text, npos if absent.
std::size_t find_word(const std::string& text, const std::string& word) {
    std::size_t pos = 0;
    while ((pos = text.find(word, pos)) != std::string::npos) {
        const bool l_ok = pos == 0 || !is_word_char(static_cast<unsigned char>(text[pos - 1]));
        const std::size_t end = pos + word.size();
        const bool r_ok =
            end >= text.size() || !is_word_char(static_cast<unsigned char>(text[end]));
        if (l_ok && r_ok) return pos;
        ++pos;
    }
    return std::string::npos;
}

std::optional<bool> parse_tf(const std::string& normalized) {
    for (const auto& s : true_exact())
        if (normalized == s) return true;
    for (const auto& s : false_exact())
        if (normalized == s) return false;
    // embedded scan, restricted to unambiguous words; earliest hit wins
    struct Probe {
        const char* word;
        bool value;
        bool substring;  // CJK: no ASCII word boundaries
    };
    static const Probe probes[] = {{"true", true, false},
                                   {"false", false, false},
                                   {"正确", true, true},
                                   {"错误", false, true}};
    std::size_t best = std::string::npos;
    bool value = false;
    for (const auto& p : probes) {
        const std::size_t at =
            p.substring ? normalized.find(p.word) : find_word(normalized, p.word);
        if (at < best) {
            best = at;
            value = p.value;
        }
    }
    if (best == std::string::npos) return std::nullopt;
    return value;
}

}  // namespace

ObjectiveGrade grade_objective(const Question& q, const std::string& model_output) {
    if (q.format == Format::OE)
        raise(ErrorCode::ValidationError,
              "question \"" + q.id + "\": open-ended items are judge-scored, not graded");
    ObjectiveGrade g;
    if (q.format == Format::MC) {
        const int letter = first_option_letter(model_output, q.options->size());
        if (letter >= 0) {
            g.correct = letter == *q.gold_index;
            return g;
        }
        const std::string norm = normalize_answer(model_output);
        for (std::size_t i = 0; i < q.options->size(); ++i) {
            if (norm == normalize_answer((*q.options)[i])) {
                g.correct = static_cast<int>(i) == *q.gold_index;
                return g;
            }
        }
        g.unparseable = true;
        return g;
    }
    // TF
    const auto parsed = parse_tf(normalize_answer(model_output));
    if (!parsed) {
        g.unparseable = true;
        return g;
    }
    g.correct = *parsed == *q.gold_bool;
    return g;
}

double accuracy(const std::vector<ItemResult>& results) {
    if (results.empty()) raise(ErrorCode::EmptyResultSet, "accuracy: no results");
    long long correct = 0;
    for (const auto& r : results) {
        if (r.format == Format::OE || !r.correct.has_value())
            raise(ErrorCode::ValidationError,
                  "accuracy: result \"" + r.question_id + "\" is not an objective grade");
        if (*r.correct) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(results.size());
}

ScoreBreakdown breakdown(const std::vector<ItemResult>& results) {
    ScoreBreakdown b;
    for (const auto& r : results) {
        switch (r.format) {
            case Format::MC:
            case Format::TF: {
                if (!r.correct.has_value() || r.oe_score.has_value())
                    raise(ErrorCode::ValidationError,
                          "breakdown: \"" + r.question_id + "\" needs a correct flag only");
                auto& s = r.format == Format::MC ? b.s_mc : b.s_tf;
                auto& t = r.format == Format::MC ? b.t_mc : b.t_tf;
                ++t;
                if (*r.correct) ++s;
                break;
            }
            case Format::OE: {
                if (!r.oe_score.has_value() || r.correct.has_value())
                    raise(ErrorCode::ValidationError,
                          "breakdown: \"" + r.question_id + "\" needs an oe_score only");
                if (!(*r.oe_score >= 0.0) || !(*r.oe_score <= 5.0))
                    raise(ErrorCode::ScoreOutOfRange,
                          "breakdown: \"" + r.question_id + "\" score " +
                              format_fixed(*r.oe_score, 2) + " outside [0,5]");
                ++b.t_oe;
                b.s_oe += *r.oe_score;
                break;
            }
        }
    }
    return b;
}

double level3_score(const ScoreBreakdown& b) {
    if (b.s_mc < 0 || b.s_tf < 0 || b.s_oe < 0 || b.t_mc < 0 || b.t_tf < 0 || b.t_oe < 0)
        raise(ErrorCode::ValidationError, "level3_score: negative counter");
    if (b.s_mc > b.t_mc || b.s_tf > b.t_tf || b.s_oe > 5.0 * static_cast<double>(b.t_oe))
        raise(ErrorCode::ValidationError, "level3_score: score exceeds its maximum");
    const long long total = b.t_mc + b.t_tf + b.t_oe;
    if (total < 1) raise(ErrorCode::EmptyResultSet, "level3_score: no questions");
    const double num = static_cast<double>(b.s_mc) + static_cast<double>(b.s_tf) + b.s_oe;
    const double den = static_cast<double>(b.t_mc) + static_cast<double>(b.t_tf) +
                       5.0 * static_cast<double>(b.t_oe);
    return num / den;
}

// ============================================================
// Leaderboard
// ============================================================

LeaderboardRow aggregate(const std::string& model, const std::vector<CellScore>& cells) {
    std::array<bool, 6> seen{};
    LeaderboardRow row;
    row.model = model;
    for (const auto& c : cells) {
        if (c.level < 1 || c.level > 3)
            raise(ErrorCode::ValidationError, "aggregate: level must be 1..3");
        if (!(c.accuracy >= 0.0) || !(c.accuracy <= 1.0))
            raise(ErrorCode::ValidationError, "aggregate: accuracy outside [0,1]");
        const std::size_t idx =
            static_cast<std::size_t>(c.level - 1) * 2 + (c.region == Region::CN ? 0 : 1);
        if (seen[idx])
            raise(ErrorCode::MissingCell,
                  "aggregate: duplicate cell for level " + std::to_string(c.level) + " " +
                      region_name(c.region));
        seen[idx] = true;
        row.cells[idx] = c.accuracy;
    }
    for (std::size_t i = 0; i < 6; ++i) {
        if (!seen[i])
            raise(ErrorCode::MissingCell,
                  "aggregate: missing cell for level " + std::to_string(i / 2 + 1) + " " +
                      (i % 2 == 0 ? "CN" : "US"));
    }
    row.cn_mean = (row.cells[0] + row.cells[2] + row.cells[4]) / 3.0;
    row.us_mean = (row.cells[1] + row.cells[3] + row.cells[5]) / 3.0;
    double total = 0.0;
    for (double c : row.cells) total += c;
    row.overall = total / 6.0;
    return row;
}

nlohmann::json leaderboard_to_json(const Leaderboard& lb) {
    nlohmann::json models = nlohmann::json::object();
    for (const auto& row : lb.rows) {
        nlohmann::json cells = nlohmann::json::object();
        for (int level = 1; level <= 3; ++level) {
            nlohmann::json by_region = nlohmann::json::object();
            by_region["CN"] = row.cells[static_cast<std::size_t>(level - 1) * 2];
            by_region["US"] = row.cells[static_cast<std::size_t>(level - 1) * 2 + 1];
            cells[std::to_string(level)] = std::move(by_region);
        }
        models[row.model] = {{"cells", std::move(cells)},
                             {"cn_mean", row.cn_mean},
                             {"us_mean", row.us_mean},
                             {"overall", row.overall}};
    }
    return nlohmann::json{{"leaderboard", std::move(models)}};
}

std::string leaderboard_to_csv(const Leaderboard& lb) {
    std::string out = "model,level,region,accuracy_pct\n";
    for (const auto& row : lb.rows) {
        for (int level = 1; level <= 3; ++level) {
            for (int r = 0; r < 2; ++r) {
                out += csv_escape(row.model);
                out += "," + std::to_string(level);
                out += ",";
                out += r == 0 ? "CN" : "US";
                out += "," +
                       format_fixed(row.cells[static_cast<std::size_t>(level - 1) * 2 +
                                              static_cast<std::size_t>(r)] *
                                        100.0,
                                    2) +
                       "\n";
            }
        }
    }
    return out;
}

}  // namespace policyeval
