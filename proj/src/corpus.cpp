#include "policyeval/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "policyeval/errors.hpp"
#include "policyeval/rng.hpp"
#include "policyeval/text.hpp"

namespace policyeval {

// ============================================================
// Enums and tags
// ============================================================

const char* region_name(Region r) { return r == Region::CN ? "CN" : "US"; }

const char* format_name(Format f) {
    switch (f) {
        case Format::MC: return "mc";
        case Format::TF: return "tf";
        case Format::OE: return "oe";
    }
    return "?";
}

Region parse_region(const std::string& s) {
    if (s == "CN") return Region::CN;
    if (s == "US") return Region::US;
    raise(ErrorCode::ValidationError, "region must be \"CN\" or \"US\", got \"" + s + "\"");
}

Format parse_format(const std::string& s) {
    if (s == "mc") return Format::MC;
    if (s == "tf") return Format::TF;
    if (s == "oe") return Format::OE;
    raise(ErrorCode::ValidationError, "format must be \"mc\", \"tf\" or \"oe\", got \"" + s + "\"");
}

const std::vector<std::string>& all_task_ids() {
    static const std::vector<std::string> ids = {"1-1", "1-2", "1-3", "2-1", "2-2",
                                                 "2-3", "3-1", "3-2", "3-3", "3-4"};
    return ids;
}

int task_level(const std::string& task_id) {
    const auto& ids = all_task_ids();
    if (std::find(ids.begin(), ids.end(), task_id) == ids.end()) return 0;
    return task_id[0] - '0';
}

// ============================================================
// Validation
// ============================================================

namespace {

[[noreturn]] void invalid(const Question& q, const std::string& why) {
    raise(ErrorCode::ValidationError, "question \"" + q.id + "\": " + why);
}

}  // namespace

void validate_question(const Question& q) {
    if (q.id.empty()) raise(ErrorCode::ValidationError, "question with empty id");
    if (q.source_policy_id.empty()) invalid(q, "empty source_policy_id");
    if (task_level(q.tag.task_id) == 0)
        invalid(q, "unknown task_id \"" + q.tag.task_id + "\"");
    if (q.tag.level != task_level(q.tag.task_id))
        invalid(q, "level " + std::to_string(q.tag.level) + " does not match task_id \"" +
                       q.tag.task_id + "\"");

    const bool has_options = q.options.has_value();
    const bool has_gold_index = q.gold_index.has_value();
    const bool has_gold_bool = q.gold_bool.has_value();
    const bool has_reference = q.reference.has_value();

    switch (q.format) {
        case Format::MC: {
            if (!has_options || !has_gold_index)
                invalid(q, "mc requires options and gold_index");
            if (has_gold_bool || has_reference)
                invalid(q, "mc must not carry gold_bool or reference");
            if (q.options->size() < 2) invalid(q, "mc needs at least 2 options");
            if (*q.gold_index < 0 || static_cast<std::size_t>(*q.gold_index) >= q.options->size())
                invalid(q, "gold_index " + std::to_string(*q.gold_index) + " out of range");
            std::set<std::string> seen;
            for (const auto& opt : *q.options) {
                if (!seen.insert(normalize_answer(opt)).second)
                    invalid(q, "duplicate option after normalization: \"" + opt + "\"");
            }
            break;
        }
        case Format::TF: {
            if (!has_gold_bool) invalid(q, "tf requires gold_bool");
            if (has_options || has_gold_index || has_reference)
                invalid(q, "tf must not carry options, gold_index or reference");
            break;
        }
        case Format::OE: {
            if (!has_reference) invalid(q, "oe requires a reference answer");
            if (has_options || has_gold_index || has_gold_bool)
                invalid(q, "oe must not carry options, gold_index or gold_bool");
            if (q.tag.level != 3) invalid(q, "open-ended questions are level 3 only");
            if (q.reference->key_points.empty()) invalid(q, "reference needs >= 1 key point");
            for (const auto& kp : q.reference->key_points)
                if (trim(kp).empty()) invalid(q, "blank reference key point");
            break;
        }
    }
}

// ============================================================
// JSON record mapping
// ============================================================

namespace {

const std::set<std::string> kKnownFields = {
    "id",      "source_policy_id", "region",    "level",     "task_id",     "format",
    "stem",    "options",          "gold_index", "gold_bool", "reference",  "examiner_tag"};

std::string need_string(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_string())
        raise(ErrorCode::ParseError, std::string("missing or non-string field \"") + key + "\"");
    return j.at(key).get<std::string>();
}

}  // namespace

Question question_from_json(const nlohmann::json& j) {
    if (!j.is_object()) raise(ErrorCode::ParseError, "record is not an object");
    Question q;
    q.id = need_string(j, "id");
    q.source_policy_id = need_string(j, "source_policy_id");
    q.region = parse_region(need_string(j, "region"));
    if (!j.contains("level") || !j.at("level").is_number_integer())
        raise(ErrorCode::ParseError, "missing or non-integer field \"level\"");
    q.tag.level = j.at("level").get<int>();
    q.tag.task_id = need_string(j, "task_id");
    q.format = parse_format(need_string(j, "format"));
    q.stem = need_string(j, "stem");

    if (j.contains("options")) {
        if (!j.at("options").is_array())
            raise(ErrorCode::ParseError, "\"options\" must be an array");
        std::vector<std::string> opts;
        for (const auto& o : j.at("options")) {
            if (!o.is_string()) raise(ErrorCode::ParseError, "option entries must be strings");
            opts.push_back(o.get<std::string>());
        }
        q.options = std::move(opts);
    }
    if (j.contains("gold_index")) {
        if (!j.at("gold_index").is_number_integer())
            raise(ErrorCode::ParseError, "\"gold_index\" must be an integer");
        q.gold_index = j.at("gold_index").get<int>();
    }
    if (j.contains("gold_bool")) {
        if (!j.at("gold_bool").is_boolean())
            raise(ErrorCode::ParseError, "\"gold_bool\" must be a boolean");
        q.gold_bool = j.at("gold_bool").get<bool>();
    }
    if (j.contains("reference")) {
        const auto& r = j.at("reference");
        if (!r.is_object()) raise(ErrorCode::ParseError, "\"reference\" must be an object");
        for (const auto& [key, value] : r.items()) {
            (void)value;
            if (key != "text" && key != "key_points")
                raise(ErrorCode::ParseError, "unknown reference field \"" + key + "\"");
        }
        ReferenceAnswer ref;
        ref.text = need_string(r, "text");
        if (!r.contains("key_points") || !r.at("key_points").is_array())
            raise(ErrorCode::ParseError, "reference needs a \"key_points\" array");
        for (const auto& kp : r.at("key_points")) {
            if (!kp.is_string()) raise(ErrorCode::ParseError, "key points must be strings");
            ref.key_points.push_back(kp.get<std::string>());
        }
        q.reference = std::move(ref);
    }
    if (j.contains("examiner_tag")) q.examiner_tag = need_string(j, "examiner_tag");

    for (const auto& [key, value] : j.items())
        if (!kKnownFields.count(key)) q.extras[key] = value;

    validate_question(q);
    return q;
}

nlohmann::json question_to_json(const Question& q) {
    nlohmann::json j;
    j["id"] = q.id;
    j["source_policy_id"] = q.source_policy_id;
    j["region"] = region_name(q.region);
    j["level"] = q.tag.level;
    j["task_id"] = q.tag.task_id;
    j["format"] = format_name(q.format);
    j["stem"] = q.stem;
    if (q.options) j["options"] = *q.options;
    if (q.gold_index) j["gold_index"] = *q.gold_index;
    if (q.gold_bool) j["gold_bool"] = *q.gold_bool;
    if (q.reference)
        j["reference"] = {{"text", q.reference->text}, {"key_points", q.reference->key_points}};
    if (q.examiner_tag) j["examiner_tag"] = *q.examiner_tag;
    for (const auto& [key, value] : q.extras.items()) j[key] = value;
    return j;
}

// ============================================================
// Corpus
// ============================================================

Corpus make_corpus(std::vector<Question> questions) {
    Corpus c;
    std::unordered_set<std::string> ids;
    for (const auto& q : questions) {
        validate_question(q);
        if (!ids.insert(q.id).second)
            raise(ErrorCode::DuplicateId, "duplicate question id \"" + q.id + "\"");
    }
    for (const auto& tid : all_task_ids()) c.counts[tid] = {0, 0};
    for (const auto& q : questions)
        c.counts[q.tag.task_id][q.region == Region::CN ? 0 : 1] += 1;
    c.questions = std::move(questions);
    return c;
}

Corpus load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) raise(ErrorCode::IoError, "cannot open \"" + path + "\"");
    std::vector<Question> questions;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            raise(ErrorCode::ParseError,
                  path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        try {
            questions.push_back(question_from_json(j));
        } catch (const Error& e) {
            if (e.code() == ErrorCode::ParseError)
                raise(ErrorCode::ParseError,
                      path + ":" + std::to_string(line_no) + ": " + e.what());
            throw;  // validation errors already name the question id
        }
    }
    return make_corpus(std::move(questions));
}

void save_corpus(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path);
    if (!out.good()) raise(ErrorCode::IoError, "cannot write \"" + path + "\"");
    for (const auto& q : corpus.questions) out << question_to_json(q).dump() << "\n";
    if (!out.good()) raise(ErrorCode::IoError, "short write to \"" + path + "\"");
}

std::vector<TaxonomyRow> taxonomy_counts(const Corpus& corpus) {
    std::vector<TaxonomyRow> rows;
    for (const auto& tid : all_task_ids()) {
        TaxonomyRow row;
        row.task_id = tid;
        row.level = task_level(tid);
        if (auto it = corpus.counts.find(tid); it != corpus.counts.end()) {
            row.cn = it->second[0];
            row.us = it->second[1];
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

// ============================================================
// Grouped split
// ============================================================

SplitResult grouped_split(const Corpus& corpus, const SplitSpec& spec) {
    if (!(spec.test_fraction > 0.0) || !(spec.test_fraction < 1.0))
        raise(ErrorCode::ValidationError, "test_fraction must lie strictly between 0 and 1");

    std::unordered_map<std::string, long long> group_size;
    for (const auto& q : corpus.questions) group_size[q.source_policy_id] += 1;
    if (group_size.size() < 2)
        raise(ErrorCode::UnsplittableCorpus,
              "need at least 2 distinct source_policy_ids, got " +
                  std::to_string(group_size.size()));

    std::vector<std::string> policy_ids;
    policy_ids.reserve(group_size.size());
    for (const auto& [pid, size] : group_size) policy_ids.push_back(pid);
    std::sort(policy_ids.begin(), policy_ids.end());
    Rng rng(spec.seed);
    rng.shuffle(policy_ids);

    const double target =
        spec.test_fraction * static_cast<double>(corpus.questions.size());
    std::unordered_set<std::string> test_ids;
    double test_count = 0.0;
    for (const auto& pid : policy_ids) {
        if (test_count >= target) break;
        const double size = static_cast<double>(group_size[pid]);
        // take the group only when doing so lands strictly closer to target
        if (std::fabs(test_count + size - target) < std::fabs(test_count - target)) {
            test_ids.insert(pid);
            test_count += size;
        }
    }

    std::vector<Question> train_q, test_q;
    for (const auto& q : corpus.questions) {
        if (test_ids.count(q.source_policy_id)) test_q.push_back(q);
        else train_q.push_back(q);
    }
    SplitResult out;
    out.train = make_corpus(std::move(train_q));
    out.test = make_corpus(std::move(test_q));
    return out;
}

}  // namespace policyeval
