#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace policyeval {

// ============================================================
// Enums and tags
// ============================================================

enum class Region { CN, US };
enum class Format { MC, TF, OE };

const char* region_name(Region r);          // "CN" / "US"
const char* format_name(Format f);          // "mc" / "tf" / "oe"
Region parse_region(const std::string& s);  // raises ValidationError
Format parse_format(const std::string& s);  // raises ValidationError

/// Two-level task taxonomy: levels 1..3, task ids "1-1".."3-4"
/// (three tasks at levels 1 and 2, four at level 3).
struct TaskTag {
    int level = 0;
    std::string task_id;

    bool operator==(const TaskTag&) const = default;
};

/// The ten valid task ids in canonical order.
const std::vector<std::string>& all_task_ids();

/// Level implied by a valid task id, 0 when the id is unknown.
int task_level(const std::string& task_id);

// ============================================================
// Questions
// ============================================================

struct ReferenceAnswer {
    std::string text;
    std::vector<std::string> key_points;

    bool operator==(const ReferenceAnswer&) const = default;
};

struct Question {
    std::string id;
    std::string source_policy_id;
    Region region = Region::CN;
    TaskTag tag;
    Format format = Format::MC;
    std::string stem;

    std::optional<std::vector<std::string>> options;  // MC
    std::optional<int> gold_index;                    // MC
    std::optional<bool> gold_bool;                    // TF
    std::optional<ReferenceAnswer> reference;         // OE
    std::optional<std::string> examiner_tag;

    nlohmann::json extras = nlohmann::json::object();  // unknown fields, kept verbatim

    bool operator==(const Question&) const = default;
};

/// Raises ValidationError naming the question id when any invariant fails
/// (bad tag, field/format mismatch, duplicate or out-of-range options...).
void validate_question(const Question& q);

nlohmann::json question_to_json(const Question& q);
Question question_from_json(const nlohmann::json& j);

// ============================================================
// Corpus
// ============================================================

struct Corpus {
    std::vector<Question> questions;
    /// task_id -> {CN count, US count}; every valid task id has an entry.
    std::map<std::string, std::array<long long, 2>> counts;

    bool operator==(const Corpus&) const = default;
};

/// Validate every question, check id uniqueness, and fill counts.
Corpus make_corpus(std::vector<Question> questions);

/// Line-delimited records, one JSON object per line, UTF-8.
Corpus load_corpus(const std::string& path);
void save_corpus(const Corpus& corpus, const std::string& path);

struct TaxonomyRow {
    std::string task_id;
    int level = 0;
    long long cn = 0;
    long long us = 0;
};

/// All ten rows in canonical task order; zero cells are explicit.
std::vector<TaxonomyRow> taxonomy_counts(const Corpus& corpus);

// ============================================================
// Grouped split
// ============================================================

struct SplitSpec {
    double test_fraction = 0.2;
    std::uint64_t seed = 0;
};

struct SplitResult {
    Corpus train;
    Corpus test;
};

/// Policy-grouped split: every source_policy_id lands entirely on one
/// side, and the test question count is the closest achievable to
/// test_fraction * |corpus| under that constraint. Deterministic in seed.
SplitResult grouped_split(const Corpus& corpus, const SplitSpec& spec);

}  // namespace policyeval
