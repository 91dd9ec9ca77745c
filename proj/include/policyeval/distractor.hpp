#pragma once

#include <string>
#include <vector>

#include "policyeval/providers.hpp"
#include "policyeval/rng.hpp"

namespace policyeval {

struct DistractorTask {
    std::string stem;
    std::string gold;
    int k = 4;            // total option count
    int max_attempts = 0;  // 0 means the default budget of 10*k
};

struct BuiltMCQ {
    std::string stem;
    std::vector<std::string> options;
    int gold_index = -1;
    /// one entry per option: the generating provider's name, "gold" for the answer
    std::vector<std::string> provenance;
    /// accepted distractors in acceptance order
    std::vector<std::string> distractors;
    int attempts = 0;
};

/// Fill the {question} and {wrong_answer} slots. The wrong-answer slot is
/// a newline-separated list: the gold answer first (it is presented as a
/// previous incorrect answer so the model avoids restating it), then the
/// accepted distractors in acceptance order.
std::string render_distractor_prompt(const std::string& tmpl, const std::string& stem,
                                     const std::vector<std::string>& wrong_answers);

/// Uniform seeded permutation of {gold} ∪ distractors plus the index of gold.
std::pair<std::vector<std::string>, int> shuffle_options(
    const std::string& gold, const std::vector<std::string>& distractors, Rng& rng);

/// Iterative distractor generation: sample a provider, ask for one more
/// wrong answer, accept it only when it is new under normalize_answer,
/// repeat until k-1 are in hand, then shuffle. Provider failures and
/// rejected candidates both consume the attempt budget.
BuiltMCQ generate_distractors(const DistractorTask& task,
                              const std::vector<Provider*>& pool, Rng& rng,
                              const std::string& prompt_template);

}  // namespace policyeval
