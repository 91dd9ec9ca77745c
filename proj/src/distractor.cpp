#include "policyeval/distractor.hpp"

#include <set>
#include <unordered_map>

#include "policyeval/errors.hpp"
#include "policyeval/text.hpp"

namespace policyeval {

std::string render_distractor_prompt(const std::string& tmpl, const std::string& stem,
                                     const std::vector<std::string>& wrong_answers) {
    std::string joined;
    for (std::size_t i = 0; i < wrong_answers.size(); ++i) {
        if (i > 0) joined += "\n";
        joined += wrong_answers[i];
    }
    std::string out = replace_all(tmpl, "{question}", stem);
    return replace_all(std::move(out), "{wrong_answer}", joined);
}

std::pair<std::vector<std::string>, int> shuffle_options(
    const std::string& gold, const std::vector<std::string>& distractors, Rng& rng) {
    const std::string gold_norm = normalize_answer(gold);
    std::set<std::string> seen = {gold_norm};
    for (const auto& d : distractors)
        if (!seen.insert(normalize_answer(d)).second)
            raise(ErrorCode::ValidationError,
                  "shuffle_options: \"" + d + "\" collides with another option");

    std::vector<std::string> options;
    options.push_back(gold);
    options.insert(options.end(), distractors.begin(), distractors.end());
    rng.shuffle(options);
    int gold_index = -1;
    for (std::size_t i = 0; i < options.size(); ++i) {
        if (options[i] == gold) {
            gold_index = static_cast<int>(i);
            break;
        }
    }
    return {std::move(options), gold_index};
}

BuiltMCQ generate_distractors(const DistractorTask& task,
                              const std::vector<Provider*>& pool, Rng& rng,
                              const std::string& prompt_template) {
    if (task.k < 2) raise(ErrorCode::ValidationError, "distractor task needs k >= 2");
    if (trim(task.gold).empty())
        raise(ErrorCode::ValidationError, "distractor task needs a non-blank gold answer");
    if (pool.empty()) raise(ErrorCode::ValidationError, "distractor pool is empty");
    for (const auto* p : pool)
        if (p == nullptr) raise(ErrorCode::ValidationError, "null provider in pool");

    const int budget = task.max_attempts > 0 ? task.max_attempts : 10 * task.k;
    const std::string gold_norm = normalize_answer(task.gold);

    std::vector<std::string> accepted;             // acceptance order
    std::unordered_map<std::string, std::string> source;  // option text -> provider
    std::set<std::string> taken = {gold_norm};
    int attempts = 0;

    while (static_cast<int>(accepted.size()) < task.k - 1) {
        if (attempts >= budget)
            raise(ErrorCode::DistractorExhausted,
                  "no new distractor after " + std::to_string(attempts) + " attempts (have " +
                      std::to_string(accepted.size()) + " of " + std::to_string(task.k - 1) +
                      ")");
        ++attempts;
        Provider* provider = pool[rng.uniform_below(pool.size())];

        std::vector<std::string> wrongs;
        wrongs.push_back(task.gold);
        wrongs.insert(wrongs.end(), accepted.begin(), accepted.end());
        CompletionRequest req;
        req.prompt = render_distractor_prompt(prompt_template, task.stem, wrongs);
        req.request_tag = "distractor:" + std::to_string(attempts);

        std::string candidate;
        try {
            candidate = trim(provider->complete(req).text);
        } catch (const Error&) {
            continue;  // a failed call burns the attempt but never aborts the loop
        }
        const std::string norm = normalize_answer(candidate);
        if (norm.empty() || taken.count(norm)) continue;
        taken.insert(norm);
        accepted.push_back(candidate);
        source[candidate] = provider->spec().name;
    }

    BuiltMCQ out;
    out.stem = task.stem;
    out.distractors = accepted;
    out.attempts = attempts;
    auto [options, gold_index] = shuffle_options(task.gold, accepted, rng);
    out.options = std::move(options);
    out.gold_index = gold_index;
    out.provenance.reserve(out.options.size());
    for (std::size_t i = 0; i < out.options.size(); ++i) {
        if (static_cast<int>(i) == out.gold_index) out.provenance.push_back("gold");
        else out.provenance.push_back(source.at(out.options[i]));
    }
    return out;
}

}  // namespace policyeval
