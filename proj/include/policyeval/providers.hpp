#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "policyeval/errors.hpp"
#include "policyeval/rng.hpp"

namespace policyeval {

// ============================================================
// Specs
// ============================================================

enum class ProviderKind { Mock, Http };

struct ProviderSpec {
    std::string name;
    ProviderKind kind = ProviderKind::Mock;

    // http only
    std::string endpoint;      // e.g. http://host:port/v1/chat/completions
    std::string model_id;
    std::string auth_env_var;  // credential read from the environment, never config
    double timeout_s = 60.0;
    int max_retries = 3;
    double backoff_base_s = 1.0;
    double temperature = 0.0;
    std::optional<std::int64_t> seed;

    // mock only
    std::vector<std::string> script;
};

/// Raises ValidationError when fields do not match the kind.
void validate_provider(const ProviderSpec& spec);

struct CompletionRequest {
    std::string prompt;
    std::string request_tag;  // carried into the replay log
};

struct CompletionResult {
    std::string text;
    std::string provider_name;
    int attempts = 1;
    double latency_s = 0.0;
};

// ============================================================
// Replay log
// ============================================================

/// Append-only line-delimited audit log of every completion.
/// Thread-safe; shared by all providers of a run.
class ReplayLog {
public:
    explicit ReplayLog(const std::string& path);
    ~ReplayLog();
    void append(const std::string& provider, const CompletionRequest& req,
                const std::string& text, int attempts);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// ============================================================
// Runtime provider
// ============================================================

/// A spec plus the mutable bits: the mock cursor and test hooks.
/// complete() is safe to call from several threads.
class Provider {
public:
    explicit Provider(ProviderSpec spec);

    const ProviderSpec& spec() const { return spec_; }

    /// Mock: next scripted response, in order, MockScriptExhausted past the
    /// end. Http: POST a single-user-message chat completion, retrying with
    /// exponential backoff, and return choices[0].message.content.
    CompletionResult complete(const CompletionRequest& req);

    /// Replace the backoff sleep (tests observe the waits instead of waiting).
    void set_sleep_hook(std::function<void(double)> hook);

    /// Runs inside every complete() call; tests use it to instrument
    /// concurrency or inject delays.
    void set_call_hook(std::function<void()> hook);

    void set_replay_log(std::shared_ptr<ReplayLog> log);

private:
    CompletionResult complete_mock(const CompletionRequest& req);
    CompletionResult complete_http(const CompletionRequest& req);

    ProviderSpec spec_;
    std::size_t cursor_ = 0;
    std::mutex mu_;
    std::function<void(double)> sleep_;
    std::function<void()> call_hook_;
    std::shared_ptr<ReplayLog> log_;
};

// ============================================================
// Pool
// ============================================================

struct ModelPool {
    std::vector<ProviderSpec> providers;
    std::uint64_t rng_seed = 0;
};

/// Raises ValidationError on duplicate names or an empty pool.
void validate_pool(const ModelPool& pool);

/// n distinct providers, uniform without replacement, skipping `exclude`.
/// Deterministic given the generator state.
std::vector<ProviderSpec> sample_models(const ModelPool& pool, std::size_t n, Rng& rng,
                                        const std::set<std::string>& exclude = {});

// ============================================================
// Bounded parallel dispatch
// ============================================================

/// One slot per request: either a result or the error that hit that slot.
struct SlotResult {
    std::optional<CompletionResult> result;
    ErrorCode error_code = ErrorCode::HttpError;  // meaningful only when !ok()
    std::string error_message;

    bool ok() const { return result.has_value(); }
};

/// Dispatch reqs[i] to providers[i] with at most `limit` in flight;
/// results come back in input order and per-slot failures never abort
/// the batch.
std::vector<SlotResult> map_bounded(const std::vector<Provider*>& providers,
                                    const std::vector<CompletionRequest>& reqs, int limit);

}  // namespace policyeval
