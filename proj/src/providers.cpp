#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "policyeval/providers.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "json.hpp"
#include "policyeval/text.hpp"

namespace policyeval {

using nlohmann::json;

// ============================================================
// Spec validation
// ============================================================

void validate_provider(const ProviderSpec& spec) {
    if (spec.name.empty())
        raise(ErrorCode::ValidationError, "provider without a name");
    const std::string who = "provider \"" + spec.name + "\": ";
    if (spec.timeout_s <= 0.0) raise(ErrorCode::ValidationError, who + "timeout must be > 0");
    if (spec.max_retries < 0) raise(ErrorCode::ValidationError, who + "max_retries must be >= 0");
    if (spec.backoff_base_s < 0.0)
        raise(ErrorCode::ValidationError, who + "backoff_base must be >= 0");
    if (spec.temperature < 0.0)
        raise(ErrorCode::ValidationError, who + "temperature must be >= 0");
    if (spec.kind == ProviderKind::Http) {
        if (spec.endpoint.empty() || spec.model_id.empty() || spec.auth_env_var.empty())
            raise(ErrorCode::ValidationError,
                  who + "http providers need endpoint, model_id and auth_env_var");
        if (!spec.script.empty())
            raise(ErrorCode::ValidationError, who + "http providers must not carry a script");
    } else {
        if (!spec.endpoint.empty() || !spec.model_id.empty() || !spec.auth_env_var.empty())
            raise(ErrorCode::ValidationError, who + "mock providers must not carry http fields");
    }
}

// ============================================================
// Replay log
// ============================================================

struct ReplayLog::Impl {
    std::ofstream out;
    std::mutex mu;
};

ReplayLog::ReplayLog(const std::string& path) : impl_(new Impl) {
    impl_->out.open(path, std::ios::app);
    if (!impl_->out.good()) raise(ErrorCode::IoError, "cannot open replay log \"" + path + "\"");
}

ReplayLog::~ReplayLog() = default;

void ReplayLog::append(const std::string& provider, const CompletionRequest& req,
                       const std::string& text, int attempts) {
    json entry = {{"tag", req.request_tag},
                  {"provider", provider},
                  {"prompt", req.prompt},
                  {"text", text},
                  {"attempts", attempts}};
    std::lock_guard<std::mutex> lock(impl_->mu);
    impl_->out << entry.dump() << "\n";
    impl_->out.flush();
}

// ============================================================
// Provider
// ============================================================

Provider::Provider(ProviderSpec spec) : spec_(std::move(spec)) {
    validate_provider(spec_);
    sleep_ = [](double seconds) {
        std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
    };
}

void Provider::set_sleep_hook(std::function<void(double)> hook) { sleep_ = std::move(hook); }
void Provider::set_call_hook(std::function<void()> hook) { call_hook_ = std::move(hook); }
void Provider::set_replay_log(std::shared_ptr<ReplayLog> log) { log_ = std::move(log); }

CompletionResult Provider::complete(const CompletionRequest& req) {
    if (trim(req.prompt).empty())
        raise(ErrorCode::ValidationError, "empty prompt for provider \"" + spec_.name + "\"");
    const auto t0 = std::chrono::steady_clock::now();
    if (call_hook_) call_hook_();
    CompletionResult result = spec_.kind == ProviderKind::Mock ? complete_mock(req)
                                                               : complete_http(req);
    result.provider_name = spec_.name;
    result.latency_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (log_) log_->append(spec_.name, req, result.text, result.attempts);
    return result;
}

CompletionResult Provider::complete_mock(const CompletionRequest&) {
    std::lock_guard<std::mutex> lock(mu_);
    if (cursor_ >= spec_.script.size())
        raise(ErrorCode::MockScriptExhausted,
              "mock \"" + spec_.name + "\" exhausted after " + std::to_string(cursor_) +
                  " responses");
    CompletionResult r;
    r.text = spec_.script[cursor_++];
    r.attempts = 1;
    return r;
}

namespace {

struct ParsedUrl {
    std::string base;  // scheme://host[:port]
    std::string path;
};

ParsedUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        raise(ErrorCode::ConfigError, "endpoint \"" + url + "\" has no scheme");
    const auto path_start = url.find('/', scheme_end + 3);
    ParsedUrl p;
    if (path_start == std::string::npos) {
        p.base = url;
        p.path = "/";
    } else {
        p.base = url.substr(0, path_start);
        p.path = url.substr(path_start);
    }
    return p;
}

}  // namespace

CompletionResult Provider::complete_http(const CompletionRequest& req) {
    const char* token = std::getenv(spec_.auth_env_var.c_str());
    if (token == nullptr || *token == '\0')
        raise(ErrorCode::MissingCredential,
              "environment variable " + spec_.auth_env_var + " is not set (provider \"" +
                  spec_.name + "\")");

    json body = {{"model", spec_.model_id},
                 {"messages", json::array({{{"role", "user"}, {"content", req.prompt}}})},
                 {"temperature", spec_.temperature}};
    if (spec_.seed) body["seed"] = *spec_.seed;
    const std::string payload = body.dump();

    const ParsedUrl url = split_url(spec_.endpoint);
    httplib::Client client(url.base);
    const auto timeout = std::chrono::duration<double>(spec_.timeout_s);
    client.set_connection_timeout(
        std::chrono::duration_cast<std::chrono::milliseconds>(timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::milliseconds>(timeout));
    client.set_write_timeout(std::chrono::duration_cast<std::chrono::milliseconds>(timeout));
    client.set_bearer_token_auth(token);

    std::string last_error;
    bool last_was_timeout = false;
    const int max_attempts = spec_.max_retries + 1;
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        if (attempt > 1)
            sleep_(spec_.backoff_base_s * std::pow(2.0, static_cast<double>(attempt - 2)));
        auto res = client.Post(url.path, payload, "application/json");
        if (!res) {
            const auto err = res.error();
            last_was_timeout = err == httplib::Error::ConnectionTimeout ||
                               err == httplib::Error::Read || err == httplib::Error::Write;
            last_error = "transport error: " + httplib::to_string(err);
            continue;
        }
        if (res->status != 200) {
            last_was_timeout = false;
            last_error = "status " + std::to_string(res->status) + ": " +
                         res->body.substr(0, 200);
            continue;
        }
        json parsed;
        try {
            parsed = json::parse(res->body);
            CompletionResult out;
            out.text = parsed.at("choices").at(0).at("message").at("content").get<std::string>();
            out.attempts = attempt;
            return out;
        } catch (const json::exception& e) {
            // a malformed 200 will not improve on retry
            raise(ErrorCode::HttpError,
                  "provider \"" + spec_.name + "\": unusable response body (" + e.what() +
                      "): " + res->body.substr(0, 200));
        }
    }
    if (last_was_timeout)
        raise(ErrorCode::Timeout, "provider \"" + spec_.name + "\": timed out after " +
                                      std::to_string(max_attempts) + " attempts");
    raise(ErrorCode::HttpError, "provider \"" + spec_.name + "\" failed after " +
                                    std::to_string(max_attempts) + " attempts; last: " +
                                    last_error);
}

// ============================================================
// Pool
// ============================================================

void validate_pool(const ModelPool& pool) {
    if (pool.providers.empty())
        raise(ErrorCode::ValidationError, "model pool is empty");
    std::set<std::string> names;
    for (const auto& spec : pool.providers) {
        validate_provider(spec);
        if (!names.insert(spec.name).second)
            raise(ErrorCode::ValidationError, "duplicate provider name \"" + spec.name + "\"");
    }
}

std::vector<ProviderSpec> sample_models(const ModelPool& pool, std::size_t n, Rng& rng,
                                        const std::set<std::string>& exclude) {
    validate_pool(pool);
    std::vector<const ProviderSpec*> eligible;
    for (const auto& spec : pool.providers)
        if (!exclude.count(spec.name)) eligible.push_back(&spec);
    if (n > eligible.size())
        raise(ErrorCode::PoolTooSmall, "asked for " + std::to_string(n) + " models, only " +
                                           std::to_string(eligible.size()) + " eligible");
    const auto picks = rng.sample_indices(eligible.size(), n);
    std::vector<ProviderSpec> out;
    out.reserve(n);
    for (std::size_t idx : picks) out.push_back(*eligible[idx]);
    return out;
}

// ============================================================
// map_bounded
// ============================================================

std::vector<SlotResult> map_bounded(const std::vector<Provider*>& providers,
                                    const std::vector<CompletionRequest>& reqs, int limit) {
    if (providers.size() != reqs.size())
        raise(ErrorCode::LengthMismatch,
              "map_bounded: " + std::to_string(providers.size()) + " providers vs " +
                  std::to_string(reqs.size()) + " requests");
    if (limit < 1) raise(ErrorCode::ValidationError, "map_bounded: limit must be >= 1");
    for (const auto* p : providers)
        if (p == nullptr) raise(ErrorCode::ValidationError, "map_bounded: null provider");

    const std::size_t n = reqs.size();
    std::vector<SlotResult> slots(n);
    if (n == 0) return slots;

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                slots[i].result = providers[i]->complete(reqs[i]);
            } catch (const Error& e) {
                slots[i].error_code = e.code();
                slots[i].error_message = e.what();
            } catch (const std::exception& e) {
                slots[i].error_code = ErrorCode::HttpError;
                slots[i].error_message = e.what();
            }
        }
    };

    const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(limit), n);
    std::vector<std::thread> threads;
    threads.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    return slots;
}

}  // namespace policyeval
