#pragma once

#include <stdexcept>
#include <string>

namespace policyeval {

/// Typed error codes for every failure mode the harness distinguishes.
/// The CLI maps these onto exit-code classes (usage/validation, transport,
/// degenerate statistics).
enum class ErrorCode {
    // parsing / validation
    ParseError,
    ValidationError,
    DuplicateId,
    UnsplittableCorpus,
    ConfigError,
    UsageError,
    IoError,
    // providers / transport
    Timeout,
    HttpError,
    MockScriptExhausted,
    MissingCredential,
    PoolTooSmall,
    // pipelines
    DistractorExhausted,
    JudgingExhausted,
    NoScoreFound,
    ScoreOutOfRange,
    ScoreNotHalfStep,
    // statistics
    EmptyResultSet,
    LengthMismatch,
    DegenerateVariance,
    DegenerateMarginals,
    NoPairableValues,
    MissingCell,
    UnknownExaminerTag,
    EmptySubset,
    // moe simulator
    DimensionMismatch,
    NonFiniteLoss,
    EmptyDomain,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const { return code_; }
    const char* code_name() const { return error_code_name(code_); }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace policyeval
