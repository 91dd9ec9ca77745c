#include "policyeval/errors.hpp"

namespace policyeval {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ValidationError: return "ValidationError";
        case ErrorCode::DuplicateId: return "DuplicateId";
        case ErrorCode::UnsplittableCorpus: return "UnsplittableCorpus";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::UsageError: return "UsageError";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::Timeout: return "Timeout";
        case ErrorCode::HttpError: return "HttpError";
        case ErrorCode::MockScriptExhausted: return "MockScriptExhausted";
        case ErrorCode::MissingCredential: return "MissingCredential";
        case ErrorCode::PoolTooSmall: return "PoolTooSmall";
        case ErrorCode::DistractorExhausted: return "DistractorExhausted";
        case ErrorCode::JudgingExhausted: return "JudgingExhausted";
        case ErrorCode::NoScoreFound: return "NoScoreFound";
        case ErrorCode::ScoreOutOfRange: return "ScoreOutOfRange";
        case ErrorCode::ScoreNotHalfStep: return "ScoreNotHalfStep";
        case ErrorCode::EmptyResultSet: return "EmptyResultSet";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::DegenerateVariance: return "DegenerateVariance";
        case ErrorCode::DegenerateMarginals: return "DegenerateMarginals";
        case ErrorCode::NoPairableValues: return "NoPairableValues";
        case ErrorCode::MissingCell: return "MissingCell";
        case ErrorCode::UnknownExaminerTag: return "UnknownExaminerTag";
        case ErrorCode::EmptySubset: return "EmptySubset";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
        case ErrorCode::EmptyDomain: return "EmptyDomain";
    }
    return "UnknownError";
}

}  // namespace policyeval
