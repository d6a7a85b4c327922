#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace helion {

enum class ErrorCode {
    MalformedToken,
    MalformedVocabulary,
    MalformedRoutine,
    UnknownToken,
    DuplicateRoutineId,
    EmptyRoutineSet,
    UnknownRoutineId,
    MalformedCorpus,
    EmptyCorpus,
    EmptySequence,
    MalformedModel,
    EmptyVocabulary,
    SessionExhausted,
    UnknownEntity,
    IllegalState,
    MalformedPolicy,
    IoFailure,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Domain error raised by every helion module. `detail` carries the
/// offending input (a token text, a line, a path) when there is one.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::string detail = {})
        : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

}  // namespace helion
