#include "helion/token.hpp"

#include "helion/error.hpp"

#include <array>

namespace helion {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::MalformedToken: return "malformed_token";
        case ErrorCode::MalformedVocabulary: return "malformed_vocabulary";
        case ErrorCode::MalformedRoutine: return "malformed_routine";
        case ErrorCode::UnknownToken: return "unknown_token";
        case ErrorCode::DuplicateRoutineId: return "duplicate_routine_id";
        case ErrorCode::EmptyRoutineSet: return "empty_routine_set";
        case ErrorCode::UnknownRoutineId: return "unknown_routine_id";
        case ErrorCode::MalformedCorpus: return "malformed_corpus";
        case ErrorCode::EmptyCorpus: return "empty_corpus";
        case ErrorCode::EmptySequence: return "empty_sequence";
        case ErrorCode::MalformedModel: return "malformed_model";
        case ErrorCode::EmptyVocabulary: return "empty_vocabulary";
        case ErrorCode::SessionExhausted: return "session_exhausted";
        case ErrorCode::UnknownEntity: return "unknown_entity";
        case ErrorCode::IllegalState: return "illegal_state";
        case ErrorCode::MalformedPolicy: return "malformed_policy";
        case ErrorCode::IoFailure: return "io_failure";
    }
    return "unknown";
}

bool is_identifier(std::string_view s) noexcept {
    if (s.empty() || s.front() < 'a' || s.front() > 'z') return false;
    for (char c : s) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
        if (!ok) return false;
    }
    return true;
}

Token::Token(std::string device, std::string attribute, std::string action)
    : device_(std::move(device)), attribute_(std::move(attribute)), action_(std::move(action)) {
    for (const std::string* field : {&device_, &attribute_, &action_}) {
        if (!is_identifier(*field)) {
            throw Error(ErrorCode::MalformedToken, "token field '" + *field + "' is not an identifier",
                        device_ + "," + attribute_ + "," + action_);
        }
    }
}

std::string Token::text() const {
    std::string out;
    out.reserve(device_.size() + attribute_.size() + action_.size() + 2);
    out.append(device_).append(1, ',').append(attribute_).append(1, ',').append(action_);
    return out;
}

Symbol parse_token(std::string_view text) {
    if (text == kSequenceStartText) return SpecialToken::SequenceStart;
    if (text == kSequenceEndText) return SpecialToken::SequenceEnd;
    if (text == kUnknownText) return SpecialToken::Unknown;
    if (text.empty()) throw Error(ErrorCode::MalformedToken, "empty token text");

    std::array<std::string_view, 3> fields;
    std::size_t count = 0;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = text.find(',', start);
        if (count == fields.size()) {
            throw Error(ErrorCode::MalformedToken, "token has more than three fields", std::string(text));
        }
        fields[count++] = text.substr(start, comma == std::string_view::npos ? text.npos : comma - start);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (count != 3) {
        throw Error(ErrorCode::MalformedToken, "token must have three comma-separated fields",
                    std::string(text));
    }
    for (auto f : fields) {
        if (!is_identifier(f)) {
            throw Error(ErrorCode::MalformedToken, "illegal token field '" + std::string(f) + "'",
                        std::string(text));
        }
    }
    return Token(std::string(fields[0]), std::string(fields[1]), std::string(fields[2]));
}

Token parse_event(std::string_view text) {
    Symbol s = parse_token(text);
    if (auto* t = std::get_if<Token>(&s)) return std::move(*t);
    throw Error(ErrorCode::MalformedToken, "reserved marker is not an event", std::string(text));
}

std::string format_token(const Token& t) { return t.text(); }

std::string format_token(SpecialToken s) {
    switch (s) {
        case SpecialToken::SequenceStart: return std::string(kSequenceStartText);
        case SpecialToken::SequenceEnd: return std::string(kSequenceEndText);
        case SpecialToken::Unknown: return std::string(kUnknownText);
    }
    return {};
}

std::string format_token(const Symbol& s) {
    return std::visit([](const auto& v) { return format_token(v); }, s);
}

}  // namespace helion
