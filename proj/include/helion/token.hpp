#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <variant>

namespace helion {

/// True iff `s` matches `[a-z][a-z0-9_]*`.
bool is_identifier(std::string_view s) noexcept;

/// A home-automation event `<device, attribute, action>`.
///
/// Construction validates every field, so a Token in hand is always well
/// formed. Reserved marker texts can never be produced by a Token because
/// they contain characters outside the identifier alphabet.
class Token {
public:
    Token(std::string device, std::string attribute, std::string action);

    const std::string& device() const noexcept { return device_; }
    const std::string& attribute() const noexcept { return attribute_; }
    const std::string& action() const noexcept { return action_; }

    /// Canonical `device,attribute,action` form.
    std::string text() const;

    friend bool operator==(const Token&, const Token&) = default;
    friend auto operator<=>(const Token&, const Token&) = default;

private:
    std::string device_;
    std::string attribute_;
    std::string action_;
};

enum class SpecialToken { SequenceStart, SequenceEnd, Unknown };

using Symbol = std::variant<Token, SpecialToken>;

inline constexpr std::string_view kSequenceStartText = "<s>";
inline constexpr std::string_view kSequenceEndText = "</s>";
inline constexpr std::string_view kUnknownText = "<unk>";

/// Parses canonical text. Throws Error{MalformedToken}.
Symbol parse_token(std::string_view text);

/// Like parse_token but rejects the reserved forms.
Token parse_event(std::string_view text);

std::string format_token(const Token& t);
std::string format_token(SpecialToken s);
std::string format_token(const Symbol& s);

}  // namespace helion
