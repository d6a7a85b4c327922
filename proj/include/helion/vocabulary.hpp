#pragma once

#include "helion/token.hpp"

#include <istream>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace helion {

struct VocabularyEntry {
    std::string device;
    std::string attribute;
    std::vector<std::string> actions;  // nonempty, declared order

    friend bool operator==(const VocabularyEntry&, const VocabularyEntry&) = default;
};

/// The set of device attributes the home knows about, each with its
/// allowed actions. Entries are keyed by (device, attribute), so equality
/// does not depend on the order entries were added.
class Vocabulary {
public:
    using Key = std::pair<std::string, std::string>;

    /// Throws Error{MalformedVocabulary} on a duplicate pair or empty action list.
    void add(VocabularyEntry entry);

    bool contains(const Token& t) const;
    const VocabularyEntry* find(std::string_view device, std::string_view attribute) const;

    bool empty() const noexcept { return entries_.empty(); }
    std::size_t size() const noexcept { return entries_.size(); }

    /// Entries sorted by (device, attribute).
    std::vector<const VocabularyEntry*> entries() const;

    friend bool operator==(const Vocabulary&, const Vocabulary&) = default;

private:
    std::map<Key, VocabularyEntry> entries_;
};

bool validate(const Token& t, const Vocabulary& v);

/// Reads the `device<TAB>attribute<TAB>a1|a2|...` format; `#` lines are comments.
Vocabulary load_vocabulary(std::istream& in);
Vocabulary load_vocabulary_file(const std::string& path);

/// Builds the smallest vocabulary admitting every given token. Actions keep
/// first-seen order per attribute.
Vocabulary derive_vocabulary(std::span<const Token> tokens);

}  // namespace helion
