#include "helion/vocabulary.hpp"

#include "helion/error.hpp"
#include "helion/text.hpp"

#include <algorithm>
#include <fstream>

namespace helion {

void Vocabulary::add(VocabularyEntry entry) {
    if (!is_identifier(entry.device) || !is_identifier(entry.attribute)) {
        throw Error(ErrorCode::MalformedVocabulary, "vocabulary names must be identifiers",
                    entry.device + "\t" + entry.attribute);
    }
    if (entry.actions.empty()) {
        throw Error(ErrorCode::MalformedVocabulary, "empty action list",
                    entry.device + "\t" + entry.attribute);
    }
    for (std::size_t i = 0; i < entry.actions.size(); ++i) {
        const auto& a = entry.actions[i];
        if (!is_identifier(a)) {
            throw Error(ErrorCode::MalformedVocabulary, "action '" + a + "' is not an identifier",
                        entry.device + "\t" + entry.attribute);
        }
        if (std::find(entry.actions.begin(), entry.actions.begin() + i, a) != entry.actions.begin() + i) {
            throw Error(ErrorCode::MalformedVocabulary, "action '" + a + "' listed twice",
                        entry.device + "\t" + entry.attribute);
        }
    }
    Key key{entry.device, entry.attribute};
    auto [it, inserted] = entries_.try_emplace(std::move(key), std::move(entry));
    if (!inserted) {
        throw Error(ErrorCode::MalformedVocabulary, "duplicate device/attribute pair",
                    it->first.first + "\t" + it->first.second);
    }
}

const VocabularyEntry* Vocabulary::find(std::string_view device, std::string_view attribute) const {
    auto it = entries_.find(Key{std::string(device), std::string(attribute)});
    return it == entries_.end() ? nullptr : &it->second;
}

bool Vocabulary::contains(const Token& t) const {
    const VocabularyEntry* e = find(t.device(), t.attribute());
    return e != nullptr && std::find(e->actions.begin(), e->actions.end(), t.action()) != e->actions.end();
}

std::vector<const VocabularyEntry*> Vocabulary::entries() const {
    std::vector<const VocabularyEntry*> out;
    out.reserve(entries_.size());
    for (const auto& [key, entry] : entries_) out.push_back(&entry);
    return out;
}

bool validate(const Token& t, const Vocabulary& v) { return v.contains(t); }

Vocabulary load_vocabulary(std::istream& in) {
    Vocabulary vocab;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty() || line.front() == '#') continue;
        auto fields = split(line, '\t');
        if (fields.size() != 3) {
            throw Error(ErrorCode::MalformedVocabulary,
                        "line " + std::to_string(line_no) + ": expected 3 tab-separated fields", line);
        }
        VocabularyEntry entry{std::string(fields[0]), std::string(fields[1]), {}};
        if (!fields[2].empty()) {
            for (auto a : split(fields[2], '|')) entry.actions.emplace_back(a);
        }
        try {
            vocab.add(std::move(entry));
        } catch (const Error& e) {
            throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what(), line);
        }
    }
    return vocab;
}

Vocabulary load_vocabulary_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open vocabulary file", path);
    return load_vocabulary(in);
}

Vocabulary derive_vocabulary(std::span<const Token> tokens) {
    std::map<Vocabulary::Key, std::vector<std::string>> actions;
    for (const Token& t : tokens) {
        auto& list = actions[{t.device(), t.attribute()}];
        if (std::find(list.begin(), list.end(), t.action()) == list.end()) list.push_back(t.action());
    }
    Vocabulary vocab;
    for (auto& [key, list] : actions) vocab.add({key.first, key.second, std::move(list)});
    return vocab;
}

}  // namespace helion
