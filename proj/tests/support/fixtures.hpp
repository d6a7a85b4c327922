#pragma once

#include "helion/ngram.hpp"
#include "helion/routine.hpp"
#include "helion/scheduler.hpp"
#include "helion/token.hpp"
#include "helion/vocabulary.hpp"

#include <random>
#include <string>
#include <vector>

namespace fixtures {

inline const std::string kDataDir = HELION_DATA_DIR;

/// Single-letter stand-ins: "a" -> a,x,on and so on.
inline helion::Token letter(char c) { return helion::Token(std::string(1, c), "x", "on"); }
inline std::string letter_text(char c) { return std::string(1, c) + ",x,on"; }

inline helion::EventCorpus corpus_of(const std::vector<std::string>& lines) {
    helion::EventCorpus corpus;
    for (const auto& line : lines) {
        helion::EventSequence seq;
        for (char c : line) seq.tokens.push_back(letter(c));
        corpus.sequences.push_back(std::move(seq));
    }
    return corpus;
}

inline std::vector<std::vector<std::string>> texts_of(const helion::EventCorpus& corpus) {
    std::vector<std::vector<std::string>> out;
    for (const auto& s : corpus.sequences) {
        std::vector<std::string> seq;
        for (const auto& t : s.tokens) seq.push_back(t.text());
        out.push_back(std::move(seq));
    }
    return out;
}

/// The two-sequence toy corpus [A B C], [A B D].
inline helion::EventCorpus toy_corpus() { return corpus_of({"abc", "abd"}); }

inline std::string random_identifier(std::mt19937_64& rng) {
    static constexpr char first[] = "abcdefghijklmnopqrstuvwxyz";
    static constexpr char rest[] = "abcdefghijklmnopqrstuvwxyz0123456789_";
    std::string s(1, first[std::uniform_int_distribution<int>(0, 25)(rng)]);
    int len = std::uniform_int_distribution<int>(0, 12)(rng);
    for (int i = 0; i < len; ++i) s += rest[std::uniform_int_distribution<int>(0, 36)(rng)];
    return s;
}

inline helion::Token random_token(std::mt19937_64& rng) {
    return helion::Token(random_identifier(rng), random_identifier(rng), random_identifier(rng));
}

/// Random corpus over the first `alphabet` letters with exactly `events` tokens.
inline helion::EventCorpus random_corpus(std::mt19937_64& rng, int alphabet, int events, int max_sequences) {
    int sequences = std::uniform_int_distribution<int>(1, std::min(max_sequences, events))(rng);
    std::vector<std::string> lines(static_cast<std::size_t>(sequences));
    for (int i = 0; i < events; ++i) {
        auto slot = static_cast<std::size_t>(i < sequences ? i : std::uniform_int_distribution<int>(0, sequences - 1)(rng));
        lines[slot] += static_cast<char>('a' + std::uniform_int_distribution<int>(0, alphabet - 1)(rng));
    }
    return corpus_of(lines);
}

inline helion::Vocabulary demo_vocabulary() { return helion::load_vocabulary_file(kDataDir + "/vocabulary.tsv"); }

inline std::vector<helion::UserRoutines> demo_users() {
    auto vocab = demo_vocabulary();
    return helion::load_user_routines_file(kDataDir + "/routines.json", &vocab);
}

inline helion::EventCorpus demo_corpus(std::uint64_t seed = 7) {
    helion::ScheduleConfig cfg;
    cfg.seed = seed;
    auto plan = helion::plan_users(demo_users(), cfg);
    return helion::build_corpus(plan);
}

}  // namespace fixtures
