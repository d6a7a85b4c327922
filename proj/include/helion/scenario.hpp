#pragma once

#include "helion/ngram.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace helion {

enum class Flavor { Up, Down };

std::string_view to_string(Flavor f) noexcept;
std::optional<Flavor> parse_flavor(std::string_view s) noexcept;

struct Scenario {
    std::vector<Token> seed_history;
    std::vector<Token> events;
    Flavor flavor = Flavor::Up;
    int order_used = 0;
    std::vector<double> per_event_logprob;  // log2, parallel to events
};

struct ScenarioStep {
    Token event;
    double logprob;  // log2
};

/// Picks the next event over vocab_events only: the most probable (Up) or
/// least probable (Down) one, ties going to the smallest canonical text.
/// Throws Error{EmptyVocabulary}.
ScenarioStep choose_next(const NGramModel& m, std::span<const Token> history, Flavor flavor);

/// Greedy k-step extension of `history`; each choice is fed back.
Scenario generate(const NGramModel& m, std::span<const Token> history, std::size_t k, Flavor flavor);

/// Incremental form of generate. Single owner; not safe for concurrent
/// stepping.
class GenerationSession {
public:
    GenerationSession(std::shared_ptr<const NGramModel> model, std::vector<Token> seed_history, Flavor flavor,
                      std::size_t limit);

    /// Throws Error{SessionExhausted} once `limit` events have been emitted.
    ScenarioStep step();

    std::size_t emitted() const noexcept { return emitted_; }
    std::size_t limit() const noexcept { return limit_; }
    std::size_t remaining() const noexcept { return limit_ - emitted_; }
    Flavor flavor() const noexcept { return flavor_; }
    const NGramModel& model() const noexcept { return *model_; }

    /// seed history followed by every emitted event.
    const std::vector<Token>& cursor() const noexcept { return cursor_; }
    std::span<const Token> emitted_events() const noexcept;

    /// The scenario emitted so far.
    Scenario scenario() const;

private:
    std::shared_ptr<const NGramModel> model_;
    Flavor flavor_;
    std::size_t limit_;
    std::size_t seed_size_;
    std::size_t emitted_ = 0;
    std::vector<Token> cursor_;
    std::vector<double> logprobs_;
};

/// `token<TAB>log2_prob` lines, six decimals.
std::string scenario_to_tsv(const Scenario& sc);
void write_scenario_file(const Scenario& sc, const std::string& path);

/// Writes `up.tsv` and `down.tsv` into `directory`; returns both paths.
/// Throws Error{IoFailure}.
std::vector<std::string> write_outputs(const Scenario& up, const Scenario& down, const std::string& directory);

/// Reads the first column of a scenario TSV (a bare token list also works).
std::vector<Token> read_scenario_tokens(const std::string& path);

}  // namespace helion
