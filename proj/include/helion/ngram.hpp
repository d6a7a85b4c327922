#pragma once

#include "helion/scheduler.hpp"
#include "helion/token.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace helion {

inline constexpr int kMinOrder = 2;
inline constexpr int kMaxOrder = 5;

struct ModelConfig {
    int order = 3;
    /// nullopt selects per-order discounts estimated from count-of-counts.
    std::optional<double> fixed_discount;

    friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct Candidate {
    Symbol symbol;
    std::string text;
    double prob = 0.0;
};

/// Order-n event model with interpolated absolute discounting.
///
/// The highest order uses raw counts; every lower order uses continuation
/// counts (the number of distinct left extensions), and the unigram level is
/// interpolated with a uniform floor over vocab + `</s>` + `<unk>`:
///
///   P_k(w | h) = max(c_k(h w) - D_k, 0) / c_k(h)
///              + D_k * N_k(h) / c_k(h) * P_{k-1}(w | h')
///
/// where c_k(h) sums c_k(h w) over w and N_k(h) counts the distinct w.
/// A context never seen at level k contributes P_{k-1} unchanged.
///
/// Immutable once built.
class NGramModel {
public:
    using Id = std::uint32_t;
    using Gram = std::vector<Id>;

    static NGramModel train(const EventCorpus& corpus, const ModelConfig& cfg);

    const ModelConfig& config() const noexcept { return config_; }
    int order() const noexcept { return config_.order; }
    const std::vector<Token>& vocab_events() const noexcept { return vocab_; }
    std::size_t total_events() const noexcept { return total_events_; }

    /// Discount used at level k (1 = unigram .. order).
    double discount(int k) const;

    /// p(next | last order-1 items of history). `next` may be any token
    /// (out-of-vocabulary maps to `<unk>`), `</s>` or `<unk>`; `<s>` throws
    /// std::invalid_argument.
    double prob(const Symbol& next, std::span<const Token> history) const;

    /// Candidates vocab + `</s>`, descending probability, ties by text.
    std::vector<Candidate> next_distribution(std::span<const Token> history) const;

    /// Occurrences of `gram` ending at a predicted position in the padded
    /// training sequences. Grams longer than the order return 0.
    std::uint64_t count(std::span<const Symbol> gram) const;

    /// The count level k actually interpolates with: raw at the top order,
    /// continuation counts below.
    std::uint64_t adjusted_count(std::span<const Symbol> gram) const;

    /// c_k(h) for |h| = k - 1, i.e. the sum of adjusted extensions.
    std::uint64_t context_total(std::span<const Symbol> context) const;

    nlohmann::json to_json() const;
    static NGramModel from_json(const nlohmann::json& doc);

    void save(const std::string& path) const;
    static NGramModel load(const std::string& path);

private:
    struct GramHash {
        std::size_t operator()(const Gram& g) const noexcept;
    };
    struct ContextStats {
        std::uint64_t total = 0;
        std::uint64_t distinct = 0;
    };
    struct Level {
        std::unordered_map<Gram, std::uint64_t, GramHash> adjusted;
        std::unordered_map<Gram, ContextStats, GramHash> contexts;
        double discount = 0.5;
    };

    static constexpr Id kStartId = 0;
    static constexpr Id kEndId = 1;
    static constexpr Id kUnknownId = 2;
    static constexpr Id kFirstTokenId = 3;

    NGramModel(ModelConfig cfg, std::vector<Token> vocab, std::vector<std::map<Gram, std::uint64_t>> raw,
               std::size_t total_events);

    Id id_of(const Symbol& s) const;
    Id id_of(const Token& t) const;
    std::string text_of(Id id) const;
    Symbol symbol_of(Id id) const;
    Gram context_ids(std::span<const Token> history) const;
    double prob_id(Id next, const Gram& context) const;
    std::optional<Gram> gram_ids(std::span<const Symbol> gram) const;

    ModelConfig config_;
    std::vector<Token> vocab_;
    std::unordered_map<std::string, Id> ids_;
    std::vector<std::map<Gram, std::uint64_t>> raw_;  // raw_[k - 1] holds k-grams
    std::vector<Level> levels_;                        // levels_[k - 1]
    std::size_t total_events_ = 0;
};

NGramModel train(const EventCorpus& corpus, const ModelConfig& cfg);
double prob(const NGramModel& m, const Symbol& next, std::span<const Token> history);

/// log2 p(sequence) including the terminal `</s>`. Throws Error{EmptySequence}.
double sequence_logprob(const NGramModel& m, const EventSequence& seq);

/// 2^(-sum log2 p / T), T = tokens + one `</s>` per sequence. Throws Error{EmptyCorpus}.
double perplexity(const NGramModel& m, const EventCorpus& corpus);

std::vector<Candidate> next_distribution(const NGramModel& m, std::span<const Token> history);

}  // namespace helion
