#include "helion/ngram.hpp"

#include "helion/error.hpp"
#include "helion/text.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace helion {
namespace {

constexpr double kMinDiscount = 0.05;
constexpr double kMaxDiscount = 0.95;
constexpr const char* kFormatName = "helion-ngram";
constexpr int kFormatVersion = 1;

void check_config(const ModelConfig& cfg) {
    if (cfg.order < kMinOrder || cfg.order > kMaxOrder) {
        throw std::invalid_argument("model order must lie in [2, 5]");
    }
    if (cfg.fixed_discount && !(*cfg.fixed_discount > 0.0 && *cfg.fixed_discount < 1.0)) {
        throw std::invalid_argument("fixed discount must lie in (0, 1)");
    }
}

double estimate_discount(std::uint64_t n1, std::uint64_t n2) {
    if (n1 + 2 * n2 == 0) return 0.5;
    double d = static_cast<double>(n1) / static_cast<double>(n1 + 2 * n2);
    return std::clamp(d, kMinDiscount, kMaxDiscount);
}

[[noreturn]] void malformed_model(const std::string& why) {
    throw Error(ErrorCode::MalformedModel, "model dump: " + why);
}

}  // namespace

std::size_t NGramModel::GramHash::operator()(const Gram& g) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (Id id : g) {
        h ^= id;
        h *= 1099511628211ull;
    }
    return h;
}

NGramModel::NGramModel(ModelConfig cfg, std::vector<Token> vocab, std::vector<std::map<Gram, std::uint64_t>> raw,
                       std::size_t total_events)
    : config_(std::move(cfg)), vocab_(std::move(vocab)), raw_(std::move(raw)), total_events_(total_events) {
    for (std::size_t i = 0; i < vocab_.size(); ++i) ids_.emplace(vocab_[i].text(), kFirstTokenId + static_cast<Id>(i));

    const int n = config_.order;
    levels_.resize(static_cast<std::size_t>(n));

    // Top order interpolates raw counts; lower orders count distinct left
    // extensions of each gram one order up.
    for (const auto& [gram, c] : raw_[static_cast<std::size_t>(n - 1)]) {
        levels_[static_cast<std::size_t>(n - 1)].adjusted.emplace(gram, c);
    }
    for (int k = n - 1; k >= 1; --k) {
        auto& adjusted = levels_[static_cast<std::size_t>(k - 1)].adjusted;
        for (const auto& [gram, c] : raw_[static_cast<std::size_t>(k)]) {
            adjusted[Gram(gram.begin() + 1, gram.end())] += 1;
        }
    }

    for (int k = 1; k <= n; ++k) {
        Level& level = levels_[static_cast<std::size_t>(k - 1)];
        std::uint64_t n1 = 0, n2 = 0;
        for (const auto& [gram, c] : level.adjusted) {
            ContextStats& ctx = level.contexts[Gram(gram.begin(), gram.end() - 1)];
            ctx.total += c;
            ctx.distinct += 1;
            n1 += (c == 1);
            n2 += (c == 2);
        }
        level.discount = config_.fixed_discount ? *config_.fixed_discount : estimate_discount(n1, n2);
    }
}

NGramModel NGramModel::train(const EventCorpus& corpus, const ModelConfig& cfg) {
    check_config(cfg);
    std::set<std::string> texts;
    std::vector<Token> vocab;
    for (const auto& seq : corpus.sequences) {
        for (const auto& t : seq.tokens) {
            if (texts.insert(t.text()).second) vocab.push_back(t);
        }
    }
    if (vocab.empty()) throw Error(ErrorCode::EmptyCorpus, "corpus has no events");
    std::sort(vocab.begin(), vocab.end(), [](const Token& a, const Token& b) { return a.text() < b.text(); });

    std::unordered_map<std::string, Id> ids;
    for (std::size_t i = 0; i < vocab.size(); ++i) ids.emplace(vocab[i].text(), kFirstTokenId + static_cast<Id>(i));

    const auto n = static_cast<std::size_t>(cfg.order);
    std::vector<std::map<Gram, std::uint64_t>> raw(n);
    std::size_t total = 0;
    std::vector<Id> padded;
    for (const auto& seq : corpus.sequences) {
        if (seq.tokens.empty()) continue;
        total += seq.tokens.size();
        padded.assign(n - 1, kStartId);
        for (const auto& t : seq.tokens) padded.push_back(ids.at(t.text()));
        padded.push_back(kEndId);
        for (std::size_t i = n - 1; i < padded.size(); ++i) {
            for (std::size_t k = 1; k <= n; ++k) {
                raw[k - 1][Gram(padded.begin() + static_cast<std::ptrdiff_t>(i + 1 - k),
                                padded.begin() + static_cast<std::ptrdiff_t>(i + 1))] += 1;
            }
        }
    }
    return NGramModel(cfg, std::move(vocab), std::move(raw), total);
}

double NGramModel::discount(int k) const {
    if (k < 1 || k > config_.order) throw std::out_of_range("discount level out of range");
    return levels_[static_cast<std::size_t>(k - 1)].discount;
}

NGramModel::Id NGramModel::id_of(const Token& t) const {
    auto it = ids_.find(t.text());
    return it == ids_.end() ? kUnknownId : it->second;
}

NGramModel::Id NGramModel::id_of(const Symbol& s) const {
    if (const Token* t = std::get_if<Token>(&s)) return id_of(*t);
    switch (std::get<SpecialToken>(s)) {
        case SpecialToken::SequenceStart: return kStartId;
        case SpecialToken::SequenceEnd: return kEndId;
        case SpecialToken::Unknown: return kUnknownId;
    }
    return kUnknownId;
}

std::string NGramModel::text_of(Id id) const { return format_token(symbol_of(id)); }

Symbol NGramModel::symbol_of(Id id) const {
    switch (id) {
        case kStartId: return SpecialToken::SequenceStart;
        case kEndId: return SpecialToken::SequenceEnd;
        case kUnknownId: return SpecialToken::Unknown;
        default: return vocab_[id - kFirstTokenId];
    }
}

NGramModel::Gram NGramModel::context_ids(std::span<const Token> history) const {
    const std::size_t width = static_cast<std::size_t>(config_.order - 1);
    Gram ctx(width, kStartId);
    const std::size_t take = std::min(width, history.size());
    for (std::size_t i = 0; i < take; ++i) {
        ctx[width - take + i] = id_of(history[history.size() - take + i]);
    }
    return ctx;
}

double NGramModel::prob_id(Id next, const Gram& context) const {
    double p = 1.0 / static_cast<double>(vocab_.size() + 2);
    Gram key;
    key.reserve(context.size() + 1);
    for (std::size_t k = 1; k <= levels_.size(); ++k) {
        const Level& level = levels_[k - 1];
        key.assign(context.end() - static_cast<std::ptrdiff_t>(k - 1), context.end());
        auto ctx = level.contexts.find(key);
        if (ctx == level.contexts.end()) continue;
        key.push_back(next);
        auto hit = level.adjusted.find(key);
        const double c = hit == level.adjusted.end() ? 0.0 : static_cast<double>(hit->second);
        const double total = static_cast<double>(ctx->second.total);
        const double backoff = level.discount * static_cast<double>(ctx->second.distinct) / total;
        p = std::max(c - level.discount, 0.0) / total + backoff * p;
    }
    return p;
}

double NGramModel::prob(const Symbol& next, std::span<const Token> history) const {
    Id id = id_of(next);
    if (id == kStartId) throw std::invalid_argument("<s> is never predicted");
    return prob_id(id, context_ids(history));
}

std::vector<Candidate> NGramModel::next_distribution(std::span<const Token> history) const {
    const Gram ctx = context_ids(history);
    std::vector<Candidate> out;
    out.reserve(vocab_.size() + 1);
    out.push_back({SpecialToken::SequenceEnd, std::string(kSequenceEndText), prob_id(kEndId, ctx)});
    for (std::size_t i = 0; i < vocab_.size(); ++i) {
        out.push_back({vocab_[i], vocab_[i].text(), prob_id(kFirstTokenId + static_cast<Id>(i), ctx)});
    }
    std::stable_sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
        if (a.prob != b.prob) return a.prob > b.prob;
        return a.text < b.text;
    });
    return out;
}

std::optional<NGramModel::Gram> NGramModel::gram_ids(std::span<const Symbol> gram) const {
    Gram ids;
    for (const auto& s : gram) {
        Id id = id_of(s);
        if (id == kUnknownId && std::holds_alternative<Token>(s)) return std::nullopt;
        ids.push_back(id);
    }
    return ids;
}

std::uint64_t NGramModel::count(std::span<const Symbol> gram) const {
    if (gram.empty() || gram.size() > raw_.size()) return 0;
    auto ids = gram_ids(gram);
    if (!ids) return 0;
    const auto& table = raw_[gram.size() - 1];
    auto it = table.find(*ids);
    return it == table.end() ? 0 : it->second;
}

std::uint64_t NGramModel::adjusted_count(std::span<const Symbol> gram) const {
    if (gram.empty() || gram.size() > levels_.size()) return 0;
    auto ids = gram_ids(gram);
    if (!ids) return 0;
    const auto& table = levels_[gram.size() - 1].adjusted;
    auto it = table.find(*ids);
    return it == table.end() ? 0 : it->second;
}

std::uint64_t NGramModel::context_total(std::span<const Symbol> context) const {
    if (context.size() >= levels_.size()) return 0;
    auto ids = gram_ids(context);
    if (!ids) return 0;
    const auto& table = levels_[context.size()].contexts;
    auto it = table.find(*ids);
    return it == table.end() ? 0 : it->second.total;
}

nlohmann::json NGramModel::to_json() const {
    nlohmann::json vocab = nlohmann::json::array();
    for (const auto& t : vocab_) vocab.push_back(t.text());
    nlohmann::json counts = nlohmann::json::array();
    for (const auto& table : raw_) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& [gram, c] : table) rows.push_back({gram, c});
        counts.push_back(std::move(rows));
    }
    nlohmann::json discounts = nlohmann::json::array();
    for (const auto& level : levels_) discounts.push_back(level.discount);
    nlohmann::json discount_mode =
        config_.fixed_discount ? nlohmann::json(*config_.fixed_discount) : nlohmann::json("auto");
    return {
        {"format", kFormatName},
        {"version", kFormatVersion},
        {"order", config_.order},
        {"discount_mode", discount_mode},
        {"total_events", total_events_},
        {"vocab", std::move(vocab)},
        {"discounts", std::move(discounts)},
        {"counts", std::move(counts)},
    };
}

NGramModel NGramModel::from_json(const nlohmann::json& doc) {
    try {
        if (doc.value("format", "") != kFormatName) malformed_model("not a helion model");
        if (doc.at("version").get<int>() != kFormatVersion) malformed_model("unsupported version");
        ModelConfig cfg;
        cfg.order = doc.at("order").get<int>();
        const auto& mode = doc.at("discount_mode");
        if (mode.is_number()) {
            cfg.fixed_discount = mode.get<double>();
        } else if (mode != "auto") {
            malformed_model("bad discount_mode");
        }
        try {
            check_config(cfg);
        } catch (const std::invalid_argument& e) {
            malformed_model(e.what());
        }

        std::vector<Token> vocab;
        for (const auto& t : doc.at("vocab")) vocab.push_back(parse_event(t.get<std::string>()));
        if (vocab.empty()) malformed_model("empty vocabulary");
        for (std::size_t i = 1; i < vocab.size(); ++i) {
            if (!(vocab[i - 1].text() < vocab[i].text())) malformed_model("vocab must be sorted and distinct");
        }
        const Id id_limit = kFirstTokenId + static_cast<Id>(vocab.size());

        const auto n = static_cast<std::size_t>(cfg.order);
        const auto& counts = doc.at("counts");
        if (!counts.is_array() || counts.size() != n) malformed_model("counts must have one table per order");
        std::vector<std::map<Gram, std::uint64_t>> raw(n);
        for (std::size_t k = 1; k <= n; ++k) {
            for (const auto& row : counts[k - 1]) {
                auto gram = row.at(0).get<Gram>();
                auto c = row.at(1).get<std::uint64_t>();
                if (gram.size() != k || c == 0) malformed_model("bad count row");
                for (Id id : gram) {
                    if (id >= id_limit || id == kUnknownId) malformed_model("id out of range");
                }
                raw[k - 1][std::move(gram)] = c;
            }
        }
        // Every lower-order table must be the marginal of the one above it.
        for (std::size_t k = n; k > 1; --k) {
            std::map<Gram, std::uint64_t> marginal;
            for (const auto& [gram, c] : raw[k - 1]) marginal[Gram(gram.begin() + 1, gram.end())] += c;
            if (marginal != raw[k - 2]) malformed_model("inconsistent counts at order " + std::to_string(k - 1));
        }
        return NGramModel(cfg, std::move(vocab), std::move(raw), doc.at("total_events").get<std::size_t>());
    } catch (const nlohmann::json::exception& e) {
        malformed_model(e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::MalformedModel) throw;
        malformed_model(e.what());
    }
}

void NGramModel::save(const std::string& path) const { write_file_atomic(path, to_json().dump() + "\n"); }

NGramModel NGramModel::load(const std::string& path) {
    std::string text = read_file(path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        malformed_model(e.what());
    }
    return from_json(doc);
}

NGramModel train(const EventCorpus& corpus, const ModelConfig& cfg) { return NGramModel::train(corpus, cfg); }

double prob(const NGramModel& m, const Symbol& next, std::span<const Token> history) {
    return m.prob(next, history);
}

double sequence_logprob(const NGramModel& m, const EventSequence& seq) {
    if (seq.tokens.empty()) throw Error(ErrorCode::EmptySequence, "cannot score an empty sequence");
    std::span<const Token> tokens(seq.tokens);
    double total = 0.0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        total += std::log2(m.prob(tokens[i], tokens.first(i)));
    }
    total += std::log2(m.prob(SpecialToken::SequenceEnd, tokens));
    return total;
}

double perplexity(const NGramModel& m, const EventCorpus& corpus) {
    double logprob = 0.0;
    std::size_t positions = 0;
    for (const auto& seq : corpus.sequences) {
        if (seq.tokens.empty()) continue;
        logprob += sequence_logprob(m, seq);
        positions += seq.tokens.size() + 1;
    }
    if (positions == 0) throw Error(ErrorCode::EmptyCorpus, "perplexity needs a nonempty corpus");
    return std::exp2(-logprob / static_cast<double>(positions));
}

std::vector<Candidate> next_distribution(const NGramModel& m, std::span<const Token> history) {
    return m.next_distribution(history);
}

}  // namespace helion
