#include "helion/scenario.hpp"

#include "helion/error.hpp"
#include "helion/text.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace helion {

std::string_view to_string(Flavor f) noexcept { return f == Flavor::Up ? "up" : "down"; }

std::optional<Flavor> parse_flavor(std::string_view s) noexcept {
    if (s == "up") return Flavor::Up;
    if (s == "down") return Flavor::Down;
    return std::nullopt;
}

ScenarioStep choose_next(const NGramModel& m, std::span<const Token> history, Flavor flavor) {
    const auto& vocab = m.vocab_events();
    if (vocab.empty()) throw Error(ErrorCode::EmptyVocabulary, "model has no events to generate");

    // vocab_events is sorted by canonical text, so a strict comparison keeps
    // the lexicographically first of equal candidates.
    std::size_t best = 0;
    double best_p = m.prob(vocab[0], history);
    for (std::size_t i = 1; i < vocab.size(); ++i) {
        double p = m.prob(vocab[i], history);
        bool better = flavor == Flavor::Up ? p > best_p : p < best_p;
        if (better) {
            best = i;
            best_p = p;
        }
    }
    return {vocab[best], std::log2(best_p)};
}

Scenario generate(const NGramModel& m, std::span<const Token> history, std::size_t k, Flavor flavor) {
    if (k == 0) throw std::invalid_argument("generate needs k >= 1");
    Scenario sc{{history.begin(), history.end()}, {}, flavor, m.order(), {}};
    std::vector<Token> working(history.begin(), history.end());
    for (std::size_t i = 0; i < k; ++i) {
        ScenarioStep next = choose_next(m, working, flavor);
        working.push_back(next.event);
        sc.events.push_back(std::move(next.event));
        sc.per_event_logprob.push_back(next.logprob);
    }
    return sc;
}

GenerationSession::GenerationSession(std::shared_ptr<const NGramModel> model, std::vector<Token> seed_history,
                                     Flavor flavor, std::size_t limit)
    : model_(std::move(model)), flavor_(flavor), limit_(limit), seed_size_(seed_history.size()),
      cursor_(std::move(seed_history)) {
    if (!model_) throw std::invalid_argument("session needs a model");
}

ScenarioStep GenerationSession::step() {
    if (emitted_ >= limit_) throw Error(ErrorCode::SessionExhausted, "session has no events left");
    ScenarioStep next = choose_next(*model_, cursor_, flavor_);
    cursor_.push_back(next.event);
    logprobs_.push_back(next.logprob);
    ++emitted_;
    return next;
}

std::span<const Token> GenerationSession::emitted_events() const noexcept {
    return std::span<const Token>(cursor_).subspan(seed_size_);
}

Scenario GenerationSession::scenario() const {
    auto seed = std::span<const Token>(cursor_).first(seed_size_);
    auto events = emitted_events();
    return Scenario{{seed.begin(), seed.end()}, {events.begin(), events.end()}, flavor_, model_->order(), logprobs_};
}

std::string scenario_to_tsv(const Scenario& sc) {
    std::string out;
    for (std::size_t i = 0; i < sc.events.size(); ++i) {
        out += sc.events[i].text();
        out += '\t';
        out += format_fixed(sc.per_event_logprob.at(i), 6);
        out += '\n';
    }
    return out;
}

void write_scenario_file(const Scenario& sc, const std::string& path) { write_file_atomic(path, scenario_to_tsv(sc)); }

std::vector<std::string> write_outputs(const Scenario& up, const Scenario& down, const std::string& directory) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(directory, ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot create output directory", directory);
    std::string up_path = (fs::path(directory) / "up.tsv").string();
    std::string down_path = (fs::path(directory) / "down.tsv").string();
    write_scenario_file(up, up_path);
    write_scenario_file(down, down_path);
    return {up_path, down_path};
}

std::vector<Token> read_scenario_tokens(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open scenario file", path);
    std::vector<Token> tokens;
    std::string line;
    while (std::getline(in, line)) {
        strip_cr(line);
        if (line.empty()) continue;
        tokens.push_back(parse_event(split(line, '\t').front()));
    }
    return tokens;
}

}  // namespace helion
