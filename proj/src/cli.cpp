#include "helion/cli.hpp"

#include "helion/error.hpp"
#include "helion/home.hpp"
#include "helion/ngram.hpp"
#include "helion/routine.hpp"
#include "helion/scenario.hpp"
#include "helion/scheduler.hpp"
#include "helion/service.hpp"
#include "helion/text.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <cstdlib>
#include <filesystem>
#include <set>

namespace helion {
namespace {

struct Options {
    std::uint64_t seed = 0;
    std::string vocab_path;
    bool json = false;

    std::string routines_path;
    int days = 30;
    std::string out_path;

    std::string corpus_path;
    int order = 3;

    std::string model_path;
    std::string history;
    std::size_t k = 10;
    std::string flavor = "up";
    std::string out_dir = ".";

    std::string scenario_path;
    std::string policies_path;

    std::string host;
    int port = 0;
};

std::vector<Token> parse_history_arg(const std::string& arg) {
    std::vector<Token> out;
    for (auto part : split(arg, ';')) {
        if (!part.empty()) out.push_back(parse_event(part));
    }
    return out;
}

std::optional<Vocabulary> load_vocab_option(const Options& o) {
    if (o.vocab_path.empty()) return std::nullopt;
    return load_vocabulary_file(o.vocab_path);
}

int cmd_schedule(const Options& o, std::ostream& out) {
    auto vocab = load_vocab_option(o);
    auto users = load_user_routines_file(o.routines_path, vocab ? &*vocab : nullptr);
    ScheduleConfig cfg;
    cfg.days = o.days;
    cfg.seed = o.seed;
    auto plan = plan_users(std::move(users), cfg);
    EventCorpus corpus = build_corpus(plan);
    write_file_atomic(o.out_path, corpus_to_tsv(corpus));
    out << "wrote " << corpus.sequences.size() << " sequences (" << corpus.event_count() << " events) to "
        << o.out_path << "\n";
    return kExitOk;
}

int cmd_train(const Options& o, std::ostream& out) {
    EventCorpus corpus = read_corpus_file(o.corpus_path);
    NGramModel m = NGramModel::train(corpus, ModelConfig{o.order, std::nullopt});
    m.save(o.out_path);
    out << "trained order-" << m.order() << " model over " << m.vocab_events().size() << " event types ("
        << m.total_events() << " events) -> " << o.out_path << "\n";
    return kExitOk;
}

int cmd_generate(const Options& o, std::ostream& out) {
    NGramModel m = NGramModel::load(o.model_path);
    Flavor flavor = *parse_flavor(o.flavor);
    Scenario sc = generate(m, parse_history_arg(o.history), o.k, flavor);
    std::error_code ec;
    std::filesystem::create_directories(o.out_dir, ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot create output directory", o.out_dir);
    auto path = (std::filesystem::path(o.out_dir) / (std::string(to_string(flavor)) + ".tsv")).string();
    write_scenario_file(sc, path);
    out << path << "\n";
    return kExitOk;
}

int cmd_execute(const Options& o, std::ostream& out, std::ostream& err) {
    NGramModel m = NGramModel::load(o.model_path);
    auto vocab = load_vocab_option(o);
    PlatformState ps = build_registry(vocab ? *vocab : derive_vocabulary(m.vocab_events()));
    std::vector<PolicyRule> policies;
    if (!o.policies_path.empty()) policies = load_policies_file(o.policies_path, ps);
    std::vector<Token> events = read_scenario_tokens(o.scenario_path);

    ExecutionReport report = execute_scenario(ps, events, {}, policies);
    if (o.json) {
        nlohmann::json j = to_json(report);
        j["snapshot"] = ps.snapshot();
        out << j.dump(2) << "\n";
    } else {
        out << "applied " << report.applied.size() << " events, " << report.automation_firings.size()
            << " automation firings, " << report.chain_limit_hits << " chain-limit hits, "
            << report.violations.size() << " violations\n";
        for (const auto& v : report.violations) {
            out << "  [" << to_string(v.severity) << "] seq " << v.seq_no << " " << v.rule_id << ": "
                << v.description << "\n";
        }
    }
    if (report.error) {
        err << "error: " << report.error->message << " (token " << report.error->token << ")\n";
        return kExitDomain;
    }
    return kExitOk;
}

int cmd_stats(const Options& o, std::ostream& out) {
    EventCorpus corpus = read_corpus_file(o.corpus_path);
    std::set<std::string> distinct;
    for (const auto& seq : corpus.sequences) {
        for (const auto& t : seq.tokens) distinct.insert(t.text());
    }
    if (o.json) {
        out << nlohmann::json{{"sequences", corpus.sequences.size()},
                              {"events", corpus.event_count()},
                              {"vocabulary_size", distinct.size()}}
                   .dump()
            << "\n";
    } else {
        out << "sequences\t" << corpus.sequences.size() << "\n"
            << "events\t" << corpus.event_count() << "\n"
            << "vocabulary\t" << distinct.size() << "\n";
    }
    return kExitOk;
}

int cmd_serve(const Options& o, std::ostream& out, std::ostream& err) {
    std::string host = o.host;
    int port = o.port;
    if (host.empty()) {
        const char* env = std::getenv("HELION_HOST");
        host = env ? env : "127.0.0.1";
    }
    if (port == 0) {
        const char* env = std::getenv("HELION_PORT");
        try {
            port = env ? std::stoi(env) : 8080;
        } catch (const std::exception&) {
            err << "error: HELION_PORT is not a number\n";
            return kExitUsage;
        }
    }
    ServiceOptions options;
    options.vocabulary = load_vocab_option(o);
    Service service(std::move(options));
    httplib::Server server;
    service.bind(server);
    if (!server.bind_to_port(host, port)) {
        err << "error: cannot listen on " << host << ":" << port << "\n";
        return kExitDomain;
    }
    out << "listening on http://" << host << ":" << port << "\n" << std::flush;
    server.listen_after_bind();
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"helion: natural smart-home scenario generation and execution", "helion"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--seed", o.seed, "Seed for every randomized stage");
    app.add_option("--vocab", o.vocab_path, "Vocabulary TSV")->check(CLI::ExistingFile);
    app.add_flag("--json", o.json, "Machine-readable output (stats, execute)");

    auto* schedule = app.add_subcommand("schedule", "Build an event corpus from routines");
    schedule->add_option("--routines", o.routines_path, "Routine JSON file")->required()->check(CLI::ExistingFile);
    schedule->add_option("--days", o.days, "Days per sequence")->check(CLI::PositiveNumber);
    schedule->add_option("--out", o.out_path, "Corpus TSV output")->required();

    auto* train_cmd = app.add_subcommand("train", "Train an n-gram model on a corpus");
    train_cmd->add_option("--corpus", o.corpus_path, "Corpus TSV")->required()->check(CLI::ExistingFile);
    train_cmd->add_option("--order", o.order, "Model order")->check(CLI::Range(kMinOrder, kMaxOrder));
    train_cmd->add_option("--out", o.out_path, "Model output")->required();

    auto* generate_cmd = app.add_subcommand("generate", "Generate an up or down scenario");
    generate_cmd->add_option("--model", o.model_path, "Model file")->required()->check(CLI::ExistingFile);
    generate_cmd->add_option("--history", o.history, "Seed events, separated by ';'");
    generate_cmd->add_option("--k", o.k, "Events to generate")->check(CLI::Range(1, 1000000));
    generate_cmd->add_option("--flavor", o.flavor, "up or down")->check(CLI::IsMember({"up", "down"}));
    generate_cmd->add_option("--out-dir", o.out_dir, "Directory for up.tsv / down.tsv");

    auto* execute_cmd = app.add_subcommand("execute", "Run a scenario on the virtual home");
    execute_cmd->add_option("--model", o.model_path, "Model file")->required()->check(CLI::ExistingFile);
    execute_cmd->add_option("--scenario", o.scenario_path, "Scenario TSV")->required()->check(CLI::ExistingFile);
    execute_cmd->add_option("--policies", o.policies_path, "Policy JSON")->check(CLI::ExistingFile);

    auto* stats = app.add_subcommand("stats", "Corpus statistics");
    stats->add_option("--corpus", o.corpus_path, "Corpus TSV")->required()->check(CLI::ExistingFile);

    auto* serve = app.add_subcommand("serve", "Run the HTTP API");
    serve->add_option("--host", o.host, "Listen address (env HELION_HOST)");
    serve->add_option("--port", o.port, "Listen port (env HELION_PORT)")->check(CLI::Range(1, 65535));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*schedule) return cmd_schedule(o, out);
        if (*train_cmd) return cmd_train(o, out);
        if (*generate_cmd) return cmd_generate(o, out);
        if (*execute_cmd) return cmd_execute(o, out, err);
        if (*stats) return cmd_stats(o, out);
        if (*serve) return cmd_serve(o, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what();
        if (!e.detail().empty()) err << " [" << e.detail() << "]";
        err << "\n";
        return kExitDomain;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomain;
    }
    return kExitUsage;
}

}  // namespace helion
