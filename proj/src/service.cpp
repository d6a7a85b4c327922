#include "helion/service.hpp"

#include "helion/error.hpp"
#include "helion/routine.hpp"
#include "helion/scheduler.hpp"
#include "helion/text.hpp"

#include <httplib.h>
#include <openssl/evp.h>

#include <cmath>
#include <random>
#include <sstream>

namespace helion {
namespace {

using nlohmann::json;

ApiResponse fail(int status, std::string_view code, const std::string& message, json detail = nullptr) {
    return {status, error_body(code, message, std::move(detail))};
}

std::optional<json> parse_body(const std::string& body, ApiResponse& error) {
    if (body.empty()) {
        error = fail(400, "malformed_request", "request body is empty");
        return std::nullopt;
    }
    try {
        json doc = json::parse(body);
        if (!doc.is_object()) {
            error = fail(400, "malformed_request", "request body must be a JSON object");
            return std::nullopt;
        }
        return doc;
    } catch (const json::parse_error& e) {
        error = fail(400, "malformed_request", std::string("invalid JSON: ") + e.what());
        return std::nullopt;
    }
}

/// Parses a JSON array of token texts; nullopt (and `error`) on failure.
std::optional<std::vector<Token>> parse_history(const json& value, ApiResponse& error) {
    if (value.is_null()) return std::vector<Token>{};
    if (!value.is_array()) {
        error = fail(400, "malformed_request", "history must be an array of token strings");
        return std::nullopt;
    }
    std::vector<Token> out;
    for (const auto& item : value) {
        if (!item.is_string()) {
            error = fail(400, "malformed_token", "history entries must be strings");
            return std::nullopt;
        }
        try {
            out.push_back(parse_event(item.get<std::string>()));
        } catch (const Error& e) {
            error = fail(400, to_string(e.code()), e.what(), {{"token", item}});
            return std::nullopt;
        }
    }
    return out;
}

std::optional<Flavor> parse_flavor_field(const json& doc, ApiResponse& error) {
    auto it = doc.find("flavor");
    if (it == doc.end()) return Flavor::Up;
    std::optional<Flavor> f = it->is_string() ? parse_flavor(it->get<std::string>()) : std::nullopt;
    if (!f) error = fail(400, "malformed_request", "flavor must be \"up\" or \"down\"");
    return f;
}

std::optional<std::size_t> positive_field(const json& doc, const char* key, std::size_t fallback, std::size_t max,
                                          ApiResponse& error) {
    auto it = doc.find(key);
    if (it == doc.end()) return fallback;
    if (!it->is_number_integer() || it->get<long long>() < 1 || it->get<unsigned long long>() > max) {
        error = fail(400, "malformed_request", std::string(key) + " must be an integer in [1, " +
                                                   std::to_string(max) + "]");
        return std::nullopt;
    }
    return it->get<std::size_t>();
}

std::string new_session_id() {
    static std::mutex mutex;
    static std::mt19937_64 rng{std::random_device{}()};
    std::lock_guard lock(mutex);
    std::ostringstream ss;
    ss << std::hex << rng() << rng();
    return "s-" + ss.str();
}

json tokens_json(std::span<const Token> tokens) {
    json out = json::array();
    for (const auto& t : tokens) out.push_back(t.text());
    return out;
}

}  // namespace

json error_body(std::string_view code, const std::string& message, json detail) {
    return {{"error_code", code}, {"message", message}, {"detail", std::move(detail)}};
}

Service::Service(ServiceOptions options) : options_(std::move(options)) {
    if (options_.vocabulary && !options_.vocabulary->empty()) {
        platform_ = PlatformState::build_registry(*options_.vocabulary);
    }
}

std::string Service::model_id_for(const NGramModel& m) {
    const std::string dump = m.to_json().dump();
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(dump.data(), dump.size(), digest, &len, EVP_sha256(), nullptr);
    static constexpr char hex[] = "0123456789abcdef";
    std::string id = "m-";
    for (unsigned int i = 0; i < 8 && i < len; ++i) {
        id += hex[digest[i] >> 4];
        id += hex[digest[i] & 0xf];
    }
    return id;
}

std::shared_ptr<const NGramModel> Service::model(const std::string& model_id) const {
    std::shared_lock lock(models_mutex_);
    auto it = models_.find(model_id);
    return it == models_.end() ? nullptr : it->second;
}

ApiResponse Service::train(const std::string& body) {
    ApiResponse error;
    auto doc = parse_body(body, error);
    if (!doc) return error;

    ModelConfig cfg;
    if (auto it = doc->find("order"); it != doc->end()) {
        if (!it->is_number_integer() || it->get<int>() < kMinOrder || it->get<int>() > kMaxOrder) {
            return fail(400, "malformed_request", "order must be an integer in [2, 5]");
        }
        cfg.order = it->get<int>();
    }

    std::optional<NGramModel> trained;
    try {
        if (auto it = doc->find("model_path"); it != doc->end() && it->is_string()) {
            trained = NGramModel::load(it->get<std::string>());
        } else {
            EventCorpus corpus;
            if (auto c = doc->find("corpus"); c != doc->end() && c->is_string()) {
                std::istringstream in(c->get<std::string>());
                corpus = read_corpus(in);
            } else if (auto p = doc->find("corpus_path"); p != doc->end() && p->is_string()) {
                corpus = read_corpus_file(p->get<std::string>());
            } else {
                return fail(400, "malformed_request", "body needs 'corpus' (TSV text) or 'corpus_path'");
            }
            trained = NGramModel::train(corpus, cfg);
        }
    } catch (const Error& e) {
        int status = e.code() == ErrorCode::EmptyCorpus ? 422 : 400;
        return fail(status, to_string(e.code()), e.what(), e.detail().empty() ? json() : json(e.detail()));
    }

    std::string id = model_id_for(*trained);
    auto shared = std::make_shared<const NGramModel>(std::move(*trained));
    {
        std::unique_lock lock(models_mutex_);
        auto [it, inserted] = models_.try_emplace(id, shared);
        shared = it->second;
    }
    return {200,
            {{"model_id", id},
             {"order", shared->order()},
             {"vocab_size", shared->vocab_events().size()},
             {"event_count", shared->total_events()}}};
}

ApiResponse Service::list_models() const {
    std::shared_lock lock(models_mutex_);
    json list = json::array();
    for (const auto& [id, m] : models_) {
        list.push_back({{"model_id", id}, {"order", m->order()}, {"vocab_size", m->vocab_events().size()}});
    }
    return {200, {{"models", std::move(list)}}};
}

ApiResponse Service::predict(const std::string& body) const {
    ApiResponse error;
    auto doc = parse_body(body, error);
    if (!doc) return error;
    auto m = model(doc->value("model_id", ""));
    if (!m) return fail(404, "unknown_model", "no model with that id", doc->value("model_id", json()));
    auto history = parse_history(doc->value("history", json()), error);
    if (!history) return error;
    auto flavor = parse_flavor_field(*doc, error);
    if (!flavor) return error;
    auto k = positive_field(*doc, "k", 1, options_.max_generate, error);
    if (!k) return error;

    Scenario sc = generate(*m, *history, *k, *flavor);
    return {200,
            {{"events", tokens_json(sc.events)},
             {"logprobs", sc.per_event_logprob},
             {"flavor", to_string(sc.flavor)},
             {"order", sc.order_used}}};
}

ApiResponse Service::create_session(const std::string& body) {
    ApiResponse error;
    auto doc = parse_body(body, error);
    if (!doc) return error;
    std::string model_id = doc->value("model_id", "");
    auto m = model(model_id);
    if (!m) return fail(404, "unknown_model", "no model with that id", model_id);
    auto history = parse_history(doc->value("history", json()), error);
    if (!history) return error;
    auto flavor = parse_flavor_field(*doc, error);
    if (!flavor) return error;
    auto limit = positive_field(*doc, "limit", 10, options_.max_generate, error);
    if (!limit) return error;

    const auto now = std::chrono::steady_clock::now();
    auto record = std::shared_ptr<SessionRecord>(
        new SessionRecord{{}, model_id, GenerationSession(m, std::move(*history), *flavor, *limit), now, now, 0});
    std::string id = new_session_id();
    {
        std::lock_guard lock(sessions_mutex_);
        sessions_.emplace(id, record);
    }
    return {200, {{"session_id", id}, {"remaining", *limit}, {"flavor", to_string(*flavor)}, {"order", m->order()}}};
}

std::shared_ptr<Service::SessionRecord> Service::find_session(const std::string& id, ApiResponse& error) {
    std::lock_guard lock(sessions_mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) {
        error = fail(404, "unknown_session", "no session with that id", id);
        return nullptr;
    }
    const auto now = std::chrono::steady_clock::now();
    if (now - it->second->last_used > options_.session_ttl) {
        sessions_.erase(it);
        error = fail(404, "session_expired", "session expired", id);
        return nullptr;
    }
    it->second->last_used = now;
    return it->second;
}

ApiResponse Service::next_event(const std::string& session_id) {
    ApiResponse error;
    auto record = find_session(session_id, error);
    if (!record) return error;
    std::lock_guard lock(record->mutex);
    try {
        ScenarioStep s = record->session.step();
        return {200,
                {{"event", s.event.text()}, {"logprob", s.logprob}, {"remaining", record->session.remaining()}}};
    } catch (const Error& e) {
        return fail(409, to_string(e.code()), e.what(), session_id);
    }
}

ApiResponse Service::delete_session(const std::string& session_id) {
    std::lock_guard lock(sessions_mutex_);
    if (sessions_.erase(session_id) == 0) return fail(404, "unknown_session", "no session with that id", session_id);
    return {200, {{"deleted", session_id}}};
}

ApiResponse Service::execute(const std::string& body) {
    ApiResponse error;
    auto doc = parse_body(body, error);
    if (!doc) return error;

    std::shared_ptr<const NGramModel> m;
    if (auto it = doc->find("model_id"); it != doc->end() && !it->is_null()) {
        m = model(it->is_string() ? it->get<std::string>() : "");
        if (!m) return fail(404, "unknown_model", "no model with that id", *it);
    }

    auto scenario_it = doc->find("scenario");
    if (scenario_it == doc->end()) return fail(400, "malformed_request", "body needs 'scenario'");

    std::shared_ptr<SessionRecord> record;
    std::unique_lock<std::mutex> session_lock;
    std::vector<Token> events;
    if (scenario_it->is_object()) {
        record = find_session(scenario_it->value("session_id", ""), error);
        if (!record) return error;
        session_lock = std::unique_lock(record->mutex);
        auto emitted = record->session.emitted_events();
        events.assign(emitted.begin() + static_cast<std::ptrdiff_t>(record->executed), emitted.end());
        if (!m) m = model(record->model_id);
    } else {
        auto parsed = parse_history(*scenario_it, error);
        if (!parsed) return error;
        events = std::move(*parsed);
    }

    int max_chain = kDefaultMaxChain;
    if (auto it = doc->find("max_chain"); it != doc->end()) {
        if (!it->is_number_integer() || it->get<int>() < 0) {
            return fail(400, "malformed_request", "max_chain must be a nonnegative integer");
        }
        max_chain = it->get<int>();
    }

    std::lock_guard platform_lock(platform_mutex_);
    if (!platform_) {
        if (!m) return fail(422, "no_platform", "no vocabulary configured; pass a model_id to derive one");
        platform_ = PlatformState::build_registry(derive_vocabulary(m->vocab_events()));
    }

    std::vector<Routine> automations;
    std::vector<PolicyRule> policies;
    try {
        if (auto it = doc->find("automations"); it != doc->end() && !it->is_null()) {
            automations = routines_from_json(*it, &platform_->vocabulary());
        }
        if (auto it = doc->find("policies"); it != doc->end() && !it->is_null()) {
            policies = policies_from_json(*it, *platform_);
        }
    } catch (const Error& e) {
        return fail(422, to_string(e.code()), e.what(), e.detail());
    }

    ExecutionReport report = execute_scenario(*platform_, events, automations, policies, max_chain);
    if (record) record->executed += report.applied.size();
    json report_json = to_json(report);
    if (report.error) {
        return fail(422, to_string(report.error->code), report.error->message,
                    {{"token", report.error->token}, {"report", std::move(report_json)}});
    }
    return {200, std::move(report_json)};
}

ApiResponse Service::state() const {
    std::lock_guard lock(platform_mutex_);
    if (!platform_) return {200, {{"snapshot", json::object()}, {"entities", json::array()},
                                  {"violations", json::array()}, {"last_seq_no", 0}}};
    json entities = json::array();
    for (const auto& [id, e] : platform_->entities()) {
        entities.push_back({{"entity_id", id},
                            {"kind", to_string(e.kind)},
                            {"states", e.states},
                            {"current", e.current}});
    }
    json violations = json::array();
    for (const auto& v : platform_->violations()) violations.push_back(to_json(v));
    const auto& log = platform_->bus_log();
    return {200,
            {{"snapshot", platform_->snapshot()},
             {"entities", std::move(entities)},
             {"violations", std::move(violations)},
             {"last_seq_no", log.empty() ? 0 : log.back().seq_no}}};
}

ApiResponse Service::events(const std::string& since) const {
    std::uint64_t after = 0;
    if (!since.empty()) {
        try {
            std::size_t used = 0;
            after = std::stoull(since, &used);
            if (used != since.size() || since.find_first_not_of("0123456789") != std::string::npos) {
                throw std::invalid_argument(since);
            }
        } catch (const std::exception&) {
            return fail(400, "malformed_request", "since must be a nonnegative integer", since);
        }
    }
    std::lock_guard lock(platform_mutex_);
    json list = json::array();
    std::uint64_t last = after;
    if (platform_) {
        for (const auto& e : platform_->events_since(after)) {
            list.push_back(to_json(e));
            last = e.seq_no;
        }
    }
    return {200, {{"events", std::move(list)}, {"last_seq_no", last}}};
}

void Service::bind(httplib::Server& server) {
    auto send = [](httplib::Response& res, const ApiResponse& r) {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    server.Post("/api/train", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, train(req.body));
    });
    server.Get("/api/models", [this, send](const httplib::Request&, httplib::Response& res) {
        send(res, list_models());
    });
    server.Post("/api/predict", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, predict(req.body));
    });
    server.Post("/api/session", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, create_session(req.body));
    });
    server.Post(R"(/api/session/([^/]+)/next)", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, next_event(req.matches[1]));
    });
    server.Delete(R"(/api/session/([^/]+))", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, delete_session(req.matches[1]));
    });
    server.Post("/api/execute", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, execute(req.body));
    });
    server.Get("/api/state", [this, send](const httplib::Request&, httplib::Response& res) { send(res, state()); });
    server.Get("/api/events", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, events(req.has_param("since") ? req.get_param_value("since") : std::string()));
    });

    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string what = "internal error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            what = e.what();
        } catch (...) {
        }
        res.status = 500;
        res.set_content(error_body("internal_error", what).dump(), "application/json");
    });
    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (!res.body.empty()) return;
        res.set_content(error_body(res.status == 404 ? "not_found" : "http_error", "no such endpoint").dump(),
                        "application/json");
    });
}

}  // namespace helion
