#pragma once

#include "helion/home.hpp"
#include "helion/ngram.hpp"
#include "helion/scenario.hpp"
#include "helion/vocabulary.hpp"

#include <json.hpp>

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

namespace httplib {
class Server;
}

namespace helion {

struct ServiceOptions {
    /// Registry source for the platform. Without it the platform is built
    /// from the vocabulary of the first model named in an /api/execute call.
    std::optional<Vocabulary> vocabulary;
    std::chrono::seconds session_ttl{3600};
    std::size_t max_generate = 10000;
};

struct ApiResponse {
    int status = 200;
    nlohmann::json body;
};

/// Backend for the HTTP API. Each handler takes the raw request body and
/// returns the status and JSON body, so the handlers can be driven without
/// a socket. One platform per instance.
class Service {
public:
    explicit Service(ServiceOptions options = {});

    ApiResponse train(const std::string& body);
    ApiResponse list_models() const;
    ApiResponse predict(const std::string& body) const;
    ApiResponse create_session(const std::string& body);
    ApiResponse next_event(const std::string& session_id);
    ApiResponse delete_session(const std::string& session_id);
    ApiResponse execute(const std::string& body);
    ApiResponse state() const;
    ApiResponse events(const std::string& since) const;

    std::shared_ptr<const NGramModel> model(const std::string& model_id) const;

    /// Routes every endpoint (plus CORS preflight) onto `server`.
    void bind(httplib::Server& server);

    /// Content address of a trained model.
    static std::string model_id_for(const NGramModel& m);

private:
    struct SessionRecord {
        std::mutex mutex;
        std::string model_id;
        GenerationSession session;
        std::chrono::steady_clock::time_point created_at;
        std::chrono::steady_clock::time_point last_used;
        std::size_t executed = 0;  // events already run through /api/execute
    };

    std::shared_ptr<SessionRecord> find_session(const std::string& id, ApiResponse& error);

    ServiceOptions options_;

    mutable std::shared_mutex models_mutex_;
    std::map<std::string, std::shared_ptr<const NGramModel>> models_;

    std::mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<SessionRecord>> sessions_;

    mutable std::mutex platform_mutex_;
    std::optional<PlatformState> platform_;
};

nlohmann::json error_body(std::string_view code, const std::string& message, nlohmann::json detail = nullptr);

}  // namespace helion
