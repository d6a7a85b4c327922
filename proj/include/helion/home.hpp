#pragma once

#include "helion/error.hpp"
#include "helion/routine.hpp"
#include "helion/scenario.hpp"
#include "helion/vocabulary.hpp"

#include <json.hpp>

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace helion {

enum class EntityKind { Boolean, Select };

/// Platform-side state holder for one device attribute.
struct Entity {
    std::string entity_id;  // device + "_" + attribute
    std::string device;
    std::string attribute;
    EntityKind kind = EntityKind::Select;
    std::vector<std::string> states;
    std::string current;
};

enum class Cause { Scenario, Automation, Manual };

std::string_view to_string(Cause c) noexcept;
std::string_view to_string(EntityKind k) noexcept;

struct BusEvent {
    std::uint64_t seq_no = 0;
    std::string entity_id;
    std::string old_state;
    std::string new_state;
    Cause cause = Cause::Manual;
    std::string routine_id;  // set for Automation events
};

struct StateClause {
    std::string entity_id;
    bool negated = false;  // `is_not`
    std::string state;

    bool holds(const std::map<std::string, std::string>& states) const;
};

enum class Severity { Warn, Violation };

std::string_view to_string(Severity s) noexcept;

/// Flags a state where every `when` clause holds and some `require`
/// clause does not.
struct PolicyRule {
    std::string id;
    std::string description;
    std::vector<StateClause> when;
    std::vector<StateClause> require;
    Severity severity = Severity::Violation;

    bool violated(const std::map<std::string, std::string>& states) const;
};

struct Violation {
    std::uint64_t seq_no = 0;
    std::string rule_id;
    std::string description;
    Severity severity = Severity::Violation;
};

struct ExecutionFailure {
    ErrorCode code;
    std::string message;
    std::string token;
};

struct ExecutionReport {
    std::vector<BusEvent> applied;
    std::vector<BusEvent> automation_firings;
    std::size_t chain_limit_hits = 0;
    std::vector<Violation> violations;
    std::optional<ExecutionFailure> error;  // set when execution aborted early
};

/// Entity registry plus the append-only event bus. Single writer.
class PlatformState {
public:
    /// One entity per vocabulary entry, starting at its first listed action.
    /// Throws Error{EmptyVocabulary}; two entries mapping to the same
    /// entity id throw Error{MalformedVocabulary}.
    static PlatformState build_registry(const Vocabulary& v);

    /// Sets the entity and appends a bus event, even when the state is
    /// unchanged. Throws Error{UnknownEntity} / Error{IllegalState}.
    const BusEvent& call_service(const std::string& entity_id, const std::string& target_state, Cause cause,
                                 std::string routine_id = {});

    std::map<std::string, std::string> snapshot() const;
    std::map<std::string, std::string> initial_snapshot() const;

    const Entity* find(std::string_view entity_id) const;
    const std::map<std::string, Entity, std::less<>>& entities() const noexcept { return entities_; }
    const Vocabulary& vocabulary() const noexcept { return vocab_; }
    const std::vector<BusEvent>& bus_log() const noexcept { return log_; }
    const std::vector<Violation>& violations() const noexcept { return violations_; }

    /// Events with seq_no > `since`, ascending.
    std::vector<BusEvent> events_since(std::uint64_t since) const;

    void record_violation(Violation v);

private:
    Vocabulary vocab_;
    std::map<std::string, Entity, std::less<>> entities_;
    std::vector<BusEvent> log_;
    std::vector<Violation> violations_;
    std::uint64_t next_seq_ = 1;
};

std::string entity_id_for(const Token& t);

PlatformState build_registry(const Vocabulary& v);
std::map<std::string, std::string> snapshot(const PlatformState& ps);

/// Policy file: JSON array of {id, description, when, require, severity};
/// clauses are {"entity": id, "is": state} or {"entity": id, "is_not": state}.
/// Throws Error{MalformedPolicy} on bad syntax or unknown entities/states.
std::vector<PolicyRule> policies_from_json(const nlohmann::json& doc, const PlatformState& ps);
std::vector<PolicyRule> load_policies_file(const std::string& path, const PlatformState& ps);

inline constexpr int kDefaultMaxChain = 8;

/// Applies each event with cause Scenario, then fires matching automations
/// breadth-first (cause Automation), at most `max_chain` automation events
/// per scenario event. Every policy is checked after every bus event.
/// An unknown entity or state stops execution; the partial report carries
/// the failure.
ExecutionReport execute_scenario(PlatformState& ps, std::span<const Token> events,
                                 std::span<const Routine> automations, std::span<const PolicyRule> policies,
                                 int max_chain = kDefaultMaxChain);
ExecutionReport execute_scenario(PlatformState& ps, const Scenario& sc, std::span<const Routine> automations,
                                 std::span<const PolicyRule> policies, int max_chain = kDefaultMaxChain);

nlohmann::json to_json(const BusEvent& e);
nlohmann::json to_json(const Violation& v);
nlohmann::json to_json(const ExecutionReport& r);

}  // namespace helion
