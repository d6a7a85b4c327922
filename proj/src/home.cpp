#include "helion/home.hpp"

#include "helion/error.hpp"
#include "helion/text.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace helion {
namespace {

[[noreturn]] void bad_policy(const std::string& id, const std::string& why) {
    throw Error(ErrorCode::MalformedPolicy, "policy '" + id + "': " + why, id);
}

StateClause clause_from_json(const nlohmann::json& obj, const PlatformState& ps, const std::string& rule_id) {
    if (!obj.is_object() || !obj.contains("entity") || !obj["entity"].is_string()) {
        bad_policy(rule_id, "clauses need an 'entity' string");
    }
    bool has_is = obj.contains("is");
    bool has_is_not = obj.contains("is_not");
    if (has_is == has_is_not) bad_policy(rule_id, "clauses need exactly one of 'is' / 'is_not'");
    const auto& state = obj[has_is ? "is" : "is_not"];
    if (!state.is_string()) bad_policy(rule_id, "clause state must be a string");

    StateClause c{obj["entity"].get<std::string>(), has_is_not, state.get<std::string>()};
    const Entity* e = ps.find(c.entity_id);
    if (e == nullptr) bad_policy(rule_id, "unknown entity '" + c.entity_id + "'");
    if (std::find(e->states.begin(), e->states.end(), c.state) == e->states.end()) {
        bad_policy(rule_id, "'" + c.state + "' is not a state of " + c.entity_id);
    }
    return c;
}

std::vector<StateClause> clauses_from_json(const nlohmann::json& obj, const char* key, const PlatformState& ps,
                                           const std::string& rule_id) {
    std::vector<StateClause> out;
    auto it = obj.find(key);
    if (it == obj.end()) return out;
    if (!it->is_array()) bad_policy(rule_id, std::string("'") + key + "' must be an array");
    for (const auto& c : *it) out.push_back(clause_from_json(c, ps, rule_id));
    return out;
}

void check_policies(PlatformState& ps, std::span<const PolicyRule> policies, std::uint64_t seq_no,
                    ExecutionReport& report) {
    if (policies.empty()) return;
    const auto states = ps.snapshot();
    for (const auto& rule : policies) {
        if (!rule.violated(states)) continue;
        Violation v{seq_no, rule.id, rule.description, rule.severity};
        report.violations.push_back(v);
        ps.record_violation(std::move(v));
    }
}

}  // namespace

std::string_view to_string(Cause c) noexcept {
    switch (c) {
        case Cause::Scenario: return "scenario";
        case Cause::Automation: return "automation";
        case Cause::Manual: return "manual";
    }
    return "manual";
}

std::string_view to_string(EntityKind k) noexcept { return k == EntityKind::Boolean ? "boolean" : "select"; }

std::string_view to_string(Severity s) noexcept { return s == Severity::Warn ? "warn" : "violation"; }

bool StateClause::holds(const std::map<std::string, std::string>& states) const {
    auto it = states.find(entity_id);
    bool equal = it != states.end() && it->second == state;
    return negated ? !equal : equal;
}

bool PolicyRule::violated(const std::map<std::string, std::string>& states) const {
    for (const auto& c : when) {
        if (!c.holds(states)) return false;
    }
    for (const auto& c : require) {
        if (!c.holds(states)) return true;
    }
    return false;
}

std::string entity_id_for(const Token& t) { return t.device() + "_" + t.attribute(); }

PlatformState PlatformState::build_registry(const Vocabulary& v) {
    if (v.empty()) throw Error(ErrorCode::EmptyVocabulary, "cannot build a registry from an empty vocabulary");
    PlatformState ps;
    ps.vocab_ = v;
    for (const VocabularyEntry* entry : v.entries()) {
        Entity e;
        e.entity_id = entry->device + "_" + entry->attribute;
        e.device = entry->device;
        e.attribute = entry->attribute;
        e.kind = entry->actions.size() == 2 ? EntityKind::Boolean : EntityKind::Select;
        e.states = entry->actions;
        e.current = entry->actions.front();
        std::string id = e.entity_id;
        if (!ps.entities_.emplace(id, std::move(e)).second) {
            throw Error(ErrorCode::MalformedVocabulary, "two vocabulary entries map to entity '" + id + "'", id);
        }
    }
    return ps;
}

const BusEvent& PlatformState::call_service(const std::string& entity_id, const std::string& target_state,
                                            Cause cause, std::string routine_id) {
    auto it = entities_.find(entity_id);
    if (it == entities_.end()) throw Error(ErrorCode::UnknownEntity, "unknown entity '" + entity_id + "'", entity_id);
    Entity& e = it->second;
    if (std::find(e.states.begin(), e.states.end(), target_state) == e.states.end()) {
        throw Error(ErrorCode::IllegalState, "'" + target_state + "' is not a state of " + entity_id,
                    entity_id + " " + target_state);
    }
    BusEvent ev{next_seq_++, entity_id, e.current, target_state, cause, std::move(routine_id)};
    e.current = target_state;
    log_.push_back(std::move(ev));
    return log_.back();
}

std::map<std::string, std::string> PlatformState::snapshot() const {
    std::map<std::string, std::string> out;
    for (const auto& [id, e] : entities_) out.emplace(id, e.current);
    return out;
}

std::map<std::string, std::string> PlatformState::initial_snapshot() const {
    std::map<std::string, std::string> out;
    for (const auto& [id, e] : entities_) out.emplace(id, e.states.front());
    return out;
}

const Entity* PlatformState::find(std::string_view entity_id) const {
    auto it = entities_.find(entity_id);
    return it == entities_.end() ? nullptr : &it->second;
}

std::vector<BusEvent> PlatformState::events_since(std::uint64_t since) const {
    auto first = std::upper_bound(log_.begin(), log_.end(), since,
                                  [](std::uint64_t s, const BusEvent& e) { return s < e.seq_no; });
    return {first, log_.end()};
}

void PlatformState::record_violation(Violation v) { violations_.push_back(std::move(v)); }

PlatformState build_registry(const Vocabulary& v) { return PlatformState::build_registry(v); }

std::map<std::string, std::string> snapshot(const PlatformState& ps) { return ps.snapshot(); }

std::vector<PolicyRule> policies_from_json(const nlohmann::json& doc, const PlatformState& ps) {
    if (!doc.is_array()) throw Error(ErrorCode::MalformedPolicy, "policy file must be a JSON array");
    std::vector<PolicyRule> rules;
    std::set<std::string> ids;
    for (const auto& obj : doc) {
        if (!obj.is_object() || !obj.contains("id") || !obj["id"].is_string()) {
            throw Error(ErrorCode::MalformedPolicy, "policy entries need a string 'id'");
        }
        PolicyRule rule;
        rule.id = obj["id"].get<std::string>();
        if (!ids.insert(rule.id).second) bad_policy(rule.id, "duplicate id");
        rule.description = obj.value("description", "");
        rule.when = clauses_from_json(obj, "when", ps, rule.id);
        rule.require = clauses_from_json(obj, "require", ps, rule.id);
        if (rule.require.empty()) bad_policy(rule.id, "'require' must list at least one clause");
        std::string severity = obj.value("severity", "violation");
        if (severity == "warn") {
            rule.severity = Severity::Warn;
        } else if (severity == "violation") {
            rule.severity = Severity::Violation;
        } else {
            bad_policy(rule.id, "severity must be 'warn' or 'violation'");
        }
        rules.push_back(std::move(rule));
    }
    return rules;
}

std::vector<PolicyRule> load_policies_file(const std::string& path, const PlatformState& ps) {
    std::string text = read_file(path);
    try {
        return policies_from_json(nlohmann::json::parse(text), ps);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::MalformedPolicy, std::string("invalid JSON: ") + e.what(), path);
    }
}

ExecutionReport execute_scenario(PlatformState& ps, std::span<const Token> events,
                                 std::span<const Routine> automations, std::span<const PolicyRule> policies,
                                 int max_chain) {
    ExecutionReport report;
    const auto limit = static_cast<std::size_t>(std::max(max_chain, 0));

    auto apply = [&](const Token& t, Cause cause, const std::string& routine_id) {
        try {
            const BusEvent& ev = ps.call_service(entity_id_for(t), t.action(), cause, routine_id);
            (cause == Cause::Scenario ? report.applied : report.automation_firings).push_back(ev);
            check_policies(ps, policies, ev.seq_no, report);
            return true;
        } catch (const Error& e) {
            report.error = ExecutionFailure{e.code(), e.what(), t.text()};
            return false;
        }
    };

    // Breadth-first over the tokens applied so far; false aborts execution.
    auto propagate = [&](const Token& root) {
        std::size_t fired = 0;
        std::deque<Token> pending{root};
        while (!pending.empty()) {
            Token current = std::move(pending.front());
            pending.pop_front();
            for (const Routine& r : automations) {
                if (r.trigger != current) continue;
                for (const Token& action : r.actions) {
                    if (fired == limit) {
                        ++report.chain_limit_hits;
                        return true;
                    }
                    if (!apply(action, Cause::Automation, r.id)) return false;
                    ++fired;
                    pending.push_back(action);
                }
            }
        }
        return true;
    };

    for (const Token& event : events) {
        if (!apply(event, Cause::Scenario, {})) break;
        if (!propagate(event)) break;
    }
    return report;
}

ExecutionReport execute_scenario(PlatformState& ps, const Scenario& sc, std::span<const Routine> automations,
                                 std::span<const PolicyRule> policies, int max_chain) {
    return execute_scenario(ps, sc.events, automations, policies, max_chain);
}

nlohmann::json to_json(const BusEvent& e) {
    nlohmann::json j = {
        {"seq_no", e.seq_no},       {"entity_id", e.entity_id},   {"old_state", e.old_state},
        {"new_state", e.new_state}, {"cause", to_string(e.cause)},
    };
    if (!e.routine_id.empty()) j["routine_id"] = e.routine_id;
    return j;
}

nlohmann::json to_json(const Violation& v) {
    return {{"seq_no", v.seq_no},
            {"rule_id", v.rule_id},
            {"description", v.description},
            {"severity", to_string(v.severity)}};
}

nlohmann::json to_json(const ExecutionReport& r) {
    nlohmann::json applied = nlohmann::json::array();
    for (const auto& e : r.applied) applied.push_back(to_json(e));
    nlohmann::json firings = nlohmann::json::array();
    for (const auto& e : r.automation_firings) firings.push_back(to_json(e));
    nlohmann::json violations = nlohmann::json::array();
    for (const auto& v : r.violations) violations.push_back(to_json(v));
    nlohmann::json j = {
        {"applied", std::move(applied)},
        {"automation_firings", std::move(firings)},
        {"chain_limit_hits", r.chain_limit_hits},
        {"violations", std::move(violations)},
    };
    if (r.error) {
        j["error"] = {{"error_code", to_string(r.error->code)},
                      {"message", r.error->message},
                      {"token", r.error->token}};
    }
    return j;
}

}  // namespace helion
