#include "helion/routine.hpp"

#include "helion/error.hpp"

#include <array>
#include <fstream>
#include <set>

namespace helion {
namespace {

constexpr std::array<std::string_view, 8> kTimeRangeNames = {
    "early_morning", "morning", "noon", "afternoon", "evening", "night", "late_night", "any"};
constexpr std::array<std::string_view, 3> kDayRangeNames = {"mostly_weekdays", "mostly_weekends", "any"};
constexpr std::array<std::string_view, 6> kFrequencyNames = {
    "many_times_a_day", "few_times_a_day", "once_a_day", "few_times_a_week", "once_a_week", "few_times_a_month"};

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::string_view, N>& names, std::string_view s) {
    for (std::size_t i = 0; i < N; ++i) {
        if (names[i] == s) return static_cast<Enum>(i);
    }
    return std::nullopt;
}

[[noreturn]] void malformed(const std::string& id, const std::string& why) {
    throw Error(ErrorCode::MalformedRoutine, "routine '" + id + "': " + why, id);
}

Token routine_token(const nlohmann::json& value, const std::string& id, const Vocabulary* vocab) {
    if (!value.is_string()) malformed(id, "tokens must be strings");
    const auto& text = value.get_ref<const std::string&>();
    Token t = [&] {
        try {
            return parse_event(text);
        } catch (const Error& e) {
            malformed(id, e.what());
        }
    }();
    if (vocab != nullptr && !validate(t, *vocab)) {
        throw Error(ErrorCode::UnknownToken, "routine '" + id + "': token not in vocabulary", text);
    }
    return t;
}

std::string indicator_field(const nlohmann::json& ind, const char* key, const std::string& id) {
    auto it = ind.find(key);
    if (it == ind.end() || !it->is_string()) malformed(id, std::string("indicator '") + key + "' missing");
    return it->get<std::string>();
}

Routine routine_from_json(const nlohmann::json& obj, const Vocabulary* vocab) {
    if (!obj.is_object()) malformed("?", "routine entries must be objects");
    auto id_it = obj.find("id");
    if (id_it == obj.end() || !id_it->is_string() || id_it->get_ref<const std::string&>().empty()) {
        malformed("?", "missing id");
    }
    std::string id = id_it->get<std::string>();

    auto trig = obj.find("trigger");
    if (trig == obj.end()) malformed(id, "missing trigger");
    if (trig->is_array()) malformed(id, "exactly one trigger token is supported");
    Token trigger = routine_token(*trig, id, vocab);

    auto acts = obj.find("actions");
    if (acts == obj.end() || !acts->is_array() || acts->empty()) malformed(id, "actions must be a nonempty array");
    std::vector<Token> actions;
    for (const auto& a : *acts) actions.push_back(routine_token(a, id, vocab));

    auto ind = obj.find("indicators");
    if (ind == obj.end() || !ind->is_object()) malformed(id, "missing indicators");
    auto tr = parse_time_range(indicator_field(*ind, "time_range", id));
    auto dr = parse_day_range(indicator_field(*ind, "day_range", id));
    auto fr = parse_frequency(indicator_field(*ind, "frequency", id));
    if (!tr || !dr || !fr) malformed(id, "unknown indicator value");

    return Routine{std::move(id), std::move(trigger), std::move(actions), {*tr, *dr, *fr}};
}

nlohmann::json parse_json(std::istream& in, ErrorCode code) {
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(code, std::string("invalid JSON: ") + e.what());
    }
}

}  // namespace

std::string_view to_string(TimeRange v) noexcept { return kTimeRangeNames[static_cast<std::size_t>(v)]; }
std::string_view to_string(DayRange v) noexcept { return kDayRangeNames[static_cast<std::size_t>(v)]; }
std::string_view to_string(Frequency v) noexcept { return kFrequencyNames[static_cast<std::size_t>(v)]; }

std::optional<TimeRange> parse_time_range(std::string_view s) noexcept {
    return lookup<TimeRange>(kTimeRangeNames, s);
}
std::optional<DayRange> parse_day_range(std::string_view s) noexcept { return lookup<DayRange>(kDayRangeNames, s); }
std::optional<Frequency> parse_frequency(std::string_view s) noexcept {
    return lookup<Frequency>(kFrequencyNames, s);
}

std::vector<Routine> routines_from_json(const nlohmann::json& doc, const Vocabulary* vocab) {
    if (!doc.is_array()) throw Error(ErrorCode::MalformedRoutine, "routine file must be a JSON array");
    std::vector<Routine> out;
    std::set<std::string> seen;
    for (const auto& obj : doc) {
        Routine r = routine_from_json(obj, vocab);
        if (!seen.insert(r.id).second) {
            throw Error(ErrorCode::DuplicateRoutineId, "duplicate routine id '" + r.id + "'", r.id);
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<Routine> load_routines(std::istream& in, const Vocabulary* vocab) {
    return routines_from_json(parse_json(in, ErrorCode::MalformedRoutine), vocab);
}

std::vector<UserRoutines> load_user_routines(std::istream& in, const Vocabulary* vocab) {
    nlohmann::json doc = parse_json(in, ErrorCode::MalformedRoutine);
    if (doc.is_array()) return {UserRoutines{"user", routines_from_json(doc, vocab)}};
    if (!doc.is_object() || !doc.contains("users") || !doc["users"].is_array()) {
        throw Error(ErrorCode::MalformedRoutine, "expected a routine array or an object with a 'users' array");
    }
    std::vector<UserRoutines> users;
    for (const auto& u : doc["users"]) {
        if (!u.is_object() || !u.contains("id") || !u["id"].is_string() || !u.contains("routines")) {
            throw Error(ErrorCode::MalformedRoutine, "user entries need 'id' and 'routines'");
        }
        users.push_back({u["id"].get<std::string>(), routines_from_json(u["routines"], vocab)});
    }
    return users;
}

std::vector<UserRoutines> load_user_routines_file(const std::string& path, const Vocabulary* vocab) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open routine file", path);
    return load_user_routines(in, vocab);
}

nlohmann::json to_json(const Routine& r) {
    nlohmann::json actions = nlohmann::json::array();
    for (const auto& a : r.actions) actions.push_back(a.text());
    return {
        {"id", r.id},
        {"trigger", r.trigger.text()},
        {"actions", std::move(actions)},
        {"indicators",
         {{"time_range", to_string(r.indicators.time_range)},
          {"day_range", to_string(r.indicators.day_range)},
          {"frequency", to_string(r.indicators.frequency)}}},
    };
}

nlohmann::json to_json(const std::vector<UserRoutines>& users) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& u : users) {
        nlohmann::json routines = nlohmann::json::array();
        for (const auto& r : u.routines) routines.push_back(to_json(r));
        list.push_back({{"id", u.user_id}, {"routines", std::move(routines)}});
    }
    return {{"users", std::move(list)}};
}

}  // namespace helion
