#pragma once

#include "helion/token.hpp"
#include "helion/vocabulary.hpp"

#include <json.hpp>

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace helion {

enum class TimeRange { EarlyMorning, Morning, Noon, Afternoon, Evening, Night, LateNight, Any };
enum class DayRange { MostlyWeekdays, MostlyWeekends, Any };
enum class Frequency { ManyTimesADay, FewTimesADay, OnceADay, FewTimesAWeek, OnceAWeek, FewTimesAMonth };

std::string_view to_string(TimeRange v) noexcept;
std::string_view to_string(DayRange v) noexcept;
std::string_view to_string(Frequency v) noexcept;
std::optional<TimeRange> parse_time_range(std::string_view s) noexcept;
std::optional<DayRange> parse_day_range(std::string_view s) noexcept;
std::optional<Frequency> parse_frequency(std::string_view s) noexcept;

struct ExecutionIndicators {
    TimeRange time_range = TimeRange::Any;
    DayRange day_range = DayRange::Any;
    Frequency frequency = Frequency::OnceADay;

    friend bool operator==(const ExecutionIndicators&, const ExecutionIndicators&) = default;
};

/// IF trigger THEN actions..., plus when/how often the user expects it to run.
struct Routine {
    std::string id;
    Token trigger;
    std::vector<Token> actions;  // nonempty
    ExecutionIndicators indicators;

    friend bool operator==(const Routine&, const Routine&) = default;
};

/// One user's routine set, the unit the scheduler turns into a sequence.
struct UserRoutines {
    std::string user_id;
    std::vector<Routine> routines;
};

/// Parses a JSON array of routine objects. When `vocab` is non-null every
/// token must validate against it (Error{UnknownToken}); otherwise only the
/// token syntax is checked. Ids must be unique (Error{DuplicateRoutineId}).
std::vector<Routine> routines_from_json(const nlohmann::json& doc, const Vocabulary* vocab);
std::vector<Routine> load_routines(std::istream& in, const Vocabulary* vocab);

/// Accepts either a routine array (one user, id "user") or
/// `{"users": [{"id": str, "routines": [...]}, ...]}`.
std::vector<UserRoutines> load_user_routines(std::istream& in, const Vocabulary* vocab);
std::vector<UserRoutines> load_user_routines_file(const std::string& path, const Vocabulary* vocab);

nlohmann::json to_json(const Routine& r);
nlohmann::json to_json(const std::vector<UserRoutines>& users);

}  // namespace helion
