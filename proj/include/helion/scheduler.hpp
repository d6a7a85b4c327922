#pragma once

#include "helion/routine.hpp"
#include "helion/token.hpp"

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace helion {

inline constexpr int kMinutesPerDay = 1440;

enum class Weekday { Monday, Tuesday, Wednesday, Thursday, Friday, Saturday, Sunday };

struct ScheduleConfig {
    int days = 30;
    std::uint64_t seed = 0;
    double weekday_bias = 0.9;
    Weekday start_weekday = Weekday::Monday;
};

struct Firing {
    std::int64_t timestamp = 0;  // minutes since schedule start
    std::string routine_id;

    friend bool operator==(const Firing&, const Firing&) = default;
};

struct EventSequence {
    std::vector<Token> tokens;
    std::optional<std::string> origin;
};

struct EventCorpus {
    std::vector<EventSequence> sequences;

    std::size_t event_count() const;
};

/// Half-open span of minutes within a day.
struct TimeWindow {
    int start = 0;
    int end = kMinutesPerDay;

    friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

enum class Period { Day, Week, Month };

struct FrequencyBand {
    int per_period_min = 1;
    int per_period_max = 1;
    Period period = Period::Day;

    friend bool operator==(const FrequencyBand&, const FrequencyBand&) = default;
};

TimeWindow time_window(TimeRange tr) noexcept;
FrequencyBand frequency_band(Frequency f) noexcept;

/// Days covered by one period: 1, 7 or 30.
int period_days(Period p) noexcept;

bool is_weekend(std::int64_t day, Weekday start) noexcept;

/// Expands routines into timestamped firings. Deterministic in (routines, cfg).
///
/// Daily bands draw a count per day and place every firing on that day.
/// Weekly and monthly bands draw a count per period and place the firings
/// on distinct days of the period; each firing picks a day of the favoured
/// type (weekday or weekend, per the day-range indicator) with probability
/// `weekday_bias`, falling back to the other type when none is left. A
/// trailing partial period gets floor(count * covered / period_days)
/// firings. Minutes are uniform within the routine's time window.
///
/// Throws Error{EmptyRoutineSet}, std::invalid_argument on a bad config.
std::vector<Firing> schedule(std::span<const Routine> routines, const ScheduleConfig& cfg);

/// Concatenates trigger + actions of each fired routine, in firing order.
/// Throws Error{UnknownRoutineId}.
EventSequence expand(std::span<const Firing> firings, std::span<const Routine> routines);

struct UserSchedule {
    std::string user_id;
    std::vector<Routine> routines;
    ScheduleConfig config;
};

EventCorpus build_corpus(std::span<const UserSchedule> users);

/// Per-user configs derived from one base config: user i gets seed + i.
std::vector<UserSchedule> plan_users(std::vector<UserRoutines> users, const ScheduleConfig& base);

/// Corpus TSV: one sequence per line, canonical tokens separated by tabs.
EventCorpus read_corpus(std::istream& in);
EventCorpus read_corpus_file(const std::string& path);
void write_corpus(std::ostream& out, const EventCorpus& corpus);
std::string corpus_to_tsv(const EventCorpus& corpus);

}  // namespace helion
