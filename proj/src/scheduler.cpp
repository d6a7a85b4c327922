#include "helion/scheduler.hpp"

#include "helion/error.hpp"
#include "helion/text.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

namespace helion {
namespace {

std::mt19937_64 routine_rng(std::uint64_t seed, std::size_t routine_index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(routine_index), 0x48454cu};
    return std::mt19937_64(seq);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

/// Picks `count` distinct days from [first, first + length).
std::vector<std::int64_t> pick_days(std::mt19937_64& rng, std::int64_t first, int length, int count,
                                    DayRange range, const ScheduleConfig& cfg) {
    std::vector<std::int64_t> weekend, weekday, picked;
    for (std::int64_t d = first; d < first + length; ++d) {
        (is_weekend(d, cfg.start_weekday) ? weekend : weekday).push_back(d);
    }
    auto take = [&](std::vector<std::int64_t>& pool) {
        std::size_t i = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(pool.size()) - 1));
        picked.push_back(pool[i]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(i));
    };

    for (int n = 0; n < count; ++n) {
        if (range == DayRange::Any) {
            std::vector<std::int64_t> all;
            std::merge(weekday.begin(), weekday.end(), weekend.begin(), weekend.end(), std::back_inserter(all));
            std::int64_t day = all[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(all.size()) - 1))];
            auto& pool = is_weekend(day, cfg.start_weekday) ? weekend : weekday;
            pool.erase(std::find(pool.begin(), pool.end(), day));
            picked.push_back(day);
            continue;
        }
        bool favoured_hit = std::bernoulli_distribution(cfg.weekday_bias)(rng);
        bool want_weekend = (range == DayRange::MostlyWeekends) == favoured_hit;
        auto& first_choice = want_weekend ? weekend : weekday;
        auto& fallback = want_weekend ? weekday : weekend;
        take(first_choice.empty() ? fallback : first_choice);
    }
    return picked;
}

}  // namespace

std::size_t EventCorpus::event_count() const {
    std::size_t n = 0;
    for (const auto& s : sequences) n += s.tokens.size();
    return n;
}

TimeWindow time_window(TimeRange tr) noexcept {
    switch (tr) {
        case TimeRange::EarlyMorning: return {300, 480};
        case TimeRange::Morning: return {480, 660};
        case TimeRange::Noon: return {660, 840};
        case TimeRange::Afternoon: return {840, 1020};
        case TimeRange::Evening: return {1020, 1260};
        case TimeRange::Night: return {1260, 1440};
        case TimeRange::LateNight: return {0, 300};
        case TimeRange::Any: return {0, 1440};
    }
    return {};
}

FrequencyBand frequency_band(Frequency f) noexcept {
    switch (f) {
        case Frequency::ManyTimesADay: return {5, 10, Period::Day};
        case Frequency::FewTimesADay: return {2, 4, Period::Day};
        case Frequency::OnceADay: return {1, 1, Period::Day};
        case Frequency::FewTimesAWeek: return {2, 4, Period::Week};
        case Frequency::OnceAWeek: return {1, 1, Period::Week};
        case Frequency::FewTimesAMonth: return {2, 4, Period::Month};
    }
    return {};
}

int period_days(Period p) noexcept {
    switch (p) {
        case Period::Day: return 1;
        case Period::Week: return 7;
        case Period::Month: return 30;
    }
    return 1;
}

bool is_weekend(std::int64_t day, Weekday start) noexcept {
    auto weekday = (static_cast<std::int64_t>(start) + day) % 7;
    return weekday >= static_cast<std::int64_t>(Weekday::Saturday);
}

std::vector<Firing> schedule(std::span<const Routine> routines, const ScheduleConfig& cfg) {
    if (routines.empty()) throw Error(ErrorCode::EmptyRoutineSet, "cannot schedule an empty routine set");
    if (cfg.days < 1) throw std::invalid_argument("schedule needs at least one day");
    if (!(cfg.weekday_bias >= 0.0 && cfg.weekday_bias <= 1.0)) {
        throw std::invalid_argument("weekday_bias must lie in [0, 1]");
    }

    std::vector<Firing> firings;
    for (std::size_t i = 0; i < routines.size(); ++i) {
        const Routine& r = routines[i];
        auto rng = routine_rng(cfg.seed, i);
        const TimeWindow window = time_window(r.indicators.time_range);
        const FrequencyBand band = frequency_band(r.indicators.frequency);
        const int span = period_days(band.period);

        for (std::int64_t first = 0; first < cfg.days; first += span) {
            const int covered = static_cast<int>(std::min<std::int64_t>(span, cfg.days - first));
            int count = uniform_int(rng, band.per_period_min, band.per_period_max);
            if (covered < span) count = std::min(count * covered / span, covered);

            std::vector<std::int64_t> days;
            if (band.period == Period::Day) {
                days.assign(static_cast<std::size_t>(count), first);
            } else {
                days = pick_days(rng, first, covered, count, r.indicators.day_range, cfg);
            }
            for (std::int64_t day : days) {
                int minute = uniform_int(rng, window.start, window.end - 1);
                firings.push_back({day * kMinutesPerDay + minute, r.id});
            }
        }
    }
    std::sort(firings.begin(), firings.end(), [](const Firing& a, const Firing& b) {
        return std::tie(a.timestamp, a.routine_id) < std::tie(b.timestamp, b.routine_id);
    });
    return firings;
}

EventSequence expand(std::span<const Firing> firings, std::span<const Routine> routines) {
    std::map<std::string_view, const Routine*> by_id;
    for (const auto& r : routines) by_id.emplace(r.id, &r);

    EventSequence seq;
    for (const auto& f : firings) {
        auto it = by_id.find(f.routine_id);
        if (it == by_id.end()) {
            throw Error(ErrorCode::UnknownRoutineId, "firing references unknown routine", f.routine_id);
        }
        seq.tokens.push_back(it->second->trigger);
        seq.tokens.insert(seq.tokens.end(), it->second->actions.begin(), it->second->actions.end());
    }
    return seq;
}

EventCorpus build_corpus(std::span<const UserSchedule> users) {
    EventCorpus corpus;
    corpus.sequences.reserve(users.size());
    for (const auto& u : users) {
        auto firings = schedule(u.routines, u.config);
        EventSequence seq = expand(firings, u.routines);
        seq.origin = u.user_id;
        corpus.sequences.push_back(std::move(seq));
    }
    return corpus;
}

std::vector<UserSchedule> plan_users(std::vector<UserRoutines> users, const ScheduleConfig& base) {
    std::vector<UserSchedule> out;
    out.reserve(users.size());
    for (std::size_t i = 0; i < users.size(); ++i) {
        ScheduleConfig cfg = base;
        cfg.seed = base.seed + i;
        out.push_back({std::move(users[i].user_id), std::move(users[i].routines), cfg});
    }
    return out;
}

EventCorpus read_corpus(std::istream& in) {
    EventCorpus corpus;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        EventSequence seq;
        for (auto field : split(line, '\t')) {
            if (field.empty()) continue;
            try {
                seq.tokens.push_back(parse_event(field));
            } catch (const Error& e) {
                throw Error(ErrorCode::MalformedCorpus, "line " + std::to_string(line_no) + ": " + e.what(),
                            std::string(field));
            }
        }
        corpus.sequences.push_back(std::move(seq));
    }
    return corpus;
}

EventCorpus read_corpus_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open corpus file", path);
    return read_corpus(in);
}

void write_corpus(std::ostream& out, const EventCorpus& corpus) {
    for (const auto& seq : corpus.sequences) {
        for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
            if (i) out << '\t';
            out << seq.tokens[i].text();
        }
        out << '\n';
    }
}

std::string corpus_to_tsv(const EventCorpus& corpus) {
    std::ostringstream ss;
    write_corpus(ss, corpus);
    return ss.str();
}

}  // namespace helion
