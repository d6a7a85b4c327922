#pragma once

// Exact expectation of the weekend share of firings for one routine, from a
// recursion over the remaining weekend/weekday pools of each period.

#include "helion/routine.hpp"
#include "helion/scheduler.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

namespace oracle {

inline double expected_weekend_picks(int weekend, int weekday, int picks, helion::DayRange range, double bias) {
    std::map<std::tuple<int, int, int>, double> memo;
    std::function<double(int, int, int)> f = [&](int e, int w, int n) -> double {
        if (n == 0 || e + w == 0) return 0.0;
        auto key = std::make_tuple(e, w, n);
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        double p_weekend;
        if (e == 0) {
            p_weekend = 0.0;
        } else if (w == 0) {
            p_weekend = 1.0;
        } else if (range == helion::DayRange::Any) {
            p_weekend = static_cast<double>(e) / static_cast<double>(e + w);
        } else {
            p_weekend = range == helion::DayRange::MostlyWeekends ? bias : 1.0 - bias;
        }
        double v = 0.0;
        if (p_weekend > 0) v += p_weekend * (1.0 + f(e - 1, w, n - 1));
        if (p_weekend < 1) v += (1.0 - p_weekend) * f(e, w - 1, n - 1);
        return memo[key] = v;
    };
    return f(weekend, weekday, picks);
}

/// Pooled E[weekend firings] / E[firings] for a weekly or monthly routine.
inline double weekend_fraction(const helion::Routine& r, const helion::ScheduleConfig& cfg) {
    const auto band = helion::frequency_band(r.indicators.frequency);
    const int span = helion::period_days(band.period);
    double weekend_sum = 0.0, count_sum = 0.0;
    for (int first = 0; first < cfg.days; first += span) {
        const int covered = std::min(span, cfg.days - first);
        int e = 0;
        for (int d = first; d < first + covered; ++d) e += helion::is_weekend(d, cfg.start_weekday);
        const int w = covered - e;
        const int choices = band.per_period_max - band.per_period_min + 1;
        for (int c = band.per_period_min; c <= band.per_period_max; ++c) {
            int n = covered < span ? std::min(c * covered / span, covered) : c;
            if (band.period == helion::Period::Day) {
                weekend_sum += (e > 0 ? n : 0) / static_cast<double>(choices);
            } else {
                weekend_sum += expected_weekend_picks(e, w, n, r.indicators.day_range, cfg.weekday_bias) / choices;
            }
            count_sum += static_cast<double>(n) / choices;
        }
    }
    return count_sum > 0 ? weekend_sum / count_sum : 0.0;
}

struct ContainmentResult {
    std::size_t firings = 0;
    std::size_t outside_window = 0;
    std::size_t periods_checked = 0;
    std::size_t bad_periods = 0;
};

/// Checks every firing against its routine's window and every period's
/// count against its band (partial trailing periods may only undershoot).
inline ContainmentResult check_containment(std::span<const helion::Routine> routines,
                                           std::span<const helion::Firing> firings, int days) {
    ContainmentResult res;
    res.firings = firings.size();
    for (const auto& r : routines) {
        const auto window = helion::time_window(r.indicators.time_range);
        const auto band = helion::frequency_band(r.indicators.frequency);
        const int span = helion::period_days(band.period);
        std::vector<int> per_period(static_cast<std::size_t>((days + span - 1) / span), 0);
        for (const auto& f : firings) {
            if (f.routine_id != r.id) continue;
            auto minute = static_cast<int>(f.timestamp % helion::kMinutesPerDay);
            auto day = f.timestamp / helion::kMinutesPerDay;
            if (f.timestamp < 0 || minute < window.start || minute >= window.end || day >= days) {
                ++res.outside_window;
                continue;
            }
            ++per_period[static_cast<std::size_t>(day / span)];
        }
        for (std::size_t p = 0; p < per_period.size(); ++p) {
            ++res.periods_checked;
            bool complete = static_cast<int>((p + 1) * static_cast<std::size_t>(span)) <= days;
            int c = per_period[p];
            if (c > band.per_period_max || (complete && c < band.per_period_min)) ++res.bad_periods;
        }
    }
    return res;
}

}  // namespace oracle
