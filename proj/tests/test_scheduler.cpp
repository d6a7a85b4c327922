#include "fixtures.hpp"
#include "schedule_oracle.hpp"

#include "helion/error.hpp"
#include "helion/scheduler.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

using namespace helion;

namespace {

Routine make_routine(std::string id, TimeRange tr, DayRange dr, Frequency f) {
    return Routine{std::move(id), Token("motion_sensor", "motion", "detected"),
                   {Token("security_camera", "image", "take")}, {tr, dr, f}};
}

const TimeRange kAllRanges[] = {TimeRange::EarlyMorning, TimeRange::Morning, TimeRange::Noon,
                                TimeRange::Afternoon,    TimeRange::Evening, TimeRange::Night,
                                TimeRange::LateNight,    TimeRange::Any};
const DayRange kAllDays[] = {DayRange::MostlyWeekdays, DayRange::MostlyWeekends, DayRange::Any};
const Frequency kAllFreqs[] = {Frequency::ManyTimesADay, Frequency::FewTimesADay, Frequency::OnceADay,
                               Frequency::FewTimesAWeek, Frequency::OnceAWeek,    Frequency::FewTimesAMonth};

}  // namespace

TEST_CASE("time windows") {
    CHECK(time_window(TimeRange::Night) == TimeWindow{1260, 1440});
    CHECK(time_window(TimeRange::Any) == TimeWindow{0, 1440});
    CHECK(time_window(TimeRange::LateNight) == TimeWindow{0, 300});
    CHECK(time_window(TimeRange::EarlyMorning) == TimeWindow{300, 480});
    CHECK(time_window(TimeRange::Morning) == TimeWindow{480, 660});
    CHECK(time_window(TimeRange::Noon) == TimeWindow{660, 840});
    CHECK(time_window(TimeRange::Afternoon) == TimeWindow{840, 1020});
    CHECK(time_window(TimeRange::Evening) == TimeWindow{1020, 1260});
}

TEST_CASE("frequency bands") {
    CHECK(frequency_band(Frequency::FewTimesADay) == FrequencyBand{2, 4, Period::Day});
    CHECK(frequency_band(Frequency::OnceAWeek) == FrequencyBand{1, 1, Period::Week});
    CHECK(frequency_band(Frequency::FewTimesAMonth) == FrequencyBand{2, 4, Period::Month});
    CHECK(frequency_band(Frequency::ManyTimesADay) == FrequencyBand{5, 10, Period::Day});
    CHECK(frequency_band(Frequency::OnceADay) == FrequencyBand{1, 1, Period::Day});
    CHECK(frequency_band(Frequency::FewTimesAWeek) == FrequencyBand{2, 4, Period::Week});
    CHECK(period_days(Period::Week) == 7);
    CHECK(period_days(Period::Month) == 30);
}

TEST_CASE("weekends relative to the start day") {
    CHECK_FALSE(is_weekend(0, Weekday::Monday));
    CHECK(is_weekend(5, Weekday::Monday));
    CHECK(is_weekend(6, Weekday::Monday));
    CHECK_FALSE(is_weekend(7, Weekday::Monday));
    CHECK(is_weekend(0, Weekday::Sunday));
    CHECK(is_weekend(6, Weekday::Sunday));
}

TEST_CASE("night routine, two days") {
    std::vector<Routine> rs{make_routine("r", TimeRange::Night, DayRange::Any, Frequency::OnceADay)};
    ScheduleConfig cfg;
    cfg.days = 2;
    cfg.seed = 7;
    auto firings = schedule(rs, cfg);
    REQUIRE(firings.size() == 2);
    for (const auto& f : firings) {
        auto minute = f.timestamp % kMinutesPerDay;
        CHECK(minute >= 1260);
        CHECK(minute < 1440);
    }
    CHECK(firings[0].timestamp / kMinutesPerDay == 0);
    CHECK(firings[1].timestamp / kMinutesPerDay == 1);
}

TEST_CASE("schedule errors") {
    ScheduleConfig cfg;
    CHECK_THROWS_AS(schedule({}, cfg), Error);
    try {
        schedule({}, cfg);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyRoutineSet);
    }
    std::vector<Routine> rs{make_routine("r", TimeRange::Any, DayRange::Any, Frequency::OnceADay)};
    cfg.days = 0;
    CHECK_THROWS_AS(schedule(rs, cfg), std::invalid_argument);
    cfg.days = 3;
    cfg.weekday_bias = 1.5;
    CHECK_THROWS_AS(schedule(rs, cfg), std::invalid_argument);
}

TEST_CASE("schedule is deterministic and sorted") {
    auto users = fixtures::demo_users();
    ScheduleConfig cfg;
    cfg.seed = 11;
    auto a = schedule(users[3].routines, cfg);
    auto b = schedule(users[3].routines, cfg);
    CHECK(a == b);
    CHECK(std::is_sorted(a.begin(), a.end(), [](const Firing& x, const Firing& y) {
        return std::tie(x.timestamp, x.routine_id) < std::tie(y.timestamp, y.routine_id);
    }));
    cfg.seed = 12;
    CHECK(schedule(users[3].routines, cfg) != a);
}

TEST_CASE("window and frequency containment over every indicator combination") {
    std::vector<Routine> rs;
    for (auto tr : kAllRanges)
        for (auto dr : kAllDays)
            for (auto f : kAllFreqs)
                rs.push_back(make_routine("r" + std::to_string(rs.size()), tr, dr, f));
    for (int days : {1, 6, 7, 10, 30, 31, 45, 60}) {
        for (std::uint64_t seed = 0; seed < 8; ++seed) {
            ScheduleConfig cfg;
            cfg.days = days;
            cfg.seed = seed;
            auto firings = schedule(rs, cfg);
            auto res = oracle::check_containment(rs, firings, days);
            CAPTURE(days);
            CAPTURE(seed);
            CHECK(res.outside_window == 0);
            CHECK(res.bad_periods == 0);
        }
    }
}

TEST_CASE("weekly and monthly firings land on distinct days") {
    std::vector<Routine> rs{make_routine("w", TimeRange::Any, DayRange::MostlyWeekends, Frequency::FewTimesAWeek),
                            make_routine("m", TimeRange::Any, DayRange::MostlyWeekdays, Frequency::FewTimesAMonth)};
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        ScheduleConfig cfg;
        cfg.seed = seed;
        cfg.days = 60;
        auto firings = schedule(rs, cfg);
        for (const char* id : {"w", "m"}) {
            std::vector<std::int64_t> days;
            for (const auto& f : firings)
                if (f.routine_id == id) days.push_back(f.timestamp / kMinutesPerDay);
            std::sort(days.begin(), days.end());
            CHECK(std::adjacent_find(days.begin(), days.end()) == days.end());
        }
    }
}

TEST_CASE("weekend share matches the exact expectation") {
    for (auto f : {Frequency::FewTimesAWeek, Frequency::OnceAWeek, Frequency::FewTimesAMonth}) {
        for (auto dr : kAllDays) {
            std::vector<Routine> rs{make_routine("r", TimeRange::Any, dr, f)};
            ScheduleConfig cfg;
            std::size_t weekend = 0, total = 0;
            for (std::uint64_t seed = 0; seed < 1000; ++seed) {
                cfg.seed = seed;
                for (const auto& firing : schedule(rs, cfg)) {
                    ++total;
                    weekend += is_weekend(firing.timestamp / kMinutesPerDay, cfg.start_weekday);
                }
            }
            double observed = static_cast<double>(weekend) / static_cast<double>(total);
            double expected = oracle::weekend_fraction(rs[0], cfg);
            CAPTURE(to_string(f));
            CAPTURE(to_string(dr));
            CHECK(std::abs(observed - expected) <= 0.03);
        }
    }
}

TEST_CASE("weekend oracle sanity") {
    // Seven-day week, one firing, both pools available: the bias applies directly.
    CHECK(oracle::expected_weekend_picks(2, 5, 1, DayRange::MostlyWeekdays, 0.9) == doctest::Approx(0.1));
    CHECK(oracle::expected_weekend_picks(2, 5, 1, DayRange::MostlyWeekends, 0.9) == doctest::Approx(0.9));
    CHECK(oracle::expected_weekend_picks(2, 5, 1, DayRange::Any, 0.9) == doctest::Approx(2.0 / 7.0));
    // Three mostly-weekend picks exhaust the two weekend days.
    CHECK(oracle::expected_weekend_picks(2, 5, 3, DayRange::MostlyWeekends, 1.0) == doctest::Approx(2.0));
}

TEST_CASE("expand") {
    std::vector<Routine> rs{
        make_routine("cam", TimeRange::Night, DayRange::Any, Frequency::OnceADay),
        Routine{"leave", Token("user", "presence", "away"),
                {Token("door_lock", "lock", "locked"), Token("light_bulb", "switch", "off")},
                {}},
    };
    SUBCASE("one firing") {
        std::vector<Firing> fs{{10, "cam"}};
        auto seq = expand(fs, rs);
        CHECK(seq.tokens ==
              std::vector<Token>{Token("motion_sensor", "motion", "detected"), Token("security_camera", "image", "take")});
    }
    SUBCASE("empty") { CHECK(expand({}, rs).tokens.empty()); }
    SUBCASE("two firings of a three-token routine") {
        std::vector<Firing> fs{{5, "leave"}, {9, "leave"}};
        auto seq = expand(fs, rs);
        REQUIRE(seq.tokens.size() == 6);
        CHECK(seq.tokens[0] == Token("user", "presence", "away"));
        CHECK(seq.tokens[2] == Token("light_bulb", "switch", "off"));
        CHECK(seq.tokens[3] == Token("user", "presence", "away"));
    }
    SUBCASE("unknown routine id") {
        std::vector<Firing> fs{{5, "ghost"}};
        try {
            expand(fs, rs);
            FAIL("expected UnknownRoutineId");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::UnknownRoutineId);
        }
    }
}

TEST_CASE("build_corpus") {
    auto users = fixtures::demo_users();
    ScheduleConfig cfg;
    cfg.seed = 7;
    SUBCASE("one user, one sequence") {
        std::vector<UserRoutines> one{users[0]};
        auto corpus = build_corpus(plan_users(one, cfg));
        CHECK(corpus.sequences.size() == 1);
        CHECK(corpus.sequences[0].origin == users[0].user_id);
    }
    SUBCASE("demo scale") {
        auto corpus = build_corpus(plan_users(users, cfg));
        CHECK(corpus.sequences.size() == 40);
        CHECK(corpus.event_count() >= 10000);
        CHECK(corpus.event_count() <= 60000);
    }
    SUBCASE("per-user sequences are reproducible") {
        auto a = build_corpus(plan_users(users, cfg));
        auto b = build_corpus(plan_users(users, cfg));
        CHECK(corpus_to_tsv(a) == corpus_to_tsv(b));
        auto plan = plan_users(users, cfg);
        CHECK(plan[5].config.seed == cfg.seed + 5);
        // A user's sequence depends only on that user's routines and seed.
        std::vector<UserSchedule> alone{plan[5]};
        CHECK(build_corpus(alone).sequences[0].tokens == a.sequences[5].tokens);
    }
}

TEST_CASE("corpus TSV round trip") {
    auto corpus = fixtures::corpus_of({"abc", "abd", "a"});
    std::string tsv = corpus_to_tsv(corpus);
    CHECK(tsv == "a,x,on\tb,x,on\tc,x,on\na,x,on\tb,x,on\td,x,on\na,x,on\n");
    std::istringstream in(tsv);
    auto back = read_corpus(in);
    REQUIRE(back.sequences.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(back.sequences[i].tokens == corpus.sequences[i].tokens);

    std::istringstream bad("a,x,on\tnot a token\n");
    try {
        read_corpus(bad);
        FAIL("expected MalformedCorpus");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MalformedCorpus);
    }
}
