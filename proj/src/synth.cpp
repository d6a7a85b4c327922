#include "helion/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <random>
#include <stdexcept>

namespace helion {
namespace {

Frequency shift(Frequency f, int delta) {
    int i = std::clamp(static_cast<int>(f) + delta, 0, static_cast<int>(Frequency::FewTimesAMonth));
    return static_cast<Frequency>(i);
}

}  // namespace

std::vector<UserRoutines> synthesize_users(std::span<const Routine> templates, const SynthConfig& cfg) {
    if (templates.empty()) throw std::invalid_argument("synthesis needs at least one template");
    if (cfg.min_routines < 1 || cfg.max_routines < cfg.min_routines) {
        throw std::invalid_argument("bad routine-count range");
    }
    std::mt19937_64 rng(cfg.seed);
    std::vector<UserRoutines> users;
    users.reserve(cfg.users);

    std::vector<std::size_t> order(templates.size());
    for (std::size_t u = 0; u < cfg.users; ++u) {
        char user_id[32];
        std::snprintf(user_id, sizeof user_id, "user%02zu", u + 1);

        int wanted = std::uniform_int_distribution<int>(cfg.min_routines, cfg.max_routines)(rng);
        auto count = std::min<std::size_t>(static_cast<std::size_t>(wanted), templates.size());
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count));

        UserRoutines user{user_id, {}};
        for (std::size_t i = 0; i < count; ++i) {
            Routine r = templates[order[i]];
            r.id = std::string(user_id) + "_" + r.id;
            if (std::bernoulli_distribution(cfg.frequency_jitter)(rng)) {
                r.indicators.frequency = shift(r.indicators.frequency, std::bernoulli_distribution(0.5)(rng) ? 1 : -1);
            }
            if (std::bernoulli_distribution(cfg.day_range_jitter)(rng)) r.indicators.day_range = DayRange::Any;
            user.routines.push_back(std::move(r));
        }
        users.push_back(std::move(user));
    }
    return users;
}

}  // namespace helion
