#pragma once

#include "helion/routine.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace helion {

struct SynthConfig {
    std::size_t users = 40;
    int min_routines = 5;
    int max_routines = 9;
    std::uint64_t seed = 0;
    /// Chance that a user's copy of a template shifts its frequency one step.
    double frequency_jitter = 0.25;
    /// Chance that a user's copy of a template drops its day-range preference.
    double day_range_jitter = 0.2;
};

/// Draws per-user routine sets from a catalog of routine templates. Each
/// user gets a uniform number of distinct templates in
/// [min_routines, max_routines]. Routine ids become `userNN_<template id>`.
std::vector<UserRoutines> synthesize_users(std::span<const Routine> templates, const SynthConfig& cfg);

}  // namespace helion
