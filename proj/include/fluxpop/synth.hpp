#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fluxpop/ingest.hpp"
#include "fluxpop/model.hpp"

namespace fluxpop::synth {

enum class ObservationMode { expected, sampled };

/// Mixing weights for the "mixed" preset; must sum to 1.
struct ArchetypeMix {
    double homebody = 0.55;
    double commuter = 0.25;
    double night_worker = 0.08;
    double student = 0.05;
    double tourist = 0.04;
    double festival_visitor = 0.03;
};

struct SynthConfig {
    std::string preset = "mixed";
    int n_cbgs = 0; // 0 = preset default; structured presets have fixed layouts
    std::uint64_t rng_seed = 1;
    int year = 2022;
    int month = 9;
    int days = 0; // 0 = calendar month length
    int months = 1;
    double rate = 0.0; // device sampling rate; 0 = preset default
    int pop_min = 200; // "mixed" resident range
    int pop_max = 2000;
    ArchetypeMix mix;
    ObservationMode observation_mode = ObservationMode::expected;
};

/// A group of identically behaving agents: same home, same hourly location
/// sequence. Cohorts partition the resident population.
struct Cohort {
    std::uint32_t home = 0;
    std::int64_t count = 0;
    std::string archetype;
    std::vector<std::uint32_t> itinerary; // location per hour, length tau
};

struct SyntheticWorld {
    UniversePtr universe;
    TimeIndex time;
    std::vector<double> residents;     // true resident count per block group
    std::vector<double> sampling_rate; // per block group
    std::vector<Cohort> cohorts;
    ingest::CrosswalkTable crosswalk; // preset place layout; may be empty
};

std::vector<std::string> preset_names();

/// Deterministic for a fixed config (seed included). Throws input_error for
/// unknown presets or infeasible configs.
SyntheticWorld generate_world(const SynthConfig& config);

/// Agents counted per (hour, block group); hourly totals are constant.
HourMatrix true_population(const SyntheticWorld& world);
/// Visitors (agents away from home) per destination and hour.
HourMatrix true_inbound(const SyntheticWorld& world);
/// Agents away from home per origin and hour.
HourMatrix true_outbound(const SyntheticWorld& world);
/// Away arrivals per origin over the month (visit count, not visit-hours).
std::vector<double> true_monthly_outbound_arrivals(const SyntheticWorld& world);

struct ObservationBundle {
    UniversePtr universe;
    TimeIndex time;
    ingest::PatternsTable patterns;
    ingest::PanelTable panel;
    PopulationTable population;
    ingest::ReferenceTable reference;
    ingest::CrosswalkTable crosswalk;
};

/// Day/night reference derived from the truth: weekday mean at noon and
/// all-day mean at midnight.
ingest::ReferenceTable reference_from_truth(const SyntheticWorld& world);

/// Expected mode emits exact expectations (rounded to the integer schema);
/// sampled mode enrolls each agent with its home-rate via the seeded rng.
/// A stop is a tracked device beginning a visit outside its home block
/// group; one stop per device per arrival.
ObservationBundle observe(const SyntheticWorld& world, const SynthConfig& config);

/// Same config shifted forward by `offset` calendar months.
SynthConfig advance_months(SynthConfig config, int offset);

/// Writes the ingest-schema files (patterns, panel, population, reference,
/// crosswalk when present) into `dir`.
void write_bundle(const std::filesystem::path& dir, const ObservationBundle& bundle);

/// truth.csv: cbg,hour,population of the true surface.
void write_truth(const std::filesystem::path& path, const SyntheticWorld& world);

} // namespace fluxpop::synth
