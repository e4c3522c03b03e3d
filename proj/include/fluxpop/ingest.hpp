#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fluxpop/model.hpp"

namespace fluxpop::ingest {

/// Monthly mobility observations for one destination block group.
/// Origin device counts are keyed by universe ordinal and sorted by it.
/// total_origin_devices comes from the file: providers may truncate small
/// origins, so the stored sum can fall short of it.
struct PatternsRecord {
    bool present = false;
    std::vector<std::int64_t> hourly_stops;
    double median_dwell_minutes = 0.0;
    std::vector<std::pair<std::uint32_t, std::int64_t>> origin_devices;
    std::int64_t total_origin_devices = 0;
};

struct LoadStats {
    std::int64_t dropped_rows = 0;    // unknown destination block groups
    std::int64_t dropped_origins = 0; // unknown origin ids inside origin maps
    std::vector<std::string> warnings;
};

struct PatternsTable {
    std::vector<PatternsRecord> records; // aligned to the universe
    LoadStats stats;
};

struct PanelTable {
    std::vector<std::int64_t> devices; // aligned; block groups without a row stay 0
    LoadStats stats;
};

struct ReferenceTable {
    std::vector<double> daytime;
    std::vector<double> nighttime;
};

struct CrosswalkEntry {
    std::uint32_t cbg = 0;
    std::string place;
    double area_fraction = 0.0;
};

struct CrosswalkTable {
    std::vector<CrosswalkEntry> entries;
    LoadStats stats;
};

struct Dataset {
    UniversePtr universe;
    TimeIndex time;
    PatternsTable patterns;
    PanelTable panel;
    PopulationTable population;
    std::optional<ReferenceTable> reference;
    std::optional<CrosswalkTable> crosswalk;
};

std::string month_label(const TimeIndex& time); // "YYYY-MM"

/// Unknown destination rows are dropped with a counted warning, or rejected
/// when strict_unknown is set. Unknown origin ids inside origin maps are
/// always dropped with a counted warning.
PatternsTable load_patterns(const std::filesystem::path& path, const UniversePtr& universe,
                            const TimeIndex& time, bool strict_unknown = false);
PanelTable load_panel(const std::filesystem::path& path, const UniversePtr& universe);
PopulationTable load_population(const std::filesystem::path& path, const UniversePtr& universe);
/// Derives the universe from the population file's row order.
std::pair<UniversePtr, PopulationTable>
load_population_universe(const std::filesystem::path& path);
ReferenceTable load_reference(const std::filesystem::path& path, const UniversePtr& universe);
CrosswalkTable load_crosswalk(const std::filesystem::path& path, const UniversePtr& universe);

void write_patterns(const std::filesystem::path& path, const UniversePtr& universe,
                    const TimeIndex& time, const PatternsTable& table);
void write_panel(const std::filesystem::path& path, const UniversePtr& universe,
                 const PanelTable& table);
void write_population(const std::filesystem::path& path, const PopulationTable& table);
void write_reference(const std::filesystem::path& path, const UniversePtr& universe,
                     const ReferenceTable& table);
void write_crosswalk(const std::filesystem::path& path, const UniversePtr& universe,
                     const CrosswalkTable& table);

/// Hourly surface (cbg,hour,population). The on-disk universe follows first
/// appearance order; every block group must cover hours 0..tau-1.
void write_surface(const std::filesystem::path& path, const HourMatrix& surface,
                   bool gzip = false);
HourMatrix load_surface(const std::filesystem::path& path, const TimeIndex& time);

struct ValidationConfig {
    /// Flag destinations where the hourly stop total and the monthly device
    /// total disagree by more than this factor.
    double stop_total_factor = 2.0;
};

struct ValidationIssue {
    std::string code; // zero-panel | stop-total-mismatch | orphan-origin | degenerate-month
    CbgId cbg;        // empty for dataset-wide issues
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    std::int64_t patterns_rows = 0;
    std::int64_t zero_panel_cbgs = 0;
    double patterns_coverage = 0.0; // fraction of the universe with a patterns row
    std::int64_t total_stops = 0;
    std::int64_t total_origin_devices = 0;
};

/// Pure read-only consistency report; never mutates or fails.
ValidationReport validate_dataset(const Dataset& dataset, const ValidationConfig& config = {});

} // namespace fluxpop::ingest
