#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fluxpop/estimator.hpp"
#include "fluxpop/ingest.hpp"
#include "fluxpop/model.hpp"

namespace fluxpop::analysis {

struct EvalConfig {
    int noon_hour = 12;
    int midnight_hour = 0;
    bool weekdays_only_for_noon = true;
    bool exclude_zero_reference = true;
    /// Weighted aggregate over |diff|; signed averaging when false.
    bool use_absolute_difference = true;
};

/// Per-block-group relative differences against the day/night reference and
/// their reference-weighted aggregates. Excluded entries (zero reference)
/// are NaN in the per-cbg vectors.
struct EvalReport {
    std::vector<double> noon_mean;
    std::vector<double> midnight_mean;
    std::vector<double> day_diff;
    std::vector<double> night_diff;
    double day_aggregate = 0.0;   // fraction, not percent
    double night_aggregate = 0.0;
    int day_excluded = 0;
    int night_excluded = 0;
};

/// Mean of the surface at one hour of day over the selected days.
std::vector<double> daypart_mean(const HourMatrix& surface, int hour_of_day, bool weekdays_only);

/// (est - ref) / ref; the reference must be positive.
double relative_difference(double estimate, double reference);

EvalReport monthly_report(const HourMatrix& surface, const ingest::ReferenceTable& reference,
                          const EvalConfig& config = {});

struct KSweepEntry {
    double k = 0.0;
    EvalReport report;
    double total_inbound = 0.0; // scales linearly in k
};

/// Re-runs the full pipeline per k value. The dataset must carry a
/// reference table.
std::vector<KSweepEntry> sweep_k(const ingest::Dataset& dataset, std::span<const double> ks,
                                 const estimator::EstimatorConfig& base,
                                 const EvalConfig& eval = {});

struct PlaceSeries {
    std::string place;
    std::vector<double> hourly;
    std::vector<CbgId> members;
};

struct PlaceAggregation {
    std::vector<PlaceSeries> places; // sorted by place id
    std::vector<CbgId> unassigned;
    std::vector<double> unassigned_total;
};

/// A block group joins a place iff more than half its area lies inside it;
/// its whole population then counts. Fractions above 0.5 are unique per
/// block group, so membership is unambiguous.
PlaceAggregation aggregate_places(const HourMatrix& surface,
                                  const ingest::CrosswalkTable& crosswalk);

/// Trailing 24-hour moving average over the valid region (length tau - 23).
std::vector<double> daily_series(std::span<const double> hourly);

/// Table-shaped report: one month per column, day and night rows.
void write_report_csv(const std::filesystem::path& path,
                      std::span<const EvalReport> reports, std::span<const int> month_numbers);

struct ProfileSelection {
    enum class Kind { cbg, place } kind = Kind::cbg;
    std::string id;
    bool daily = false; // apply the 24-hour moving average
};

/// Plot-ready series: timestamp,label,value. Place selections need the
/// aggregation computed from the same surface.
void export_profile(const std::filesystem::path& path, const HourMatrix& surface,
                    const PlaceAggregation* places, const ProfileSelection& selection);

} // namespace fluxpop::analysis
