#include "fluxpop/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <stdexcept>

#include "fluxpop/csv.hpp"
#include "fluxpop/errors.hpp"

namespace fluxpop::analysis {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string timestamp(const TimeIndex& time, int t) {
    namespace chr = std::chrono;
    const int day = t / 24;
    const chr::year_month_day first{chr::year{time.year},
                                    chr::month{static_cast<unsigned>(time.month)}, chr::day{1}};
    const chr::year_month_day date{chr::sys_days(first) + chr::days(day)};
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:00", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()),
                  t % 24);
    return buf;
}

struct PartEval {
    std::vector<double> diff;
    double aggregate = 0.0;
    int excluded = 0;
};

PartEval evaluate_part(const std::vector<double>& estimate, const std::vector<double>& reference,
                       const EvalConfig& config) {
    PartEval part;
    part.diff.assign(estimate.size(), kNan);
    double weighted = 0.0;
    double weight = 0.0;
    for (std::size_t c = 0; c < estimate.size(); ++c) {
        if (reference[c] <= 0.0) {
            if (!config.exclude_zero_reference) {
                throw pipeline_error("zero reference population with exclusion disabled");
            }
            ++part.excluded;
            continue;
        }
        const double d = relative_difference(estimate[c], reference[c]);
        part.diff[c] = d;
        weighted += reference[c] * (config.use_absolute_difference ? std::abs(d) : d);
        weight += reference[c];
    }
    if (weight <= 0.0) {
        throw pipeline_error("no positive reference mass to weight the aggregate");
    }
    part.aggregate = weighted / weight;
    return part;
}

} // namespace

std::vector<double> daypart_mean(const HourMatrix& surface, int hour_of_day,
                                 bool weekdays_only) {
    if (hour_of_day < 0 || hour_of_day >= 24) {
        throw std::invalid_argument("hour of day must lie in [0,24)");
    }
    const TimeIndex& time = surface.time();
    std::vector<int> days;
    for (int day = 0; day < time.days; ++day) {
        if (!weekdays_only || day_is_weekday(time, day)) {
            days.push_back(day);
        }
    }
    if (days.empty()) {
        throw pipeline_error("no qualifying days for the daypart mean");
    }
    std::vector<double> mean(surface.cols(), 0.0);
    for (int day : days) {
        const auto row = surface.row(day * 24 + hour_of_day);
        for (std::uint32_t c = 0; c < surface.cols(); ++c) {
            mean[c] += row[c];
        }
    }
    for (double& v : mean) {
        v /= static_cast<double>(days.size());
    }
    return mean;
}

double relative_difference(double estimate, double reference) {
    if (!(reference > 0.0)) {
        throw pipeline_error("relative difference needs a positive reference");
    }
    return (estimate - reference) / reference;
}

EvalReport monthly_report(const HourMatrix& surface, const ingest::ReferenceTable& reference,
                          const EvalConfig& config) {
    if (reference.daytime.size() != surface.cols()) {
        throw std::invalid_argument("reference table does not match the surface universe");
    }
    EvalReport report;
    report.noon_mean = daypart_mean(surface, config.noon_hour, config.weekdays_only_for_noon);
    report.midnight_mean = daypart_mean(surface, config.midnight_hour, false);

    PartEval day = evaluate_part(report.noon_mean, reference.daytime, config);
    PartEval night = evaluate_part(report.midnight_mean, reference.nighttime, config);
    report.day_diff = std::move(day.diff);
    report.night_diff = std::move(night.diff);
    report.day_aggregate = day.aggregate;
    report.night_aggregate = night.aggregate;
    report.day_excluded = day.excluded;
    report.night_excluded = night.excluded;
    return report;
}

std::vector<KSweepEntry> sweep_k(const ingest::Dataset& dataset, std::span<const double> ks,
                                 const estimator::EstimatorConfig& base, const EvalConfig& eval) {
    if (ks.empty()) {
        throw std::invalid_argument("sweep needs at least one k value");
    }
    if (!dataset.reference) {
        throw input_error("sweep needs a reference table");
    }
    std::vector<KSweepEntry> entries;
    entries.reserve(ks.size());
    for (double k : ks) {
        estimator::EstimatorConfig config = base;
        config.k = k;
        const auto result = estimator::run_pipeline(dataset, config);
        KSweepEntry entry;
        entry.k = k;
        entry.total_inbound = result.diagnostics.total_inbound;
        entry.report = monthly_report(result.surface.population, *dataset.reference, eval);
        entries.push_back(std::move(entry));
    }
    return entries;
}

PlaceAggregation aggregate_places(const HourMatrix& surface,
                                  const ingest::CrosswalkTable& crosswalk) {
    const auto n = surface.cols();
    const int tau = surface.rows();
    const auto& universe = *surface.universe();

    // fraction > 0.5 strictly; at most one place can qualify per block group.
    std::vector<int> assignment(n, -1);
    std::map<std::string, std::vector<std::uint32_t>> members;
    for (const auto& entry : crosswalk.entries) {
        if (entry.area_fraction > 0.5 && entry.cbg < n) {
            members[entry.place].push_back(entry.cbg);
        }
    }
    PlaceAggregation result;
    int place_index = 0;
    for (auto& [place, cbgs] : members) {
        std::sort(cbgs.begin(), cbgs.end());
        PlaceSeries series;
        series.place = place;
        series.hourly.assign(static_cast<std::size_t>(tau), 0.0);
        for (std::uint32_t c : cbgs) {
            assignment[c] = place_index;
            series.members.push_back(universe.id(c));
        }
        result.places.push_back(std::move(series));
        ++place_index;
    }

    result.unassigned_total.assign(static_cast<std::size_t>(tau), 0.0);
    for (std::uint32_t c = 0; c < n; ++c) {
        if (assignment[c] == -1) {
            result.unassigned.push_back(universe.id(c));
        }
    }
    for (int t = 0; t < tau; ++t) {
        const auto row = surface.row(t);
        for (std::uint32_t c = 0; c < n; ++c) {
            if (assignment[c] >= 0) {
                result.places[static_cast<std::size_t>(assignment[c])]
                    .hourly[static_cast<std::size_t>(t)] += row[c];
            } else {
                result.unassigned_total[static_cast<std::size_t>(t)] += row[c];
            }
        }
    }
    return result;
}

std::vector<double> daily_series(std::span<const double> hourly) {
    constexpr std::size_t kWindow = 24;
    if (hourly.size() < kWindow) {
        throw std::invalid_argument("daily series needs at least 24 hourly values");
    }
    std::vector<double> out;
    out.reserve(hourly.size() - kWindow + 1);
    double window = 0.0;
    for (std::size_t i = 0; i < hourly.size(); ++i) {
        window += hourly[i];
        if (i + 1 >= kWindow) {
            out.push_back(window / static_cast<double>(kWindow));
            window -= hourly[i + 1 - kWindow];
        }
    }
    return out;
}

void write_report_csv(const std::filesystem::path& path, std::span<const EvalReport> reports,
                      std::span<const int> month_numbers) {
    if (reports.size() != month_numbers.size()) {
        throw std::invalid_argument("one month number per report required");
    }
    std::vector<std::string> header{"Month"};
    std::vector<std::string> day_row{"Noon/daytime (%)"};
    std::vector<std::string> night_row{"Midnight/nighttime (%)"};
    char buf[32];
    for (std::size_t i = 0; i < reports.size(); ++i) {
        header.push_back(std::to_string(month_numbers[i]));
        std::snprintf(buf, sizeof(buf), "%.4f", reports[i].day_aggregate * 100.0);
        day_row.emplace_back(buf);
        std::snprintf(buf, sizeof(buf), "%.4f", reports[i].night_aggregate * 100.0);
        night_row.emplace_back(buf);
    }
    std::string out = csv::make_row(header);
    out += csv::make_row(day_row);
    out += csv::make_row(night_row);
    csv::write_file_atomic(path, out);
}

void export_profile(const std::filesystem::path& path, const HourMatrix& surface,
                    const PlaceAggregation* places, const ProfileSelection& selection) {
    if (selection.id.empty()) {
        throw input_error("empty profile selection");
    }
    std::vector<double> series;
    if (selection.kind == ProfileSelection::Kind::cbg) {
        const std::uint32_t c = surface.universe()->find(selection.id);
        if (c == surface.universe()->size()) {
            throw input_error("unknown block group: " + selection.id);
        }
        series.reserve(static_cast<std::size_t>(surface.rows()));
        for (int t = 0; t < surface.rows(); ++t) {
            series.push_back(surface(t, c));
        }
    } else {
        if (places == nullptr) {
            throw input_error("place selection needs a crosswalk aggregation");
        }
        const auto it = std::find_if(places->places.begin(), places->places.end(),
                                     [&](const PlaceSeries& p) { return p.place == selection.id; });
        if (it == places->places.end()) {
            throw input_error("unknown place: " + selection.id);
        }
        series = it->hourly;
    }

    int first_hour = 0;
    if (selection.daily) {
        series = daily_series(series);
        first_hour = 23; // each value closes a trailing 24-hour window
    }
    std::string out = csv::make_row({"timestamp", "label", "value"});
    for (std::size_t i = 0; i < series.size(); ++i) {
        out += csv::make_row({timestamp(surface.time(), first_hour + static_cast<int>(i)),
                              selection.id, csv::format_double(series[i])});
    }
    csv::write_file_atomic(path, out);
}

} // namespace fluxpop::analysis
