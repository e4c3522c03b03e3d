#include "fluxpop/ingest.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <unordered_set>

#include "fluxpop/csv.hpp"
#include "fluxpop/errors.hpp"

namespace fluxpop::ingest {

namespace {

using nlohmann::json;

std::string loc(const std::filesystem::path& path, std::size_t line) {
    return path.filename().string() + ":" + std::to_string(line);
}

void warn(LoadStats& stats, std::string message) {
    constexpr std::size_t kMaxKept = 20;
    if (stats.warnings.size() < kMaxKept) {
        stats.warnings.push_back(std::move(message));
    }
}

std::vector<csv::Row> read_table(const std::filesystem::path& path,
                                 const std::vector<std::string>& header) {
    const auto rows = csv::parse(csv::read_file_bytes(path));
    if (rows.empty()) {
        throw input_error(path.string() + ": empty file");
    }
    if (rows.front().fields != header) {
        std::string want;
        for (const auto& h : header) {
            want += want.empty() ? h : "," + h;
        }
        throw input_error(path.string() + ": header mismatch, expected '" + want + "'");
    }
    return rows;
}

void check_width(const csv::Row& row, std::size_t width, const std::filesystem::path& path) {
    if (row.fields.size() != width) {
        throw input_error(loc(path, row.line) + ": expected " + std::to_string(width) +
                          " columns, got " + std::to_string(row.fields.size()));
    }
}

json parse_cell_json(const std::string& cell, const std::string& context) {
    json value = json::parse(cell, nullptr, false);
    if (value.is_discarded()) {
        throw input_error(context + ": malformed JSON cell");
    }
    return value;
}

std::int64_t require_count(const json& value, const std::string& context) {
    if (!value.is_number_integer() && !value.is_number_unsigned()) {
        throw input_error(context + ": counts must be integers");
    }
    const auto n = value.get<std::int64_t>();
    if (n < 0) {
        throw input_error(context + ": negative count " + std::to_string(n));
    }
    return n;
}

} // namespace

std::string month_label(const TimeIndex& time) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d", time.year, time.month);
    return buf;
}

PatternsTable load_patterns(const std::filesystem::path& path, const UniversePtr& universe,
                            const TimeIndex& time, bool strict_unknown) {
    const std::vector<std::string> header = {"cbg",
                                             "month",
                                             "hourly_stops",
                                             "median_dwell_minutes",
                                             "origin_devices",
                                             "total_origin_devices"};
    const auto rows = read_table(path, header);
    const std::string expected_month = month_label(time);

    PatternsTable table;
    table.records.assign(universe->size(), PatternsRecord{});

    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const std::string at = loc(path, row.line);
        check_width(row, header.size(), path);

        const CbgId& cbg = row.fields[0];
        const std::uint32_t c = universe->find(cbg);
        if (c == universe->size()) {
            if (strict_unknown) {
                throw input_error(at + ": unknown block group " + cbg);
            }
            ++table.stats.dropped_rows;
            warn(table.stats, at + ": unknown block group " + cbg + ", row dropped");
            continue;
        }
        if (table.records[c].present) {
            throw input_error(at + ": duplicate row for " + cbg);
        }
        if (row.fields[1] != expected_month) {
            throw input_error(at + ": month '" + row.fields[1] + "' does not match the run month " +
                              expected_month);
        }

        PatternsRecord rec;
        rec.present = true;

        const json stops = parse_cell_json(row.fields[2], at + " hourly_stops");
        if (!stops.is_array()) {
            throw input_error(at + ": hourly_stops must be a JSON array");
        }
        if (static_cast<int>(stops.size()) != time.tau) {
            throw input_error(at + ": expected " + std::to_string(time.tau) +
                              " hourly values, got " + std::to_string(stops.size()));
        }
        rec.hourly_stops.reserve(stops.size());
        for (const auto& v : stops) {
            rec.hourly_stops.push_back(require_count(v, at + " hourly_stops"));
        }

        rec.median_dwell_minutes = csv::parse_double(row.fields[3], at + " median_dwell_minutes");
        if (rec.median_dwell_minutes < 0.0) {
            throw input_error(at + ": median dwell must be non-negative");
        }

        const json origins = parse_cell_json(row.fields[4], at + " origin_devices");
        if (!origins.is_object()) {
            throw input_error(at + ": origin_devices must be a JSON object");
        }
        std::int64_t origin_sum = 0;
        for (const auto& [key, value] : origins.items()) {
            const std::int64_t count = require_count(value, at + " origin_devices");
            origin_sum += count;
            const std::uint32_t j = universe->find(key);
            if (j == universe->size()) {
                ++table.stats.dropped_origins;
                warn(table.stats, at + ": unknown origin " + key + " dropped");
                continue;
            }
            rec.origin_devices.emplace_back(j, count);
        }
        std::sort(rec.origin_devices.begin(), rec.origin_devices.end());

        rec.total_origin_devices = csv::parse_int64(row.fields[5], at + " total_origin_devices");
        if (rec.total_origin_devices < 0) {
            throw input_error(at + ": negative total_origin_devices");
        }
        if (origin_sum > rec.total_origin_devices) {
            throw input_error(at + ": origin device sum " + std::to_string(origin_sum) +
                              " exceeds total_origin_devices " +
                              std::to_string(rec.total_origin_devices));
        }

        table.records[c] = std::move(rec);
    }
    return table;
}

PanelTable load_panel(const std::filesystem::path& path, const UniversePtr& universe) {
    const auto rows = read_table(path, {"cbg", "panel_devices"});
    PanelTable table;
    table.devices.assign(universe->size(), 0);
    std::vector<bool> seen(universe->size(), false);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const std::string at = loc(path, row.line);
        check_width(row, 2, path);
        const std::uint32_t c = universe->find(row.fields[0]);
        if (c == universe->size()) {
            ++table.stats.dropped_rows;
            warn(table.stats, at + ": unknown block group " + row.fields[0] + ", row dropped");
            continue;
        }
        if (seen[c]) {
            throw input_error(at + ": duplicate row for " + row.fields[0]);
        }
        seen[c] = true;
        const std::int64_t devices = csv::parse_int64(row.fields[1], at + " panel_devices");
        if (devices < 0) {
            throw input_error(at + ": negative panel device count");
        }
        table.devices[c] = devices;
    }
    return table;
}

namespace {

std::vector<double> load_aligned_column(const std::filesystem::path& path,
                                        const UniversePtr& universe,
                                        const std::vector<std::string>& header,
                                        std::size_t value_column, std::vector<double>* second) {
    const auto rows = read_table(path, header);
    std::vector<double> values(universe->size(), 0.0);
    if (second != nullptr) {
        second->assign(universe->size(), 0.0);
    }
    std::vector<bool> seen(universe->size(), false);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const std::string at = loc(path, row.line);
        check_width(row, header.size(), path);
        const std::uint32_t c = universe->find(row.fields[0]);
        if (c == universe->size()) {
            throw input_error(at + ": unknown block group " + row.fields[0]);
        }
        if (seen[c]) {
            throw input_error(at + ": duplicate row for " + row.fields[0]);
        }
        seen[c] = true;
        values[c] = csv::parse_double(row.fields[value_column], at + " " + header[value_column]);
        if (values[c] < 0.0) {
            throw input_error(at + ": " + header[value_column] + " must be non-negative");
        }
        if (second != nullptr) {
            (*second)[c] =
                csv::parse_double(row.fields[value_column + 1], at + " " + header[value_column + 1]);
            if ((*second)[c] < 0.0) {
                throw input_error(at + ": " + header[value_column + 1] + " must be non-negative");
            }
        }
    }
    std::vector<CbgId> missing;
    for (std::uint32_t c = 0; c < universe->size(); ++c) {
        if (!seen[c]) {
            missing.push_back(universe->id(c));
        }
    }
    if (!missing.empty()) {
        std::string list;
        for (std::size_t i = 0; i < missing.size() && i < 10; ++i) {
            list += (i == 0 ? "" : ", ") + missing[i];
        }
        if (missing.size() > 10) {
            list += ", and " + std::to_string(missing.size() - 10) + " more";
        }
        throw input_error(path.string() + ": missing block groups: " + list);
    }
    return values;
}

} // namespace

PopulationTable load_population(const std::filesystem::path& path, const UniversePtr& universe) {
    auto values = load_aligned_column(path, universe, {"cbg", "population"}, 1, nullptr);
    return make_population_table(universe, std::move(values));
}

std::pair<UniversePtr, PopulationTable>
load_population_universe(const std::filesystem::path& path) {
    const auto rows = read_table(path, {"cbg", "population"});
    std::vector<CbgId> ids;
    ids.reserve(rows.size() - 1);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        check_width(rows[i], 2, path);
        ids.push_back(rows[i].fields[0]);
    }
    if (ids.empty()) {
        throw input_error(path.string() + ": no block groups");
    }
    UniversePtr universe;
    try {
        universe = make_universe(std::move(ids));
    } catch (const std::invalid_argument& e) {
        throw input_error(path.string() + ": " + e.what());
    }
    return {universe, load_population(path, universe)};
}

ReferenceTable load_reference(const std::filesystem::path& path, const UniversePtr& universe) {
    ReferenceTable table;
    table.daytime = load_aligned_column(path, universe, {"cbg", "daytime_pop", "nighttime_pop"}, 1,
                                        &table.nighttime);
    return table;
}

CrosswalkTable load_crosswalk(const std::filesystem::path& path, const UniversePtr& universe) {
    const auto rows = read_table(path, {"cbg", "place", "area_fraction"});
    CrosswalkTable table;
    std::set<std::pair<std::uint32_t, std::string>> seen;
    std::vector<double> fraction_sum(universe->size(), 0.0);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const std::string at = loc(path, row.line);
        check_width(row, 3, path);
        const std::uint32_t c = universe->find(row.fields[0]);
        if (c == universe->size()) {
            ++table.stats.dropped_rows;
            warn(table.stats, at + ": unknown block group " + row.fields[0] + ", row dropped");
            continue;
        }
        if (row.fields[1].empty()) {
            throw input_error(at + ": empty place id");
        }
        if (!seen.emplace(c, row.fields[1]).second) {
            throw input_error(at + ": duplicate (cbg, place) pair " + row.fields[0] + "/" +
                              row.fields[1]);
        }
        const double fraction = csv::parse_double(row.fields[2], at + " area_fraction");
        if (fraction < 0.0 || fraction > 1.0) {
            throw input_error(at + ": area_fraction must lie in [0,1]");
        }
        fraction_sum[c] += fraction;
        if (fraction_sum[c] > 1.0 + 1e-9) {
            throw input_error(at + ": area fractions for " + row.fields[0] + " exceed 1");
        }
        table.entries.push_back(CrosswalkEntry{c, row.fields[1], fraction});
    }
    return table;
}

void write_patterns(const std::filesystem::path& path, const UniversePtr& universe,
                    const TimeIndex& time, const PatternsTable& table) {
    std::string out = csv::make_row({"cbg", "month", "hourly_stops", "median_dwell_minutes",
                                     "origin_devices", "total_origin_devices"});
    const std::string month = month_label(time);
    for (std::uint32_t c = 0; c < universe->size(); ++c) {
        const PatternsRecord& rec = table.records[c];
        if (!rec.present) {
            continue;
        }
        const json stops(rec.hourly_stops);
        std::map<std::string, std::int64_t> origins;
        for (const auto& [j, count] : rec.origin_devices) {
            origins.emplace(universe->id(j), count);
        }
        out += csv::make_row({universe->id(c), month, stops.dump(),
                              csv::format_double(rec.median_dwell_minutes), json(origins).dump(),
                              std::to_string(rec.total_origin_devices)});
    }
    csv::write_file_atomic(path, out);
}

void write_panel(const std::filesystem::path& path, const UniversePtr& universe,
                 const PanelTable& table) {
    std::string out = csv::make_row({"cbg", "panel_devices"});
    for (std::uint32_t c = 0; c < universe->size(); ++c) {
        out += csv::make_row({universe->id(c), std::to_string(table.devices[c])});
    }
    csv::write_file_atomic(path, out);
}

void write_population(const std::filesystem::path& path, const PopulationTable& table) {
    std::string out = csv::make_row({"cbg", "population"});
    for (std::uint32_t c = 0; c < table.universe->size(); ++c) {
        out += csv::make_row({table.universe->id(c), csv::format_double(table.values[c])});
    }
    csv::write_file_atomic(path, out);
}

void write_reference(const std::filesystem::path& path, const UniversePtr& universe,
                     const ReferenceTable& table) {
    std::string out = csv::make_row({"cbg", "daytime_pop", "nighttime_pop"});
    for (std::uint32_t c = 0; c < universe->size(); ++c) {
        out += csv::make_row({universe->id(c), csv::format_double(table.daytime[c]),
                              csv::format_double(table.nighttime[c])});
    }
    csv::write_file_atomic(path, out);
}

void write_crosswalk(const std::filesystem::path& path, const UniversePtr& universe,
                     const CrosswalkTable& table) {
    std::string out = csv::make_row({"cbg", "place", "area_fraction"});
    for (const auto& entry : table.entries) {
        out += csv::make_row({universe->id(entry.cbg), entry.place,
                              csv::format_double(entry.area_fraction)});
    }
    csv::write_file_atomic(path, out);
}

void write_surface(const std::filesystem::path& path, const HourMatrix& surface, bool gzip) {
    std::string out = csv::make_row({"cbg", "hour", "population"});
    const auto& universe = *surface.universe();
    for (std::uint32_t c = 0; c < universe.size(); ++c) {
        for (int t = 0; t < surface.rows(); ++t) {
            out += csv::make_row(
                {universe.id(c), std::to_string(t), csv::format_double(surface(t, c))});
        }
    }
    csv::write_file_atomic(path, out, gzip);
}

HourMatrix load_surface(const std::filesystem::path& path, const TimeIndex& time) {
    const auto rows = read_table(path, {"cbg", "hour", "population"});

    std::vector<CbgId> ids;
    std::unordered_map<CbgId, std::uint32_t> index;
    std::vector<std::vector<double>> columns;
    std::vector<std::vector<bool>> seen;

    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const std::string at = loc(path, row.line);
        check_width(row, 3, path);
        const CbgId& cbg = row.fields[0];
        auto it = index.find(cbg);
        if (it == index.end()) {
            it = index.emplace(cbg, static_cast<std::uint32_t>(ids.size())).first;
            ids.push_back(cbg);
            columns.emplace_back(time.tau, 0.0);
            seen.emplace_back(time.tau, false);
        }
        const std::int64_t hour = csv::parse_int64(row.fields[1], at + " hour");
        if (hour < 0 || hour >= time.tau) {
            throw input_error(at + ": hour " + std::to_string(hour) + " outside [0," +
                              std::to_string(time.tau) + ")");
        }
        if (seen[it->second][hour]) {
            throw input_error(at + ": duplicate (cbg, hour) row");
        }
        seen[it->second][hour] = true;
        const double value = csv::parse_double(row.fields[2], at + " population");
        if (value < 0.0) {
            throw input_error(at + ": negative population");
        }
        columns[it->second][hour] = value;
    }
    if (ids.empty()) {
        throw input_error(path.string() + ": no data rows");
    }
    for (std::size_t c = 0; c < ids.size(); ++c) {
        for (int t = 0; t < time.tau; ++t) {
            if (!seen[c][t]) {
                throw input_error(path.string() + ": " + ids[c] + " is missing hour " +
                                  std::to_string(t));
            }
        }
    }

    auto universe = make_universe(std::move(ids));
    HourMatrix surface(time, universe);
    for (std::uint32_t c = 0; c < universe->size(); ++c) {
        for (int t = 0; t < time.tau; ++t) {
            surface(t, c) = columns[c][t];
        }
    }
    return surface;
}

ValidationReport validate_dataset(const Dataset& dataset, const ValidationConfig& config) {
    ValidationReport report;
    const auto& universe = *dataset.universe;
    const auto n = universe.size();

    std::vector<bool> is_origin(n, false);
    std::int64_t total_stops = 0;

    for (std::uint32_t c = 0; c < n; ++c) {
        const PatternsRecord& rec = dataset.patterns.records[c];
        if (!rec.present) {
            continue;
        }
        ++report.patterns_rows;
        std::int64_t stops = 0;
        for (std::int64_t s : rec.hourly_stops) {
            stops += s;
        }
        total_stops += stops;
        report.total_origin_devices += rec.total_origin_devices;
        for (const auto& [j, count] : rec.origin_devices) {
            if (count > 0) {
                is_origin[j] = true;
            }
        }
        const double lo = static_cast<double>(rec.total_origin_devices) / config.stop_total_factor;
        const double hi = static_cast<double>(rec.total_origin_devices) * config.stop_total_factor;
        if (rec.total_origin_devices > 0 &&
            (static_cast<double>(stops) < lo || static_cast<double>(stops) > hi)) {
            report.issues.push_back(
                {"stop-total-mismatch", universe.id(c),
                 "hourly stop total " + std::to_string(stops) + " vs monthly devices " +
                     std::to_string(rec.total_origin_devices)});
        }
    }
    report.total_stops = total_stops;
    report.patterns_coverage = n == 0 ? 0.0 : static_cast<double>(report.patterns_rows) / n;

    for (std::uint32_t c = 0; c < n; ++c) {
        if (dataset.panel.devices[c] == 0) {
            ++report.zero_panel_cbgs;
            report.issues.push_back(
                {"zero-panel", universe.id(c), "zero panel: fallback people-per-device applies"});
            if (is_origin[c]) {
                report.issues.push_back({"orphan-origin", universe.id(c),
                                         "appears as an origin but has no panel devices"});
            }
        }
    }

    if (total_stops == 0) {
        report.issues.push_back({"degenerate-month", "", "no stops anywhere in the month"});
    }
    return report;
}

} // namespace fluxpop::ingest
