#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace fluxpop {

/// Opaque block-group identifier (census-style code, but any non-empty
/// string works).
using CbgId = std::string;

/// Ordered set of block-group ids with O(1) id <-> ordinal lookup.
/// Immutable after construction; share freely across threads.
class Universe {
  public:
    explicit Universe(std::vector<CbgId> ids);

    std::uint32_t size() const { return static_cast<std::uint32_t>(ids_.size()); }
    const std::vector<CbgId>& ids() const { return ids_; }
    const CbgId& id(std::uint32_t ordinal) const { return ids_.at(ordinal); }

    bool contains(const CbgId& id) const { return index_.count(id) != 0; }
    /// Ordinal of `id`; throws std::out_of_range for unknown ids.
    std::uint32_t index_of(const CbgId& id) const;
    /// Ordinal of `id`, or size() when unknown.
    std::uint32_t find(const CbgId& id) const;

  private:
    std::vector<CbgId> ids_;
    std::unordered_map<CbgId, std::uint32_t> index_;
};

using UniversePtr = std::shared_ptr<const Universe>;

Universe build_universe(std::vector<CbgId> ids);
UniversePtr make_universe(std::vector<CbgId> ids);

/// One calendar month of hours, month-relative and 0-based. Hour t covers
/// [t, t+1) local time of the block group; the input producer is responsible
/// for local-time alignment, no time-zone handling happens here.
struct TimeIndex {
    int year = 0;
    int month = 0;          // 1..12
    int first_weekday = 0;  // day-of-week of day 0; 0 = Sunday .. 6 = Saturday
    int days = 0;
    int tau = 0;            // 24 * days
};

/// Calendar month: day count and first weekday from the civil calendar.
TimeIndex build_time_index(int year, int month);

/// Synthetic period anchored at the first of year/month but with an explicit
/// day count (test worlds and truncated instances). tau = 24 * days still
/// holds; the calendar-length invariant is intentionally relaxed.
TimeIndex time_index_with_days(int year, int month, int days);

struct HourMeta {
    int day = 0;
    int hour_of_day = 0;
    bool is_weekday = false;
};

HourMeta hour_meta(const TimeIndex& time, int t);
bool day_is_weekday(const TimeIndex& time, int day);

/// Static resident population per block group, aligned to a Universe.
struct PopulationTable {
    UniversePtr universe;
    std::vector<double> values;

    double total() const;
};

/// Validates alignment, finiteness and non-negativity.
PopulationTable make_population_table(UniversePtr universe, std::vector<double> values);

/// Dense tau x n surface (stops, inbound, outbound or population, depending
/// on role). Rows are hours, columns follow the universe ordering.
class HourMatrix {
  public:
    HourMatrix() = default;
    HourMatrix(TimeIndex time, UniversePtr universe, double fill = 0.0);
    HourMatrix(TimeIndex time, UniversePtr universe, std::vector<double> cells);

    const TimeIndex& time() const { return time_; }
    const UniversePtr& universe() const { return universe_; }
    int rows() const { return time_.tau; }
    std::uint32_t cols() const { return universe_ ? universe_->size() : 0; }

    double& operator()(int t, std::uint32_t c) { return cells_[index(t, c)]; }
    double operator()(int t, std::uint32_t c) const { return cells_[index(t, c)]; }
    double at(int t, std::uint32_t c) const;

    std::span<double> row(int t);
    std::span<const double> row(int t) const;
    std::span<const double> cells() const { return cells_; }
    std::span<double> cells() { return cells_; }

    /// Throws pipeline_error if any cell is NaN or infinite.
    void check_finite(const char* role) const;

  private:
    std::size_t index(int t, std::uint32_t c) const {
        return static_cast<std::size_t>(t) * cols() + c;
    }

    TimeIndex time_;
    UniversePtr universe_;
    std::vector<double> cells_;
};

} // namespace fluxpop
