#include "fluxpop/model.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fluxpop/errors.hpp"

namespace fluxpop {

Universe::Universe(std::vector<CbgId> ids) : ids_(std::move(ids)) {
    if (ids_.empty()) {
        throw std::invalid_argument("empty universe");
    }
    index_.reserve(ids_.size());
    for (std::uint32_t i = 0; i < ids_.size(); ++i) {
        if (ids_[i].empty()) {
            throw std::invalid_argument("empty id at position " + std::to_string(i));
        }
        auto [it, inserted] = index_.emplace(ids_[i], i);
        if (!inserted) {
            throw std::invalid_argument("duplicate id " + ids_[i]);
        }
    }
}

std::uint32_t Universe::index_of(const CbgId& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) {
        throw std::out_of_range("unknown id " + id);
    }
    return it->second;
}

std::uint32_t Universe::find(const CbgId& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? size() : it->second;
}

Universe build_universe(std::vector<CbgId> ids) { return Universe(std::move(ids)); }

UniversePtr make_universe(std::vector<CbgId> ids) {
    return std::make_shared<const Universe>(std::move(ids));
}

TimeIndex build_time_index(int year, int month) {
    namespace chr = std::chrono;
    if (month < 1 || month > 12) {
        throw std::invalid_argument("month must be in 1..12, got " + std::to_string(month));
    }
    const chr::year y{year};
    const chr::month m{static_cast<unsigned>(month)};
    const chr::year_month_day_last last{y, chr::month_day_last{m}};
    const int days = static_cast<int>(static_cast<unsigned>(last.day()));
    const chr::weekday first{chr::sys_days{chr::year_month_day{y, m, chr::day{1}}}};
    TimeIndex idx;
    idx.year = year;
    idx.month = month;
    idx.first_weekday = static_cast<int>(first.c_encoding());
    idx.days = days;
    idx.tau = 24 * days;
    return idx;
}

TimeIndex time_index_with_days(int year, int month, int days) {
    TimeIndex idx = build_time_index(year, month);
    if (days < 1) {
        throw std::invalid_argument("day count must be positive");
    }
    idx.days = days;
    idx.tau = 24 * days;
    return idx;
}

HourMeta hour_meta(const TimeIndex& time, int t) {
    if (t < 0 || t >= time.tau) {
        throw std::out_of_range("hour " + std::to_string(t) + " outside [0," +
                                std::to_string(time.tau) + ")");
    }
    HourMeta meta;
    meta.day = t / 24;
    meta.hour_of_day = t % 24;
    meta.is_weekday = day_is_weekday(time, meta.day);
    return meta;
}

bool day_is_weekday(const TimeIndex& time, int day) {
    const int dow = (time.first_weekday + day) % 7; // 0 = Sunday
    return dow >= 1 && dow <= 5;
}

double PopulationTable::total() const {
    return std::accumulate(values.begin(), values.end(), 0.0);
}

PopulationTable make_population_table(UniversePtr universe, std::vector<double> values) {
    if (!universe) {
        throw std::invalid_argument("population table needs a universe");
    }
    if (values.size() != universe->size()) {
        throw std::invalid_argument("population table has " + std::to_string(values.size()) +
                                    " entries for a universe of " +
                                    std::to_string(universe->size()));
    }
    for (std::uint32_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]) || values[i] < 0.0) {
            throw std::invalid_argument("population for " + universe->id(i) +
                                        " must be finite and non-negative");
        }
    }
    return PopulationTable{std::move(universe), std::move(values)};
}

HourMatrix::HourMatrix(TimeIndex time, UniversePtr universe, double fill)
    : time_(time), universe_(std::move(universe)) {
    if (!universe_) {
        throw std::invalid_argument("hour matrix needs a universe");
    }
    cells_.assign(static_cast<std::size_t>(time_.tau) * universe_->size(), fill);
}

HourMatrix::HourMatrix(TimeIndex time, UniversePtr universe, std::vector<double> cells)
    : time_(time), universe_(std::move(universe)), cells_(std::move(cells)) {
    if (!universe_) {
        throw std::invalid_argument("hour matrix needs a universe");
    }
    const auto expected = static_cast<std::size_t>(time_.tau) * universe_->size();
    if (cells_.size() != expected) {
        throw std::invalid_argument("hour matrix expects " + std::to_string(expected) +
                                    " cells, got " + std::to_string(cells_.size()));
    }
}

double HourMatrix::at(int t, std::uint32_t c) const {
    if (t < 0 || t >= rows() || c >= cols()) {
        throw std::out_of_range("hour matrix index out of range");
    }
    return cells_[index(t, c)];
}

std::span<double> HourMatrix::row(int t) {
    return {cells_.data() + index(t, 0), cols()};
}

std::span<const double> HourMatrix::row(int t) const {
    return {cells_.data() + index(t, 0), cols()};
}

void HourMatrix::check_finite(const char* role) const {
    for (double v : cells_) {
        if (!std::isfinite(v)) {
            throw pipeline_error(std::string(role) + " surface contains a non-finite value");
        }
    }
}

} // namespace fluxpop
