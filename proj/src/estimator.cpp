#include "fluxpop/estimator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fluxpop/errors.hpp"
#include "fluxpop/parallel.hpp"

namespace fluxpop::estimator {

namespace {

int expansion_hours(double median_dwell_minutes) {
    const double hours = median_dwell_minutes / 60.0;
    if (hours <= 1.0) {
        return 0;
    }
    return static_cast<int>(std::ceil(hours)) - 1;
}

void require_positive_k(double k) {
    if (!(k > 0.0) || !std::isfinite(k)) {
        throw std::invalid_argument("adjusting coefficient k must be positive");
    }
}

} // namespace

HourMatrix expand_stops(const ingest::PatternsTable& patterns, const TimeIndex& time,
                        const UniversePtr& universe, int threads) {
    HourMatrix stops(time, universe);
    const int tau = time.tau;
    parallel_for(universe->size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t c = begin; c < end; ++c) {
            const ingest::PatternsRecord& rec = patterns.records[c];
            if (!rec.present) {
                continue;
            }
            const int extra = expansion_hours(rec.median_dwell_minutes);
            // Each raw stop at s also counts at s+1 .. s+extra; running
            // window sum over the raw series.
            double window = 0.0;
            for (int t = 0; t < tau; ++t) {
                window += static_cast<double>(rec.hourly_stops[t]);
                const int leaving = t - extra - 1;
                if (leaving >= 0) {
                    window -= static_cast<double>(rec.hourly_stops[leaving]);
                }
                stops(t, static_cast<std::uint32_t>(c)) = window;
            }
        }
    });
    return stops;
}

PeoplePerDevice people_per_device(const ingest::PanelTable& panel,
                                  const PopulationTable& population) {
    const auto n = population.universe->size();
    PeoplePerDevice out;
    out.values.assign(n, 0.0);

    std::vector<double> defined;
    defined.reserve(n);
    for (std::uint32_t c = 0; c < n; ++c) {
        if (panel.devices[c] > 0) {
            out.values[c] = population.values[c] / static_cast<double>(panel.devices[c]);
            defined.push_back(out.values[c]);
        } else {
            out.fallback_cbgs.push_back(c);
        }
    }
    if (defined.empty()) {
        throw pipeline_error("people_per_device: every block group has zero panel devices");
    }
    std::sort(defined.begin(), defined.end());
    const std::size_t mid = defined.size() / 2;
    out.median = defined.size() % 2 == 1 ? defined[mid]
                                         : 0.5 * (defined[mid - 1] + defined[mid]);
    for (std::uint32_t c : out.fallback_cbgs) {
        out.values[c] = out.median;
    }
    return out;
}

VisitorWeights visitor_weights(const ingest::PatternsTable& patterns,
                               const PeoplePerDevice& ppd) {
    VisitorWeights weights;
    weights.values.assign(patterns.records.size(), 0.0);
    for (std::size_t c = 0; c < patterns.records.size(); ++c) {
        const ingest::PatternsRecord& rec = patterns.records[c];
        if (!rec.present || rec.total_origin_devices == 0) {
            continue; // unvisited destination
        }
        const double total = static_cast<double>(rec.total_origin_devices);
        double w = 0.0;
        for (const auto& [j, count] : rec.origin_devices) {
            w += (static_cast<double>(count) / total) * ppd.values[j];
        }
        weights.values[c] = w;
    }
    return weights;
}

HourMatrix estimate_inbound(const HourMatrix& stops, const VisitorWeights& weights, double k) {
    require_positive_k(k);
    if (weights.values.size() != stops.cols()) {
        throw std::invalid_argument("visitor weights do not match the stop surface");
    }
    HourMatrix inbound(stops.time(), stops.universe());
    const auto n = stops.cols();
    for (int t = 0; t < stops.rows(); ++t) {
        const auto src = stops.row(t);
        auto dst = inbound.row(t);
        for (std::uint32_t c = 0; c < n; ++c) {
            dst[c] = src[c] * k * weights.values[c];
        }
    }
    return inbound;
}

std::vector<double> monthly_outbound(const ingest::PatternsTable& patterns,
                                     const PeoplePerDevice& ppd, double k,
                                     bool include_self_flows) {
    require_positive_k(k);
    std::vector<double> out(ppd.values.size(), 0.0);
    for (std::size_t c = 0; c < patterns.records.size(); ++c) {
        const auto dest = static_cast<std::uint32_t>(c);
        for (const auto& [j, count] : patterns.records[c].origin_devices) {
            if (!include_self_flows && j == dest) {
                continue;
            }
            out[j] += k * ppd.values[j] * static_cast<double>(count);
        }
    }
    return out;
}

OutboundResult estimate_outbound(const HourMatrix& inbound,
                                 const std::vector<double>& monthly_out,
                                 const EstimatorConfig& config, const ipf::Matrix2D* seed) {
    const auto n = inbound.cols();
    const int tau = inbound.rows();
    if (monthly_out.size() != n) {
        throw std::invalid_argument("monthly outbound does not match the inbound surface");
    }

    OutboundResult result{HourMatrix(inbound.time(), inbound.universe()),
                          std::vector<double>(tau, 0.0),
                          {},
                          1.0};
    double total_in = 0.0;
    for (int t = 0; t < tau; ++t) {
        double row = 0.0;
        for (double v : inbound.row(t)) {
            row += v;
        }
        result.hourly_inbound_totals[t] = row;
        total_in += row;
    }

    if (total_in == 0.0) {
        // No mobility this month; nothing to fit and nothing flows out.
        result.report.converged = true;
        return result;
    }
    const double total_out = std::accumulate(monthly_out.begin(), monthly_out.end(), 0.0);
    if (total_out <= 0.0) {
        throw pipeline_error("estimate_outbound: inbound mass present but no monthly outbound");
    }

    const auto col_targets = ipf::harmonize_targets(result.hourly_inbound_totals, monthly_out);
    result.harmonization_factor = total_in / total_out;

    ipf::Matrix2D start =
        seed != nullptr ? *seed : ipf::Matrix2D::ones(static_cast<std::size_t>(tau), n);
    ipf::IpfOptions options;
    options.tol = config.ipf_tol;
    options.max_iter = config.ipf_max_iter;
    options.threads = config.threads;
    auto [fitted, report] = ipf::ipf_fit(std::move(start), result.hourly_inbound_totals,
                                         col_targets, options);
    result.report = std::move(report);
    result.outbound =
        HourMatrix(inbound.time(), inbound.universe(), std::move(fitted.cells));
    return result;
}

PopulationSurface assemble(const PopulationTable& population, const HourMatrix& inbound,
                           const HourMatrix& outbound) {
    const auto n = population.universe->size();
    if (inbound.cols() != n || outbound.cols() != n || inbound.rows() != outbound.rows()) {
        throw std::invalid_argument("assemble: misaligned surfaces");
    }
    PopulationSurface surface{HourMatrix(inbound.time(), inbound.universe()), {}};
    for (int t = 0; t < inbound.rows(); ++t) {
        const auto in_row = inbound.row(t);
        const auto out_row = outbound.row(t);
        auto p_row = surface.population.row(t);
        for (std::uint32_t c = 0; c < n; ++c) {
            p_row[c] = population.values[c] - out_row[c] + in_row[c];
            if (p_row[c] < 0.0) {
                ++surface.diagnostics.negative_cells;
            }
        }
    }
    return surface;
}

PopulationSurface rebalance_floor(PopulationSurface surface, const PopulationTable& population,
                                  HourMatrix inbound, HourMatrix outbound,
                                  const ingest::PatternsTable& patterns,
                                  const EstimatorConfig& config) {
    const auto n = population.universe->size();
    const int tau = surface.population.rows();
    if (config.floor_frac < 0.0 || config.floor_frac >= 1.0) {
        throw std::invalid_argument("floor fraction must lie in [0,1)");
    }

    std::vector<double> floor(n, 0.0);
    for (std::uint32_t c = 0; c < n; ++c) {
        floor[c] = config.floor_frac * population.values[c];
    }

    auto& diag = surface.diagnostics;
    for (int t = 0; t < tau; ++t) {
        const auto row = surface.population.row(t);
        for (std::uint32_t c = 0; c < n; ++c) {
            if (population.values[c] > 0.0 && row[c] < floor[c]) {
                ++diag.cells_below_floor_initial;
            }
        }
    }

    // Monthly destination shares per origin: the origin maps transposed.
    std::vector<std::vector<std::pair<std::uint32_t, double>>> shares(n);
    {
        std::vector<double> totals(n, 0.0);
        for (std::size_t c = 0; c < patterns.records.size(); ++c) {
            const auto dest = static_cast<std::uint32_t>(c);
            for (const auto& [j, count] : patterns.records[c].origin_devices) {
                if (!config.include_self_flows && j == dest) {
                    continue;
                }
                if (count > 0) {
                    shares[j].emplace_back(static_cast<std::uint32_t>(c),
                                           static_cast<double>(count));
                    totals[j] += static_cast<double>(count);
                }
            }
        }
        for (std::uint32_t j = 0; j < n; ++j) {
            for (auto& [c, v] : shares[j]) {
                v /= totals[j];
            }
        }
    }

    for (int pass = 0; pass < config.rebalance_iterations; ++pass) {
        std::atomic<std::int64_t> adjusted{0};
        // Deficit cells only touch their own hour, so hours are independent.
        parallel_for(static_cast<std::size_t>(tau), config.threads,
                     [&](std::size_t begin, std::size_t end) {
            std::int64_t local = 0;
            for (std::size_t t = begin; t < end; ++t) {
                auto p_row = surface.population.row(static_cast<int>(t));
                auto in_row = inbound.row(static_cast<int>(t));
                auto out_row = outbound.row(static_cast<int>(t));
                for (std::uint32_t c = 0; c < n; ++c) {
                    if (population.values[c] <= 0.0 || p_row[c] >= floor[c]) {
                        continue;
                    }
                    if (shares[c].empty()) {
                        continue; // no recorded destinations to take the mass back from
                    }
                    const double deficit = floor[c] - p_row[c];
                    out_row[c] -= deficit;
                    p_row[c] += deficit;
                    for (const auto& [dest, share] : shares[c]) {
                        const double cut = deficit * share;
                        in_row[dest] -= cut;
                        p_row[dest] -= cut;
                    }
                    ++local;
                }
            }
            adjusted.fetch_add(local, std::memory_order_relaxed);
        });
        diag.adjusted_per_pass.push_back(adjusted.load());
    }

    // Hard clamp for whatever is left; this is the only step that changes
    // hourly totals, and the change is reported exactly.
    diag.clamp_residual_per_hour.assign(tau, 0.0);
    diag.preclamp_hour_totals.assign(tau, 0.0);
    for (int t = 0; t < tau; ++t) {
        auto row = surface.population.row(t);
        double pre_total = 0.0;
        double added = 0.0;
        for (std::uint32_t c = 0; c < n; ++c) {
            pre_total += row[c];
            if (row[c] < floor[c]) {
                added += floor[c] - row[c];
                row[c] = floor[c];
                ++diag.hard_clamped_cells;
            }
        }
        diag.preclamp_hour_totals[t] = pre_total;
        diag.clamp_residual_per_hour[t] = added;
        diag.clamp_residual_total += added;
    }
    return surface;
}

PipelineResult run_pipeline(const ingest::Dataset& dataset, const EstimatorConfig& config) {
    require_positive_k(config.k);
    const auto& universe = dataset.universe;
    if (!universe || dataset.patterns.records.size() != universe->size() ||
        dataset.panel.devices.size() != universe->size() ||
        dataset.population.values.size() != universe->size()) {
        throw std::invalid_argument("run_pipeline: dataset tables are not aligned");
    }

    const HourMatrix stops = expand_stops(dataset.patterns, dataset.time, universe,
                                          config.threads);
    const PeoplePerDevice ppd = people_per_device(dataset.panel, dataset.population);
    const VisitorWeights weights = visitor_weights(dataset.patterns, ppd);
    HourMatrix inbound = estimate_inbound(stops, weights, config.k);
    inbound.check_finite("inbound");
    std::vector<double> monthly =
        monthly_outbound(dataset.patterns, ppd, config.k, config.include_self_flows);

    OutboundResult out = estimate_outbound(inbound, monthly, config);
    if (!out.report.converged) {
        throw pipeline_error("outbound fit did not converge within " +
                             std::to_string(config.ipf_max_iter) + " iterations");
    }

    PopulationSurface surface = assemble(dataset.population, inbound, out.outbound);
    surface = rebalance_floor(std::move(surface), dataset.population, inbound, out.outbound,
                              dataset.patterns, config);

    PipelineResult result{std::move(surface),
                          FlowSurfaces{std::move(inbound), std::move(out.outbound),
                                       std::move(monthly),
                                       std::move(out.hourly_inbound_totals)},
                          RunDiagnostics{}};
    result.diagnostics.ipf = std::move(out.report);
    result.diagnostics.harmonization_factor = out.harmonization_factor;
    result.diagnostics.zero_panel_fallbacks = static_cast<int>(ppd.fallback_cbgs.size());
    for (double v : result.flows.hourly_inbound_totals) {
        result.diagnostics.total_inbound += v;
    }
    return result;
}

} // namespace fluxpop::estimator
