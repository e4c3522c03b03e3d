#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fluxpop/ingest.hpp"
#include "fluxpop/ipf.hpp"
#include "fluxpop/model.hpp"

namespace fluxpop::estimator {

enum class ZeroPanelFallback {
    /// Block groups without panel devices inherit the universe median
    /// people-per-device instead of dropping their flows.
    universe_median,
};

struct EstimatorConfig {
    double k = 4.0;                // adjusting coefficient for unmeasured uncertainty
    double floor_frac = 0.10;      // minimum population as a fraction of residents
    int rebalance_iterations = 1;  // balancing passes before the hard clamp
    double ipf_tol = 1e-8;
    int ipf_max_iter = 1000;
    bool include_self_flows = true; // count stops in the device's own home block group
    ZeroPanelFallback zero_panel_fallback = ZeroPanelFallback::universe_median;
    int threads = 1;
};

/// People represented by one tracked device, per block group.
struct PeoplePerDevice {
    std::vector<double> values;
    std::vector<std::uint32_t> fallback_cbgs; // zero-panel, median applied
    double median = 0.0;
};

/// Expected people per observed stop for each destination, before the
/// adjusting coefficient: W_c = sum_j (d_j / R_c) * P_j.
struct VisitorWeights {
    std::vector<double> values;
};

struct FlowSurfaces {
    HourMatrix inbound;
    HourMatrix outbound;
    std::vector<double> monthly_outbound;      // per-origin, k-scaled
    std::vector<double> hourly_inbound_totals; // per-hour row targets
};

struct RebalanceDiagnostics {
    std::int64_t negative_cells = 0;            // after assembly, before any fix
    std::int64_t cells_below_floor_initial = 0; // ditto, against the floor
    std::vector<std::int64_t> adjusted_per_pass;
    std::int64_t hard_clamped_cells = 0;
    std::vector<double> clamp_residual_per_hour; // mass added by the hard clamp
    double clamp_residual_total = 0.0;
    std::vector<double> preclamp_hour_totals;
};

struct PopulationSurface {
    HourMatrix population;
    RebalanceDiagnostics diagnostics;
};

struct RunDiagnostics {
    ipf::IpfReport ipf;
    double harmonization_factor = 1.0;
    double total_inbound = 0.0;
    int zero_panel_fallbacks = 0;
};

struct PipelineResult {
    PopulationSurface surface;
    FlowSurfaces flows; // as estimated, before rebalancing touches the surface
    RunDiagnostics diagnostics;
};

/// Spreads each destination's raw hourly stops over the dwell window: a
/// median dwell of d hours adds ceil(d)-1 follow-on stops after each raw
/// stop (none when d <= 1), truncated at the end of the month.
HourMatrix expand_stops(const ingest::PatternsTable& patterns, const TimeIndex& time,
                        const UniversePtr& universe, int threads = 1);

PeoplePerDevice people_per_device(const ingest::PanelTable& panel,
                                  const PopulationTable& population);

VisitorWeights visitor_weights(const ingest::PatternsTable& patterns,
                               const PeoplePerDevice& ppd);

/// In(t,c) = stops(t,c) * k * W_c. Identical to summing the per-origin
/// terms because the monthly origin shares do not depend on the hour.
HourMatrix estimate_inbound(const HourMatrix& stops, const VisitorWeights& weights, double k);

/// Monthly outbound mass per origin: O_j = k * P_j * sum over destinations
/// of that origin's device counts (origin maps transposed).
std::vector<double> monthly_outbound(const ingest::PatternsTable& patterns,
                                     const PeoplePerDevice& ppd, double k,
                                     bool include_self_flows);

struct OutboundResult {
    HourMatrix outbound;
    std::vector<double> hourly_inbound_totals;
    ipf::IpfReport report;
    double harmonization_factor = 1.0;
};

/// Row targets are the per-hour inbound totals (total outbound equals total
/// inbound at each hour); column targets are the harmonized monthly
/// outbound. Fits with a ones seed unless one is supplied.
OutboundResult estimate_outbound(const HourMatrix& inbound,
                                 const std::vector<double>& monthly_out,
                                 const EstimatorConfig& config,
                                 const ipf::Matrix2D* seed = nullptr);

/// Population balance: p(t,c) = N_c - Out(t,c) + In(t,c). Negative cells are
/// allowed here and recorded; the rebalance stage deals with them.
PopulationSurface assemble(const PopulationTable& population, const HourMatrix& inbound,
                           const HourMatrix& outbound);

/// Raises sub-floor cells by shrinking that block group's outbound and
/// shrinking inbound elsewhere in proportion to its monthly destination
/// shares, preserving hourly totals; finishes with a hard clamp whose mass
/// change is reported per hour.
PopulationSurface rebalance_floor(PopulationSurface surface, const PopulationTable& population,
                                  HourMatrix inbound, HourMatrix outbound,
                                  const ingest::PatternsTable& patterns,
                                  const EstimatorConfig& config);

PipelineResult run_pipeline(const ingest::Dataset& dataset, const EstimatorConfig& config);

} // namespace fluxpop::estimator
