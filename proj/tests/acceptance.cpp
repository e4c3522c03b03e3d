// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion is self-contained and pins its tolerances.

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fluxpop/analysis.hpp"
#include "fluxpop/cli.hpp"
#include "fluxpop/estimator.hpp"
#include "fluxpop/ingest.hpp"
#include "fluxpop/ipf.hpp"
#include "fluxpop/synth.hpp"

using namespace fluxpop;
namespace fs = std::filesystem;

namespace {

struct Gate {
    bool ok = true;
    std::string detail;

    void require(bool condition, const std::string& why) {
        if (!condition && ok) {
            ok = false;
            detail = why;
        }
    }
    void note(const std::string& info) {
        if (ok) {
            detail = info;
        }
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

ingest::Dataset to_dataset(const synth::ObservationBundle& bundle) {
    ingest::Dataset dataset;
    dataset.universe = bundle.universe;
    dataset.time = bundle.time;
    dataset.patterns = bundle.patterns;
    dataset.panel = bundle.panel;
    dataset.population = bundle.population;
    dataset.reference = bundle.reference;
    dataset.crosswalk = bundle.crosswalk;
    return dataset;
}

fs::path scratch_dir(const std::string& tag) {
    const fs::path dir =
        fs::temp_directory_path() / ("fluxpop-accept-" + tag + "-" +
                                     std::to_string(std::random_device{}()));
    fs::create_directories(dir);
    return dir;
}

// -------------------------------------------------------------------------
// 1. Conservation on a large synthetic bundle, end to end under two minutes.
Gate criterion_conservation() {
    Gate gate;
    const auto started = std::chrono::steady_clock::now();

    synth::SynthConfig config;
    config.preset = "mixed";
    config.n_cbgs = 5000;
    config.rng_seed = 20220901;
    config.year = 2022;
    config.month = 9;

    const fs::path dir = scratch_dir("conserve");
    {
        const auto world = synth::generate_world(config);
        const auto bundle = synth::observe(world, config);
        synth::write_bundle(dir, bundle);
    }

    const auto [universe, population] =
        ingest::load_population_universe(dir / "population.csv");
    ingest::Dataset dataset;
    dataset.universe = universe;
    dataset.time = build_time_index(config.year, config.month);
    dataset.population = population;
    dataset.patterns = ingest::load_patterns(dir / "patterns.csv", universe, dataset.time);
    dataset.panel = ingest::load_panel(dir / "panel.csv", universe);

    estimator::EstimatorConfig est; // defaults: k = 4, floor 0.10, one pass
    const auto result = estimator::run_pipeline(dataset, est);

    const double residents = dataset.population.total();
    double worst = 0.0;
    for (double total : result.surface.diagnostics.preclamp_hour_totals) {
        worst = std::max(worst, std::abs(total - residents) / residents);
    }
    gate.require(worst <= 1e-6,
                 "pre-clamp hourly totals drift " + fmt(worst) + " > 1e-6 relative");

    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    gate.require(seconds < 120.0, "end-to-end runtime " + fmt(seconds) + "s exceeds 120s");
    fs::remove_all(dir);
    gate.note("n=5000, tau=720, max drift " + fmt(worst) + ", " + fmt(seconds) + "s");
    return gate;
}

// -------------------------------------------------------------------------
// 2. The fitting core: closed form, marginals at scale, exact invariances.
Gate criterion_ipf() {
    Gate gate;
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> target(0.5, 25.0);
    std::uniform_real_distribution<double> cell(0.5, 1.5);

    // (a) ones seed equals the outer product
    for (int trial = 0; trial < 5 && gate.ok; ++trial) {
        const std::size_t r = 30, c = 40;
        std::vector<double> rows(r), cols(c);
        for (double& v : rows) {
            v = target(rng);
        }
        for (double& v : cols) {
            v = target(rng);
        }
        cols = ipf::harmonize_targets(rows, cols);
        double total = 0.0;
        for (double v : rows) {
            total += v;
        }
        const auto [fit, report] = ipf::ipf_fit(ipf::Matrix2D::ones(r, c), rows, cols);
        gate.require(report.converged, "ones-seed fit did not converge");
        for (std::size_t i = 0; i < r && gate.ok; ++i) {
            for (std::size_t j = 0; j < c; ++j) {
                const double expected = rows[i] * cols[j] / total;
                if (std::abs(fit(i, j) - expected) > 1e-10 * std::max(1.0, expected)) {
                    gate.require(false, "ones-seed cell deviates from the outer product");
                    break;
                }
            }
        }
    }

    // (b) random feasible instances up to 744 x 5000
    const std::vector<std::pair<std::size_t, std::size_t>> shapes{
        {24, 100}, {240, 1500}, {744, 5000}};
    for (const auto& [r, c] : shapes) {
        if (!gate.ok) {
            break;
        }
        std::vector<double> rows(r), cols(c);
        for (double& v : rows) {
            v = target(rng);
        }
        for (double& v : cols) {
            v = target(rng);
        }
        cols = ipf::harmonize_targets(rows, cols);
        ipf::Matrix2D seed = ipf::Matrix2D::filled(r, c, 0.0);
        for (double& v : seed.cells) {
            v = cell(rng);
        }
        const ipf::IpfOptions options{1e-8, 1000, 1};
        const auto [fit, report] = ipf::ipf_fit(std::move(seed), rows, cols, options);
        gate.require(report.converged, "fit did not converge at " + std::to_string(r) + "x" +
                                           std::to_string(c));
        gate.require(report.max_row_residual <= 1e-8 && report.max_col_residual <= 1e-8,
                     "marginal residuals above 1e-8 at " + std::to_string(r) + "x" +
                         std::to_string(c));
    }

    // (c) zero preservation and scale equivariance, exactly
    {
        ipf::Matrix2D seed = ipf::Matrix2D::ones(6, 7);
        seed(0, 3) = 0.0;
        seed(4, 1) = 0.0;
        seed(5, 6) = 0.0;
        std::vector<double> rows(6), cols(7);
        for (double& v : rows) {
            v = target(rng);
        }
        for (double& v : cols) {
            v = target(rng);
        }
        cols = ipf::harmonize_targets(rows, cols);
        const auto [fit, report] = ipf::ipf_fit(seed, rows, cols);
        gate.require(report.converged, "structured fit did not converge");
        gate.require(fit(0, 3) == 0.0 && fit(4, 1) == 0.0 && fit(5, 6) == 0.0,
                     "zero seed cells did not survive");

        std::vector<double> rows2 = rows, cols2 = cols;
        for (double& v : rows2) {
            v *= 2.0;
        }
        for (double& v : cols2) {
            v *= 2.0;
        }
        const auto [doubled, r2] = ipf::ipf_fit(seed, rows2, cols2);
        bool exact = r2.converged;
        for (std::size_t i = 0; i < fit.cells.size() && exact; ++i) {
            exact = doubled.cells[i] == 2.0 * fit.cells[i];
        }
        gate.require(exact, "power-of-two target scaling is not exactly equivariant");
    }
    gate.note("closed form, 744x5000 marginals, exact invariances");
    return gate;
}

// -------------------------------------------------------------------------
// 3. Exact recovery on the hopper worlds.
Gate criterion_exact_recovery() {
    Gate gate;

    synth::SynthConfig config;
    config.preset = "separable";
    config.year = 2022;
    config.month = 9;
    config.rng_seed = 5;

    estimator::EstimatorConfig est;
    est.k = 1.0;

    double separable_err = 0.0;
    {
        const auto world = synth::generate_world(config);
        const auto bundle = synth::observe(world, config);
        const auto result = estimator::run_pipeline(to_dataset(bundle), est);
        const auto truth = synth::true_population(world);
        for (int t = 0; t < truth.rows(); ++t) {
            for (std::uint32_t c = 0; c < truth.cols(); ++c) {
                const double err = std::abs(result.surface.population(t, c) - truth(t, c)) /
                                   std::max(1.0, truth(t, c));
                separable_err = std::max(separable_err, err);
            }
        }
        gate.require(separable_err <= 1e-6,
                     "separable world per-cell error " + fmt(separable_err) + " > 1e-6");
    }

    config.preset = "nonseparable";
    {
        const auto world = synth::generate_world(config);
        const auto bundle = synth::observe(world, config);
        const auto result = estimator::run_pipeline(to_dataset(bundle), est);
        gate.require(result.surface.diagnostics.hard_clamped_cells == 0,
                     "unexpected clamping in the nonseparable world");

        const auto truth = synth::true_population(world);
        for (int t = 0; t < truth.rows() && gate.ok; ++t) {
            double est_total = 0.0, true_total = 0.0;
            for (std::uint32_t c = 0; c < truth.cols(); ++c) {
                est_total += result.surface.population(t, c);
                true_total += truth(t, c);
            }
            gate.require(std::abs(est_total - true_total) <= 1e-8 * std::max(1.0, true_total),
                         "hour " + std::to_string(t) + " total off by more than 1e-8");
        }

        const auto visitors = synth::true_inbound(world);
        for (int t = 0; t < visitors.rows() && gate.ok; ++t) {
            for (std::uint32_t c = 0; c < visitors.cols(); ++c) {
                const double err = std::abs(result.flows.inbound(t, c) - visitors(t, c)) /
                                   std::max(1.0, visitors(t, c));
                if (err > 1e-8) {
                    gate.require(false, "inbound cell error " + fmt(err) + " > 1e-8");
                    break;
                }
            }
        }

        const auto arrivals = synth::true_monthly_outbound_arrivals(world);
        for (std::uint32_t j = 0; j < arrivals.size() && gate.ok; ++j) {
            const double err = std::abs(result.flows.monthly_outbound[j] - arrivals[j]) /
                               std::max(1.0, arrivals[j]);
            gate.require(err <= 1e-8, "monthly outbound error " + fmt(err) + " > 1e-8");
        }
    }
    gate.note("separable per-cell err " + fmt(separable_err) +
              "; nonseparable marginals exact");
    return gate;
}

// -------------------------------------------------------------------------
// 4. Small-instance mobility-cube oracle: both collapsed sides of the
// explicitly materialized hour x destination x origin cube must match the
// pipeline's marginal families.
Gate criterion_cube_oracle() {
    Gate gate;

    synth::SynthConfig config;
    config.preset = "nonseparable";
    config.n_cbgs = 12;
    config.year = 2022;
    config.month = 9;
    config.days = 2; // tau = 48
    const auto world = synth::generate_world(config);
    const auto bundle = synth::observe(world, config);
    const auto dataset = to_dataset(bundle);

    estimator::EstimatorConfig est;
    est.k = 4.0;
    const auto result = estimator::run_pipeline(dataset, est);

    const auto n = dataset.universe->size();
    const int tau = dataset.time.tau;

    // Split each hour's expanded stops by the monthly origin shares, scaled
    // to people: the full cube the streaming pipeline never materializes.
    const auto stops =
        estimator::expand_stops(dataset.patterns, dataset.time, dataset.universe);
    const auto ppd = estimator::people_per_device(dataset.panel, dataset.population);
    std::vector<double> cube(static_cast<std::size_t>(tau) * n * n, 0.0);
    for (std::uint32_t c = 0; c < n; ++c) {
        const auto& rec = dataset.patterns.records[c];
        if (!rec.present || rec.total_origin_devices == 0) {
            continue;
        }
        for (const auto& [j, devices] : rec.origin_devices) {
            const double share =
                static_cast<double>(devices) / static_cast<double>(rec.total_origin_devices);
            for (int t = 0; t < tau; ++t) {
                cube[(static_cast<std::size_t>(t) * n + c) * n + j] +=
                    stops(t, c) * est.k * share * ppd.values[j];
            }
        }
    }

    // Origin-collapsed side == the pipeline's inbound surface.
    for (int t = 0; t < tau && gate.ok; ++t) {
        for (std::uint32_t c = 0; c < n; ++c) {
            double inbound = 0.0;
            for (std::uint32_t j = 0; j < n; ++j) {
                inbound += cube[(static_cast<std::size_t>(t) * n + c) * n + j];
            }
            const double err = std::abs(inbound - result.flows.inbound(t, c)) /
                               std::max(1.0, result.flows.inbound(t, c));
            if (err > 1e-8) {
                gate.require(false, "inbound side differs by " + fmt(err));
                break;
            }
        }
    }

    // Destination-collapsed side: shares the pipeline's hourly totals and
    // the fitted outbound's per-origin monthly masses.
    for (int t = 0; t < tau && gate.ok; ++t) {
        double hour_total = 0.0;
        for (std::size_t i = 0; i < static_cast<std::size_t>(n) * n; ++i) {
            hour_total += cube[static_cast<std::size_t>(t) * n * n + i];
        }
        const double err = std::abs(hour_total - result.flows.hourly_inbound_totals[t]) /
                           std::max(1.0, result.flows.hourly_inbound_totals[t]);
        gate.require(err <= 1e-8, "hourly total differs by " + fmt(err));
    }
    for (std::uint32_t j = 0; j < n && gate.ok; ++j) {
        double cube_monthly = 0.0;
        double fitted_monthly = 0.0;
        for (int t = 0; t < tau; ++t) {
            for (std::uint32_t c = 0; c < n; ++c) {
                cube_monthly += cube[(static_cast<std::size_t>(t) * n + c) * n + j];
            }
            fitted_monthly += result.flows.outbound(t, j);
        }
        const double err =
            std::abs(cube_monthly - fitted_monthly) / std::max(1.0, cube_monthly);
        gate.require(err <= 1e-8, "per-origin monthly mass differs by " + fmt(err));
    }
    gate.note("n=12, tau=48 cube sides match the pipeline marginals");
    return gate;
}

// -------------------------------------------------------------------------
// 5. Floor and rebalance guarantees under a k that forces negatives.
Gate criterion_floor_rebalance() {
    Gate gate;

    synth::SynthConfig config;
    config.preset = "bedroom";
    config.year = 2022;
    config.month = 9;
    const auto world = synth::generate_world(config);
    const auto bundle = synth::observe(world, config);
    const auto dataset = to_dataset(bundle);

    estimator::EstimatorConfig est;
    est.k = 4.0; // inflates flows well past the residents of commuter homes

    // Stage by stage so the assembled (pre-rebalance) totals are visible.
    const auto stops =
        estimator::expand_stops(dataset.patterns, dataset.time, dataset.universe);
    const auto ppd = estimator::people_per_device(dataset.panel, dataset.population);
    const auto weights = estimator::visitor_weights(dataset.patterns, ppd);
    const auto inbound = estimator::estimate_inbound(stops, weights, est.k);
    const auto monthly =
        estimator::monthly_outbound(dataset.patterns, ppd, est.k, est.include_self_flows);
    const auto out = estimator::estimate_outbound(inbound, monthly, est);
    auto assembled = estimator::assemble(dataset.population, inbound, out.outbound);
    gate.require(assembled.diagnostics.negative_cells > 0,
                 "k=4 failed to force negative cells; the scenario is vacuous");

    const int tau = dataset.time.tau;
    std::vector<double> assembled_totals(tau, 0.0);
    for (int t = 0; t < tau; ++t) {
        for (double v : assembled.population.row(t)) {
            assembled_totals[static_cast<std::size_t>(t)] += v;
        }
    }

    std::int64_t clamped = 0;
    for (int passes : {1, 3}) {
        estimator::EstimatorConfig pass_cfg = est;
        pass_cfg.rebalance_iterations = passes;
        const auto fixed = estimator::rebalance_floor(assembled, dataset.population, inbound,
                                                      out.outbound, dataset.patterns, pass_cfg);
        clamped += fixed.diagnostics.hard_clamped_cells;

        // floor guarantee
        double floor_violation = 0.0;
        for (int t = 0; t < tau; ++t) {
            for (std::uint32_t c = 0; c < dataset.universe->size(); ++c) {
                const double floor = 0.10 * dataset.population.values[c];
                floor_violation =
                    std::max(floor_violation, floor - fixed.population(t, c));
            }
        }
        gate.require(floor_violation <= 1e-9, "floor violated by " + fmt(floor_violation) +
                                                  " with " + std::to_string(passes) +
                                                  " passes");

        // every pass conserves the hourly totals
        for (int t = 0; t < tau && gate.ok; ++t) {
            const double drift =
                std::abs(fixed.diagnostics.preclamp_hour_totals[static_cast<std::size_t>(t)] -
                         assembled_totals[static_cast<std::size_t>(t)]) /
                std::max(1.0, std::abs(assembled_totals[static_cast<std::size_t>(t)]));
            gate.require(drift <= 1e-9, "rebalance drifted hourly totals by " + fmt(drift));
        }

        // the hard clamp's reported residual is the actual mass change
        for (int t = 0; t < tau && gate.ok; ++t) {
            double post_total = 0.0;
            for (double v : fixed.population.row(t)) {
                post_total += v;
            }
            const double actual =
                post_total - fixed.diagnostics.preclamp_hour_totals[static_cast<std::size_t>(t)];
            gate.require(
                std::abs(actual -
                         fixed.diagnostics.clamp_residual_per_hour[static_cast<std::size_t>(t)]) <=
                    1e-9 * std::max(1.0, std::abs(actual)),
                "clamp residual misreported at hour " + std::to_string(t));
        }
    }
    gate.note("negatives forced, floor held, totals conserved, residuals exact");
    return gate;
}

// -------------------------------------------------------------------------
// 6. Micro-oracles for the inbound factorization and the weighted metric.
Gate criterion_micro_oracles() {
    Gate gate;
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // factorized inbound vs the explicit per-origin sum
    {
        const int n = 15, tau = 48;
        std::vector<CbgId> ids;
        for (int i = 0; i < n; ++i) {
            ids.push_back("G" + std::to_string(i));
        }
        const auto universe = make_universe(std::move(ids));
        const TimeIndex time = time_index_with_days(2022, 9, tau / 24);
        ingest::PatternsTable patterns;
        patterns.records.assign(n, ingest::PatternsRecord{});
        estimator::PeoplePerDevice ppd;
        ppd.values.assign(n, 0.0);
        for (auto& v : ppd.values) {
            v = 5.0 + 45.0 * unit(rng);
        }
        for (int c = 0; c < n; ++c) {
            ingest::PatternsRecord rec;
            rec.present = true;
            rec.hourly_stops.assign(tau, 0);
            for (auto& s : rec.hourly_stops) {
                s = static_cast<std::int64_t>(rng() % 6);
            }
            for (int j = 0; j < n; ++j) {
                if (unit(rng) < 0.5) {
                    rec.origin_devices.emplace_back(static_cast<std::uint32_t>(j),
                                                    static_cast<std::int64_t>(1 + rng() % 8));
                }
            }
            for (const auto& [j, d] : rec.origin_devices) {
                rec.total_origin_devices += d;
            }
            patterns.records[static_cast<std::size_t>(c)] = rec;
        }
        const double k = 4.0;
        const auto stops = estimator::expand_stops(patterns, time, universe);
        const auto weights = estimator::visitor_weights(patterns, ppd);
        const auto inbound = estimator::estimate_inbound(stops, weights, k);
        double worst = 0.0;
        for (int t = 0; t < tau; ++t) {
            for (int c = 0; c < n; ++c) {
                const auto& rec = patterns.records[static_cast<std::size_t>(c)];
                double explicit_sum = 0.0;
                for (const auto& [j, d] : rec.origin_devices) {
                    explicit_sum += stops(t, static_cast<std::uint32_t>(c)) * k *
                                    (static_cast<double>(d) /
                                     static_cast<double>(rec.total_origin_devices)) *
                                    ppd.values[j];
                }
                const double got = inbound(t, static_cast<std::uint32_t>(c));
                worst = std::max(worst, std::abs(got - explicit_sum) /
                                            std::max(1.0, std::abs(explicit_sum)));
            }
        }
        gate.require(worst <= 1e-12, "factorized inbound off by " + fmt(worst));
    }

    // weighted relative-difference metric vs a direct recomputation
    {
        const int n = 60;
        std::vector<CbgId> ids;
        for (int i = 0; i < n; ++i) {
            ids.push_back("R" + std::to_string(i));
        }
        const auto universe = make_universe(std::move(ids));
        const TimeIndex time = time_index_with_days(2022, 9, 7);
        HourMatrix surface(time, universe);
        for (int t = 0; t < time.tau; ++t) {
            for (std::uint32_t c = 0; c < surface.cols(); ++c) {
                surface(t, c) = 400.0 * unit(rng);
            }
        }
        ingest::ReferenceTable reference;
        reference.daytime.assign(n, 0.0);
        reference.nighttime.assign(n, 0.0);
        for (int c = 0; c < n; ++c) {
            reference.daytime[static_cast<std::size_t>(c)] =
                c % 9 == 0 ? 0.0 : 400.0 * unit(rng);
            reference.nighttime[static_cast<std::size_t>(c)] = 400.0 * unit(rng);
        }
        const analysis::EvalConfig eval;
        const auto report = analysis::monthly_report(surface, reference, eval);

        const auto brute = [](const std::vector<double>& estimate,
                              const std::vector<double>& ref) {
            double num = 0.0, den = 0.0;
            for (std::size_t c = 0; c < estimate.size(); ++c) {
                if (ref[c] <= 0.0) {
                    continue;
                }
                num += ref[c] * std::abs((estimate[c] - ref[c]) / ref[c]);
                den += ref[c];
            }
            return num / den;
        };
        const auto noon = analysis::daypart_mean(surface, eval.noon_hour, true);
        const auto midnight = analysis::daypart_mean(surface, eval.midnight_hour, false);
        gate.require(std::abs(report.day_aggregate - brute(noon, reference.daytime)) <= 1e-12,
                     "daytime aggregate differs from the brute-force recomputation");
        gate.require(
            std::abs(report.night_aggregate - brute(midnight, reference.nighttime)) <= 1e-12,
            "nighttime aggregate differs from the brute-force recomputation");
    }
    gate.note("factorization and metric agree to 1e-12");
    return gate;
}

// -------------------------------------------------------------------------
// 7. Report and config format fidelity through the real CLI surface.
Gate criterion_format_fidelity() {
    Gate gate;
    const fs::path dir = scratch_dir("format");

    const auto run = [](const std::vector<std::string>& args) {
        std::ostringstream sink;
        auto* old = std::cout.rdbuf(sink.rdbuf());
        const int code = cli::run_cli(args);
        std::cout.rdbuf(old);
        return code;
    };

    gate.require(run({"synth", "--preset", "university", "--seed", "12", "--months", "12",
                      "--year", "2022", "--month", "1", "--out", (dir / "season").string()}) ==
                     0,
                 "12-month synth failed");

    nlohmann::json eval_config;
    eval_config["out"] = (dir / "eval").string();
    eval_config["months"] = nlohmann::json::array();
    for (int m = 1; m <= 12 && gate.ok; ++m) {
        char label[8];
        std::snprintf(label, sizeof(label), "%02d", m);
        const fs::path month_dir = dir / "season" / ("2022-" + std::string(label));
        const fs::path run_dir = dir / ("run-2022-" + std::string(label));
        gate.require(run({"estimate", "--patterns", (month_dir / "patterns.csv").string(),
                          "--panel", (month_dir / "panel.csv").string(), "--population",
                          (month_dir / "population.csv").string(), "--year", "2022", "--month",
                          std::to_string(m), "--out", run_dir.string()}) == 0,
                     "estimate failed for month " + std::to_string(m));
        nlohmann::json entry;
        entry["year"] = 2022;
        entry["month"] = m;
        entry["population"] = (run_dir / "population.csv").string();
        entry["reference"] = (month_dir / "reference.csv").string();
        eval_config["months"].push_back(entry);
    }

    if (gate.ok) {
        std::ofstream(dir / "eval.json") << eval_config.dump();
        gate.require(run({"evaluate", "--config", (dir / "eval.json").string()}) == 0,
                     "12-month evaluate failed");
    }
    if (gate.ok) {
        std::ifstream in(dir / "eval" / "report.csv");
        std::string header, day, night, extra;
        std::getline(in, header);
        std::getline(in, day);
        std::getline(in, night);
        const bool no_extra = !std::getline(in, extra);
        gate.require(header == "Month,1,2,3,4,5,6,7,8,9,10,11,12",
                     "report header is not the 12-month layout: " + header);
        gate.require(day.rfind("Noon/daytime (%),", 0) == 0,
                     "missing the daytime row: " + day);
        gate.require(night.rfind("Midnight/nighttime (%),", 0) == 0,
                     "missing the nighttime row: " + night);
        gate.require(no_extra, "report has more rows than the table layout");
        gate.require(std::count(day.begin(), day.end(), ',') == 12,
                     "daytime row does not carry 12 columns");
    }

    // default configuration echo: k=4, floor=0.10, one rebalance pass
    if (gate.ok) {
        std::ifstream echo_in(dir / "run-2022-01" / "run_config.json");
        const auto echo = nlohmann::json::parse(echo_in);
        gate.require(echo["k"].get<double>() == 4.0, "default k is not 4");
        gate.require(echo["floor"].get<double>() == 0.10, "default floor is not 0.10");
        gate.require(echo["rebalance_passes"].get<int>() == 1,
                     "default rebalance pass count is not 1");
    }
    fs::remove_all(dir);
    gate.note("12 month columns, day/night rows, defaults echoed");
    return gate;
}

// -------------------------------------------------------------------------
// 8. The scenario presets reproduce their qualitative patterns on estimates.
Gate criterion_patterns() {
    Gate gate;

    const auto estimate_places = [](const std::string& preset, std::uint64_t seed) {
        synth::SynthConfig config;
        config.preset = preset;
        config.year = 2022;
        config.month = 9;
        config.rng_seed = seed;
        const auto world = synth::generate_world(config);
        const auto bundle = synth::observe(world, config);
        estimator::EstimatorConfig est;
        est.k = 1.0; // expected-mode observation is noise-free at unit k
        const auto result = estimator::run_pipeline(to_dataset(bundle), est);
        return analysis::aggregate_places(result.surface.population, bundle.crosswalk);
    };

    const auto series_of = [&gate](const analysis::PlaceAggregation& agg,
                                   const std::string& place) -> const std::vector<double>* {
        for (const auto& p : agg.places) {
            if (p.place == place) {
                return &p.hourly;
            }
        }
        gate.require(false, "place " + place + " missing from the aggregation");
        return nullptr;
    };

    const auto day_night_means = [](const std::vector<double>& hourly) {
        double day = 0.0, night = 0.0;
        std::size_t nd = 0, nn = 0;
        for (std::size_t t = 0; t < hourly.size(); ++t) {
            const int hod = static_cast<int>(t % 24);
            if (hod >= 7 && hod < 19) {
                day += hourly[t];
                ++nd;
            } else {
                night += hourly[t];
                ++nn;
            }
        }
        return std::make_pair(day / static_cast<double>(nd), night / static_cast<double>(nn));
    };

    {
        const auto agg = estimate_places("bedroom", 31);
        if (const auto* series = series_of(agg, "bedroom")) {
            const auto [day, night] = day_night_means(*series);
            gate.require(day < night, "bedroom place is not emptier by day (day " + fmt(day) +
                                          " vs night " + fmt(night) + ")");
        }
    }
    {
        const auto agg = estimate_places("industrial", 32);
        if (const auto* series = series_of(agg, "industrial")) {
            const auto [day, night] = day_night_means(*series);
            gate.require(day > night, "industrial place is not busier by day (day " +
                                          fmt(day) + " vs night " + fmt(night) + ")");
        }
    }
    {
        const auto agg = estimate_places("university", 33);
        if (const auto* series = series_of(agg, "college-town")) {
            double semester = 0.0, vacation = 0.0;
            std::size_t ns = 0, nb = 0;
            for (std::size_t t = 0; t < series->size(); ++t) {
                if (static_cast<int>(t / 24) < 14) {
                    semester += (*series)[t];
                    ++ns;
                } else {
                    vacation += (*series)[t];
                    ++nb;
                }
            }
            semester /= static_cast<double>(ns);
            vacation /= static_cast<double>(nb);
            gate.require(semester > vacation,
                         "semester weeks are not busier than break weeks (" + fmt(semester) +
                             " vs " + fmt(vacation) + ")");
        }
    }
    {
        const auto agg = estimate_places("festival", 34);
        if (const auto* series = series_of(agg, "venue")) {
            const auto daily = analysis::daily_series(*series);
            std::vector<double> sorted = daily;
            std::sort(sorted.begin(), sorted.end());
            const double median = sorted[sorted.size() / 2];
            const double peak = sorted.back();
            gate.require(peak >= 2.0 * median, "festival peak day " + fmt(peak) +
                                                   " is below twice the median " + fmt(median));
        }
    }
    gate.note("bedroom, industrial, university and festival inequalities hold on estimates");
    return gate;
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Gate()>>> criteria{
        {"hourly conservation on a 5000-block-group month", criterion_conservation},
        {"fitting core: closed form, scale, invariances", criterion_ipf},
        {"exact recovery on hopper worlds", criterion_exact_recovery},
        {"small-instance mobility-cube oracle", criterion_cube_oracle},
        {"population floor and rebalance accounting", criterion_floor_rebalance},
        {"inbound factorization and metric micro-oracles", criterion_micro_oracles},
        {"report and config format fidelity", criterion_format_fidelity},
        {"scenario presets reproduce their patterns", criterion_patterns},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Gate gate;
        try {
            gate = criteria[i].second();
        } catch (const std::exception& e) {
            gate.ok = false;
            gate.detail = std::string("exception: ") + e.what();
        }
        std::printf("[%s] criterion %zu: %s%s%s\n", gate.ok ? "PASS" : "FAIL", i + 1,
                    criteria[i].first.c_str(), gate.detail.empty() ? "" : " -- ",
                    gate.detail.c_str());
        std::fflush(stdout);
        failures += gate.ok ? 0 : 1;
    }
    if (failures > 0) {
        std::printf("%d of %zu criteria failed\n", failures, criteria.size());
        return 1;
    }
    std::printf("all %zu criteria passed\n", criteria.size());
    return 0;
}
