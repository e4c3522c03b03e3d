#include "fluxpop/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

#include "fluxpop/analysis.hpp"
#include "fluxpop/csv.hpp"
#include "fluxpop/errors.hpp"
#include "fluxpop/estimator.hpp"
#include "fluxpop/ingest.hpp"
#include "fluxpop/synth.hpp"

namespace fluxpop::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

LogLevel log_level() {
    const char* env = std::getenv("FLUXPOP_LOG");
    if (env == nullptr) {
        return LogLevel::warn;
    }
    const std::string v(env);
    if (v == "error") {
        return LogLevel::error;
    }
    if (v == "info") {
        return LogLevel::info;
    }
    if (v == "debug") {
        return LogLevel::debug;
    }
    return LogLevel::warn;
}

void log(LogLevel level, const std::string& message) {
    static const LogLevel active = log_level();
    if (level <= active) {
        const char* tag = level == LogLevel::error  ? "error"
                          : level == LogLevel::warn ? "warn"
                          : level == LogLevel::info ? "info"
                                                    : "debug";
        std::fprintf(stderr, "[%s] %s\n", tag, message.c_str());
    }
}

void log_load_warnings(const ingest::LoadStats& stats, const std::string& table) {
    if (stats.dropped_rows > 0) {
        log(LogLevel::warn, table + ": dropped " + std::to_string(stats.dropped_rows) +
                                " rows for unknown block groups");
    }
    if (stats.dropped_origins > 0) {
        log(LogLevel::warn, table + ": dropped " + std::to_string(stats.dropped_origins) +
                                " unknown origin entries");
    }
    for (const auto& w : stats.warnings) {
        log(LogLevel::debug, w);
    }
}

json load_config_file(const std::string& path) {
    if (path.empty()) {
        return json::object();
    }
    const auto text = csv::read_file_bytes(path);
    json config = json::parse(text, nullptr, false);
    if (config.is_discarded() || !config.is_object()) {
        throw input_error(path + ": config must be a JSON object");
    }
    return config;
}

std::string require_path(const json& config, const std::string& key) {
    if (!config.contains(key) || !config[key].is_string() ||
        config[key].get<std::string>().empty()) {
        throw input_error("missing input: " + key);
    }
    return config[key].get<std::string>();
}

std::string optional_path(const json& config, const std::string& key) {
    return config.contains(key) && config[key].is_string() ? config[key].get<std::string>() : "";
}

template <typename T>
T value_or(const json& config, const std::string& key, T fallback) {
    if (!config.contains(key)) {
        return fallback;
    }
    try {
        return config[key].get<T>();
    } catch (const json::exception&) {
        throw input_error("config field '" + key + "' has the wrong type");
    }
}

TimeIndex time_from(const json& config) {
    const int year = value_or<int>(config, "year", 0);
    const int month = value_or<int>(config, "month", 0);
    const int days = value_or<int>(config, "days", 0);
    if (year <= 0 || month <= 0) {
        throw input_error("missing input: year/month");
    }
    try {
        return days > 0 ? time_index_with_days(year, month, days)
                        : build_time_index(year, month);
    } catch (const std::invalid_argument& e) {
        throw input_error(e.what());
    }
}

estimator::EstimatorConfig estimator_config_from(const json& config) {
    estimator::EstimatorConfig cfg;
    cfg.k = value_or<double>(config, "k", cfg.k);
    cfg.floor_frac = value_or<double>(config, "floor", cfg.floor_frac);
    cfg.rebalance_iterations = value_or<int>(config, "rebalance_passes", cfg.rebalance_iterations);
    cfg.ipf_tol = value_or<double>(config, "ipf_tol", cfg.ipf_tol);
    cfg.ipf_max_iter = value_or<int>(config, "ipf_max_iter", cfg.ipf_max_iter);
    cfg.include_self_flows = value_or<bool>(config, "include_self_flows", cfg.include_self_flows);
    cfg.threads = value_or<int>(config, "threads", cfg.threads);
    return cfg;
}

json estimator_config_echo(const estimator::EstimatorConfig& cfg) {
    json j;
    j["k"] = cfg.k;
    j["floor"] = cfg.floor_frac;
    j["rebalance_passes"] = cfg.rebalance_iterations;
    j["ipf_tol"] = cfg.ipf_tol;
    j["ipf_max_iter"] = cfg.ipf_max_iter;
    j["include_self_flows"] = cfg.include_self_flows;
    j["threads"] = cfg.threads;
    return j;
}

void write_json(const fs::path& path, const json& value) {
    csv::write_file_atomic(path, value.dump(2) + "\n");
}

ingest::Dataset load_dataset(const json& config, const TimeIndex& time, bool need_reference) {
    ingest::Dataset dataset;
    dataset.time = time;

    const std::string population_path = require_path(config, "population");
    const std::string patterns_path = require_path(config, "patterns");
    const std::string panel_path = require_path(config, "panel");

    auto [universe, population] = ingest::load_population_universe(population_path);
    dataset.universe = universe;
    dataset.population = std::move(population);
    dataset.patterns = ingest::load_patterns(patterns_path, universe, time,
                                             value_or<bool>(config, "strict_unknown", false));
    log_load_warnings(dataset.patterns.stats, "patterns");
    dataset.panel = ingest::load_panel(panel_path, universe);
    log_load_warnings(dataset.panel.stats, "panel");

    const std::string reference_path = optional_path(config, "reference");
    if (!reference_path.empty()) {
        dataset.reference = ingest::load_reference(reference_path, universe);
    } else if (need_reference) {
        throw input_error("missing input: reference");
    }
    const std::string crosswalk_path = optional_path(config, "crosswalk");
    if (!crosswalk_path.empty()) {
        dataset.crosswalk = ingest::load_crosswalk(crosswalk_path, universe);
        log_load_warnings(dataset.crosswalk->stats, "crosswalk");
    }
    return dataset;
}

json diagnostics_json(const estimator::PipelineResult& result) {
    const auto& diag = result.diagnostics;
    const auto& reb = result.surface.diagnostics;
    json j;
    j["ipf"] = {{"iterations", diag.ipf.iterations},
                {"max_row_residual", diag.ipf.max_row_residual},
                {"max_col_residual", diag.ipf.max_col_residual},
                {"converged", diag.ipf.converged}};
    j["harmonization_factor"] = diag.harmonization_factor;
    j["total_inbound"] = diag.total_inbound;
    j["zero_panel_fallbacks"] = diag.zero_panel_fallbacks;
    j["rebalance"] = {{"negative_cells", reb.negative_cells},
                      {"cells_below_floor_initial", reb.cells_below_floor_initial},
                      {"adjusted_per_pass", reb.adjusted_per_pass},
                      {"hard_clamped_cells", reb.hard_clamped_cells},
                      {"clamp_residual_total", reb.clamp_residual_total},
                      {"clamp_residual_per_hour", reb.clamp_residual_per_hour}};
    return j;
}

int cmd_estimate(const json& config) {
    const TimeIndex time = time_from(config);
    const auto est = estimator_config_from(config);
    const fs::path out(require_path(config, "out"));
    const bool gzip = value_or<bool>(config, "gzip", false);

    const auto dataset = load_dataset(config, time, false);
    log(LogLevel::info, "estimating " + ingest::month_label(time) + " over " +
                            std::to_string(dataset.universe->size()) + " block groups");
    const auto result = estimator::run_pipeline(dataset, est);

    ingest::write_surface(out / (gzip ? "population.csv.gz" : "population.csv"),
                          result.surface.population, gzip);
    write_json(out / "diagnostics.json", diagnostics_json(result));
    json echo = config;
    echo.update(estimator_config_echo(est));
    write_json(out / "run_config.json", echo);
    return 0;
}

int cmd_synth(const json& config) {
    synth::SynthConfig cfg;
    cfg.preset = value_or<std::string>(config, "preset", cfg.preset);
    cfg.n_cbgs = value_or<int>(config, "n_cbgs", cfg.n_cbgs);
    cfg.rng_seed = value_or<std::uint64_t>(config, "seed", cfg.rng_seed);
    cfg.year = value_or<int>(config, "year", cfg.year);
    cfg.month = value_or<int>(config, "month", cfg.month);
    cfg.days = value_or<int>(config, "days", cfg.days);
    cfg.months = value_or<int>(config, "months", cfg.months);
    cfg.rate = value_or<double>(config, "rate", cfg.rate);
    cfg.pop_min = value_or<int>(config, "pop_min", cfg.pop_min);
    cfg.pop_max = value_or<int>(config, "pop_max", cfg.pop_max);
    const std::string mode = value_or<std::string>(config, "observation_mode", "expected");
    if (mode == "sampled") {
        cfg.observation_mode = synth::ObservationMode::sampled;
    } else if (mode != "expected") {
        throw input_error("observation_mode must be 'expected' or 'sampled'");
    }
    if (cfg.months < 1) {
        throw input_error("months must be at least 1");
    }
    const fs::path out(require_path(config, "out"));

    for (int i = 0; i < cfg.months; ++i) {
        const synth::SynthConfig month_cfg = synth::advance_months(cfg, i);
        const auto world = synth::generate_world(month_cfg);
        const auto bundle = synth::observe(world, month_cfg);
        const fs::path dir =
            cfg.months == 1 ? out : out / ingest::month_label(world.time);
        synth::write_bundle(dir, bundle);
        synth::write_truth(dir / "truth.csv", world);
        log(LogLevel::info, "wrote " + dir.string());
    }
    json echo = config;
    echo["preset"] = cfg.preset;
    echo["seed"] = cfg.rng_seed;
    echo["months"] = cfg.months;
    write_json(out / "run_config.json", echo);
    return 0;
}

analysis::EvalConfig eval_config_from(const json& config) {
    analysis::EvalConfig cfg;
    cfg.noon_hour = value_or<int>(config, "noon_hour", cfg.noon_hour);
    cfg.midnight_hour = value_or<int>(config, "midnight_hour", cfg.midnight_hour);
    cfg.weekdays_only_for_noon =
        value_or<bool>(config, "weekdays_only_for_noon", cfg.weekdays_only_for_noon);
    cfg.exclude_zero_reference =
        value_or<bool>(config, "exclude_zero_reference", cfg.exclude_zero_reference);
    cfg.use_absolute_difference =
        value_or<bool>(config, "absolute_aggregate", cfg.use_absolute_difference);
    return cfg;
}

int cmd_evaluate(const json& config) {
    const fs::path out(require_path(config, "out"));
    const auto eval = eval_config_from(config);

    json months = json::array();
    if (config.contains("months")) {
        months = config["months"];
        if (!months.is_array() || months.empty()) {
            throw input_error("'months' must be a non-empty array");
        }
    } else {
        months.push_back(config); // single-month form uses the top-level fields
    }

    std::vector<analysis::EvalReport> reports;
    std::vector<int> month_numbers;
    for (const auto& entry : months) {
        const TimeIndex time = time_from(entry);
        const std::string surface_path = require_path(entry, "population");
        const std::string reference_path = require_path(entry, "reference");
        const HourMatrix surface = ingest::load_surface(surface_path, time);
        const auto reference = ingest::load_reference(reference_path, surface.universe());
        reports.push_back(analysis::monthly_report(surface, reference, eval));
        month_numbers.push_back(time.month);

        std::string diff = csv::make_row({"cbg", "noon_mean", "daytime_ref", "day_diff",
                                          "midnight_mean", "nighttime_ref", "night_diff"});
        const auto& report = reports.back();
        for (std::uint32_t c = 0; c < surface.universe()->size(); ++c) {
            diff += csv::make_row({surface.universe()->id(c),
                                   csv::format_double(report.noon_mean[c]),
                                   csv::format_double(reference.daytime[c]),
                                   csv::format_double(report.day_diff[c]),
                                   csv::format_double(report.midnight_mean[c]),
                                   csv::format_double(reference.nighttime[c]),
                                   csv::format_double(report.night_diff[c])});
        }
        csv::write_file_atomic(out / ("diff-" + ingest::month_label(time) + ".csv"), diff);
    }
    analysis::write_report_csv(out / "report.csv", reports, month_numbers);
    write_json(out / "run_config.json", config);
    return 0;
}

int cmd_sweep_k(const json& config) {
    const TimeIndex time = time_from(config);
    const auto est = estimator_config_from(config);
    const auto eval = eval_config_from(config);
    const fs::path out(require_path(config, "out"));

    std::vector<double> ks;
    if (config.contains("k_values")) {
        for (const auto& v : config["k_values"]) {
            ks.push_back(v.get<double>());
        }
    }
    if (ks.empty()) {
        ks.push_back(est.k);
    }

    const auto dataset = load_dataset(config, time, true);
    const auto entries = analysis::sweep_k(dataset, ks, est, eval);

    std::string table =
        csv::make_row({"k", "noon_daytime_pct", "midnight_nighttime_pct", "total_inbound"});
    char buf[32];
    for (const auto& entry : entries) {
        std::snprintf(buf, sizeof(buf), "%.4f", entry.report.day_aggregate * 100.0);
        const std::string day = buf;
        std::snprintf(buf, sizeof(buf), "%.4f", entry.report.night_aggregate * 100.0);
        table += csv::make_row({csv::format_double(entry.k), day, buf,
                                csv::format_double(entry.total_inbound)});
    }
    csv::write_file_atomic(out / "sweep.csv", table);
    json echo = config;
    echo.update(estimator_config_echo(est));
    echo["k_values"] = ks;
    write_json(out / "run_config.json", echo);
    return 0;
}

int cmd_aggregate(const json& config) {
    const TimeIndex time = time_from(config);
    const fs::path out(require_path(config, "out"));
    const std::string surface_path = require_path(config, "population");
    const std::string crosswalk_path = require_path(config, "crosswalk");

    const HourMatrix surface = ingest::load_surface(surface_path, time);
    const auto crosswalk = ingest::load_crosswalk(crosswalk_path, surface.universe());
    const auto aggregation = analysis::aggregate_places(surface, crosswalk);

    std::string table = csv::make_row({"place", "hour", "population"});
    for (const auto& place : aggregation.places) {
        for (int t = 0; t < time.tau; ++t) {
            table += csv::make_row({place.place, std::to_string(t),
                                    csv::format_double(place.hourly[static_cast<std::size_t>(t)])});
        }
    }
    csv::write_file_atomic(out / "places.csv", table);

    json summary;
    summary["places"] = json::array();
    for (const auto& place : aggregation.places) {
        summary["places"].push_back({{"place", place.place},
                                     {"members", place.members}});
    }
    summary["unassigned"] = aggregation.unassigned;
    write_json(out / "aggregate.json", summary);

    if (config.contains("profile")) {
        const json& p = config["profile"];
        analysis::ProfileSelection selection;
        const std::string kind = value_or<std::string>(p, "kind", "cbg");
        if (kind == "place") {
            selection.kind = analysis::ProfileSelection::Kind::place;
        } else if (kind != "cbg") {
            throw input_error("profile kind must be 'cbg' or 'place'");
        }
        selection.id = value_or<std::string>(p, "id", "");
        selection.daily = value_or<bool>(p, "daily", false);
        analysis::export_profile(out / "profile.csv", surface, &aggregation, selection);
    }
    write_json(out / "run_config.json", config);
    return 0;
}

int cmd_validate(const json& config) {
    const TimeIndex time = time_from(config);
    const auto dataset = load_dataset(config, time, false);
    ingest::ValidationConfig vcfg;
    vcfg.stop_total_factor = value_or<double>(config, "stop_total_factor", vcfg.stop_total_factor);
    const auto report = ingest::validate_dataset(dataset, vcfg);

    json j;
    j["issues"] = json::array();
    for (const auto& issue : report.issues) {
        j["issues"].push_back(
            {{"code", issue.code}, {"cbg", issue.cbg}, {"message", issue.message}});
    }
    j["patterns_rows"] = report.patterns_rows;
    j["patterns_coverage"] = report.patterns_coverage;
    j["zero_panel_cbgs"] = report.zero_panel_cbgs;
    j["total_stops"] = report.total_stops;
    j["total_origin_devices"] = report.total_origin_devices;

    const std::string out = optional_path(config, "out");
    if (!out.empty()) {
        write_json(fs::path(out) / "validation.json", j);
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

struct CommonFlags {
    std::string config_path;
    std::optional<std::string> out;
    std::optional<int> year, month, days, threads;
};

void apply_common(json& config, const CommonFlags& flags) {
    if (flags.out) {
        config["out"] = *flags.out;
    }
    if (flags.year) {
        config["year"] = *flags.year;
    }
    if (flags.month) {
        config["month"] = *flags.month;
    }
    if (flags.days) {
        config["days"] = *flags.days;
    }
    if (flags.threads) {
        config["threads"] = *flags.threads;
    }
}

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_time = true) {
    cmd->add_option("--config", flags.config_path, "JSON config file");
    cmd->add_option("--out", flags.out, "output directory");
    if (with_time) {
        cmd->add_option("--year", flags.year, "calendar year");
        cmd->add_option("--month", flags.month, "calendar month 1-12");
        cmd->add_option("--days", flags.days, "override the day count");
    }
    cmd->add_option("--threads", flags.threads, "thread budget");
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"hourly block-group population from mobility panel observations"};
    app.require_subcommand(1);

    CommonFlags est_flags;
    std::optional<double> est_k, est_floor, est_ipf_tol;
    std::optional<int> est_passes, est_ipf_iter;
    std::optional<bool> est_self, est_gzip;
    std::optional<std::string> est_patterns, est_panel, est_population, est_reference,
        est_crosswalk;
    auto* estimate = app.add_subcommand("estimate", "run the population pipeline");
    add_common(estimate, est_flags);
    estimate->add_option("--patterns", est_patterns, "patterns.csv path");
    estimate->add_option("--panel", est_panel, "panel.csv path");
    estimate->add_option("--population", est_population, "population.csv path");
    estimate->add_option("--reference", est_reference, "reference.csv path");
    estimate->add_option("--crosswalk", est_crosswalk, "crosswalk.csv path");
    estimate->add_option("--k", est_k, "adjusting coefficient");
    estimate->add_option("--floor", est_floor, "minimum population fraction");
    estimate->add_option("--rebalance-passes", est_passes, "rebalance pass count");
    estimate->add_option("--ipf-tol", est_ipf_tol, "fit tolerance");
    estimate->add_option("--ipf-max-iter", est_ipf_iter, "fit iteration cap");
    estimate->add_option("--include-self-flows", est_self, "count home-block stops");
    estimate->add_option("--gzip", est_gzip, "compress the output surface");

    CommonFlags synth_flags;
    std::optional<std::string> synth_preset, synth_mode;
    std::optional<std::uint64_t> synth_seed;
    std::optional<int> synth_n, synth_months;
    std::optional<double> synth_rate;
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic observation bundle");
    add_common(synth_cmd, synth_flags);
    synth_cmd->add_option("--preset", synth_preset, "scenario preset");
    synth_cmd->add_option("--seed", synth_seed, "rng seed");
    synth_cmd->add_option("--n", synth_n, "block group count (scalable presets)");
    synth_cmd->add_option("--months", synth_months, "number of consecutive months");
    synth_cmd->add_option("--rate", synth_rate, "uniform device sampling rate");
    synth_cmd->add_option("--observation-mode", synth_mode, "expected | sampled");

    CommonFlags eval_flags;
    std::optional<std::string> eval_population, eval_reference;
    auto* evaluate = app.add_subcommand("evaluate", "compare a surface against a reference");
    add_common(evaluate, eval_flags);
    evaluate->add_option("--population", eval_population, "estimated surface csv");
    evaluate->add_option("--reference", eval_reference, "reference.csv path");

    CommonFlags sweep_flags;
    std::vector<double> sweep_ks;
    std::optional<std::string> sweep_patterns, sweep_panel, sweep_population, sweep_reference;
    auto* sweep = app.add_subcommand("sweep-k", "re-run the pipeline over several k values");
    add_common(sweep, sweep_flags);
    sweep->add_option("--k-values", sweep_ks, "k values to sweep");
    sweep->add_option("--patterns", sweep_patterns, "patterns.csv path");
    sweep->add_option("--panel", sweep_panel, "panel.csv path");
    sweep->add_option("--population", sweep_population, "population.csv path");
    sweep->add_option("--reference", sweep_reference, "reference.csv path");

    CommonFlags agg_flags;
    std::optional<std::string> agg_population, agg_crosswalk, agg_profile_id, agg_profile_kind;
    std::optional<bool> agg_profile_daily;
    auto* aggregate = app.add_subcommand("aggregate", "sum block groups into places");
    add_common(aggregate, agg_flags);
    aggregate->add_option("--population", agg_population, "surface csv");
    aggregate->add_option("--crosswalk", agg_crosswalk, "crosswalk.csv path");
    aggregate->add_option("--profile-id", agg_profile_id, "export one series");
    aggregate->add_option("--profile-kind", agg_profile_kind, "cbg | place");
    aggregate->add_option("--profile-daily", agg_profile_daily, "24-hour moving average");

    CommonFlags val_flags;
    std::optional<std::string> val_patterns, val_panel, val_population, val_reference,
        val_crosswalk;
    auto* validate = app.add_subcommand("validate", "cross-check an input bundle");
    add_common(validate, val_flags);
    validate->add_option("--patterns", val_patterns, "patterns.csv path");
    validate->add_option("--panel", val_panel, "panel.csv path");
    validate->add_option("--population", val_population, "population.csv path");
    validate->add_option("--reference", val_reference, "reference.csv path");
    validate->add_option("--crosswalk", val_crosswalk, "crosswalk.csv path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const auto set = [](json& j, const char* key, const auto& opt) {
        if (opt) {
            j[key] = *opt;
        }
    };

    try {
        if (estimate->parsed()) {
            json config = load_config_file(est_flags.config_path);
            apply_common(config, est_flags);
            set(config, "patterns", est_patterns);
            set(config, "panel", est_panel);
            set(config, "population", est_population);
            set(config, "reference", est_reference);
            set(config, "crosswalk", est_crosswalk);
            set(config, "k", est_k);
            set(config, "floor", est_floor);
            set(config, "rebalance_passes", est_passes);
            set(config, "ipf_tol", est_ipf_tol);
            set(config, "ipf_max_iter", est_ipf_iter);
            set(config, "include_self_flows", est_self);
            set(config, "gzip", est_gzip);
            return cmd_estimate(config);
        }
        if (synth_cmd->parsed()) {
            json config = load_config_file(synth_flags.config_path);
            apply_common(config, synth_flags);
            set(config, "preset", synth_preset);
            set(config, "seed", synth_seed);
            set(config, "n_cbgs", synth_n);
            set(config, "months", synth_months);
            set(config, "rate", synth_rate);
            set(config, "observation_mode", synth_mode);
            return cmd_synth(config);
        }
        if (evaluate->parsed()) {
            json config = load_config_file(eval_flags.config_path);
            apply_common(config, eval_flags);
            set(config, "population", eval_population);
            set(config, "reference", eval_reference);
            return cmd_evaluate(config);
        }
        if (sweep->parsed()) {
            json config = load_config_file(sweep_flags.config_path);
            apply_common(config, sweep_flags);
            if (!sweep_ks.empty()) {
                config["k_values"] = sweep_ks;
            }
            set(config, "patterns", sweep_patterns);
            set(config, "panel", sweep_panel);
            set(config, "population", sweep_population);
            set(config, "reference", sweep_reference);
            return cmd_sweep_k(config);
        }
        if (aggregate->parsed()) {
            json config = load_config_file(agg_flags.config_path);
            apply_common(config, agg_flags);
            set(config, "population", agg_population);
            set(config, "crosswalk", agg_crosswalk);
            if (agg_profile_id) {
                config["profile"]["id"] = *agg_profile_id;
                if (agg_profile_kind) {
                    config["profile"]["kind"] = *agg_profile_kind;
                }
                if (agg_profile_daily) {
                    config["profile"]["daily"] = *agg_profile_daily;
                }
            }
            return cmd_aggregate(config);
        }
        if (validate->parsed()) {
            json config = load_config_file(val_flags.config_path);
            apply_common(config, val_flags);
            set(config, "patterns", val_patterns);
            set(config, "panel", val_panel);
            set(config, "population", val_population);
            set(config, "reference", val_reference);
            set(config, "crosswalk", val_crosswalk);
            return cmd_validate(config);
        }
    } catch (const input_error& e) {
        log(LogLevel::error, e.what());
        std::cout << json{{"error", e.what()}, {"kind", "input"}}.dump() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        log(LogLevel::error, e.what());
        std::cout << json{{"error", e.what()}, {"kind", "input"}}.dump() << "\n";
        return 2;
    } catch (const std::exception& e) {
        log(LogLevel::error, e.what());
        std::cout << json{{"error", e.what()}, {"kind", "pipeline"}}.dump() << "\n";
        return 1;
    }
    return 2;
}

int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("fluxpop");
    for (const auto& arg : args) {
        argv.push_back(arg.c_str());
    }
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

} // namespace fluxpop::cli
