#include "fluxpop/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>

#include "fluxpop/errors.hpp"

namespace fluxpop::synth {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, int year, int month) {
    return splitmix(seed ^ splitmix(static_cast<std::uint64_t>(year) * 16 +
                                    static_cast<std::uint64_t>(month)));
}

std::vector<CbgId> make_ids(std::uint32_t n) {
    std::vector<CbgId> ids;
    ids.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%012llu",
                      370000000000ULL + static_cast<unsigned long long>(i) + 1);
        ids.emplace_back(buf);
    }
    return ids;
}

TimeIndex make_time(const SynthConfig& config) {
    return config.days > 0 ? time_index_with_days(config.year, config.month, config.days)
                           : build_time_index(config.year, config.month);
}

Cohort stay_home(std::uint32_t home, std::int64_t count, const TimeIndex& time,
                 std::string archetype = "homebody") {
    Cohort c;
    c.home = home;
    c.count = count;
    c.archetype = std::move(archetype);
    c.itinerary.assign(static_cast<std::size_t>(time.tau), home);
    return c;
}

void add_commute(Cohort& c, const TimeIndex& time, std::uint32_t work, int depart, int back,
                 bool weekdays_only) {
    for (int day = 0; day < time.days; ++day) {
        if (weekdays_only && !day_is_weekday(time, day)) {
            continue;
        }
        for (int h = depart; h < back; ++h) {
            c.itinerary[static_cast<std::size_t>(day * 24 + h)] = work;
        }
    }
}

void add_nights(Cohort& c, const TimeIndex& time, std::uint32_t work) {
    for (int t = 0; t < time.tau; ++t) {
        const int hod = t % 24;
        if (hod >= 22 || hod < 6) {
            c.itinerary[static_cast<std::size_t>(t)] = work;
        }
    }
}

void add_day_visit(Cohort& c, int day, int start, int end, std::uint32_t dest) {
    for (int h = start; h < end; ++h) {
        c.itinerary[static_cast<std::size_t>(day * 24 + h)] = dest;
    }
}

void add_stay(Cohort& c, const TimeIndex& time, int start_day, int end_day, std::uint32_t dest) {
    const int from = start_day * 24;
    const int to = std::min(time.tau, end_day * 24);
    for (int t = from; t < to; ++t) {
        c.itinerary[static_cast<std::size_t>(t)] = dest;
    }
}

// One-hour visits at each listed hour-of-day, destination rotating so that
// consecutive outing hours never merge into a longer dwell.
void add_hops(Cohort& c, const TimeIndex& time, int first_hour, int n_hours, std::uint32_t n) {
    const std::uint32_t j = c.home;
    for (int day = 0; day < time.days; ++day) {
        for (int i = 0; i < n_hours; ++i) {
            const std::uint32_t dest =
                (j + 1 + static_cast<std::uint32_t>(i) % (n - 1)) % n;
            c.itinerary[static_cast<std::size_t>(day * 24 + first_hour + i)] = dest;
        }
    }
}

double preset_rate(const SynthConfig& config, double fallback) {
    const double rate = config.rate > 0.0 ? config.rate : fallback;
    if (!(rate > 0.0) || rate > 1.0) {
        throw input_error("sampling rate must lie in (0,1]");
    }
    return rate;
}

struct WorldBuilder {
    SyntheticWorld world;

    void init(std::uint32_t n, const SynthConfig& config, double default_rate) {
        world.universe = make_universe(make_ids(n));
        world.time = make_time(config);
        world.residents.assign(n, 0.0);
        world.sampling_rate.assign(n, preset_rate(config, default_rate));
    }

    void add(Cohort cohort) {
        if (cohort.count <= 0) {
            return;
        }
        world.residents[cohort.home] += static_cast<double>(cohort.count);
        world.cohorts.push_back(std::move(cohort));
    }

    void place(std::uint32_t cbg, std::string place_id, double fraction) {
        world.crosswalk.entries.push_back({cbg, std::move(place_id), fraction});
    }

    SyntheticWorld finish() {
        double total = 0.0;
        for (double v : world.residents) {
            total += v;
        }
        if (total <= 0.0) {
            throw input_error("infeasible synthetic config: zero population");
        }
        return std::move(world);
    }
};

SyntheticWorld build_bedroom(const SynthConfig& config) {
    const std::uint32_t n = config.n_cbgs > 0 ? static_cast<std::uint32_t>(config.n_cbgs) : 10;
    if (n < 3) {
        throw input_error("bedroom preset needs at least 3 block groups");
    }
    const std::uint32_t hubs = std::max<std::uint32_t>(1, n / 5);
    const std::uint32_t n_res = n - hubs;
    WorldBuilder b;
    b.init(n, config, 0.25);
    for (std::uint32_t i = 0; i < n_res; ++i) {
        Cohort commuters = stay_home(i, 600, b.world.time, "commuter");
        add_commute(commuters, b.world.time, n_res + i % hubs, 7, 19, true);
        b.add(std::move(commuters));
        b.add(stay_home(i, 400, b.world.time));
        b.place(i, "bedroom", 0.85);
    }
    for (std::uint32_t h = n_res; h < n; ++h) {
        b.add(stay_home(h, 200, b.world.time));
        b.place(h, "hub", 0.9);
    }
    return b.finish();
}

SyntheticWorld build_industrial(const SynthConfig& config) {
    const std::uint32_t n = config.n_cbgs > 0 ? static_cast<std::uint32_t>(config.n_cbgs) : 10;
    if (n < 3) {
        throw input_error("industrial preset needs at least 3 block groups");
    }
    const std::uint32_t plants = std::max<std::uint32_t>(1, n / 5);
    WorldBuilder b;
    b.init(n, config, 0.25);
    for (std::uint32_t p = 0; p < plants; ++p) {
        b.add(stay_home(p, 120, b.world.time));
        b.place(p, "industrial", 0.9);
    }
    for (std::uint32_t i = plants; i < n; ++i) {
        Cohort workers = stay_home(i, 500, b.world.time, "commuter");
        add_commute(workers, b.world.time, i % plants, 7, 19, true);
        b.add(std::move(workers));
        b.add(stay_home(i, 500, b.world.time));
        b.place(i, "suburb", 0.8);
    }
    return b.finish();
}

SyntheticWorld build_university(const SynthConfig& config) {
    const std::uint32_t n = 12; // campus, 3 dorms, 6 town, 2 away
    WorldBuilder b;
    b.init(n, config, 0.25);
    const std::uint32_t campus = 0;
    const TimeIndex& time = b.world.time;

    // Summer months are full break; otherwise the first two weeks are
    // in session and the rest of the month is break.
    const bool summer = config.month >= 5 && config.month <= 8;
    const int semester_days = summer ? 0 : std::min(14, time.days);

    b.add(stay_home(campus, 40, time));
    b.place(campus, "college-town", 0.95);
    for (std::uint32_t d = 1; d <= 3; ++d) {
        Cohort students = stay_home(d, 1080, time, "student");
        const std::uint32_t away = 10 + d % 2;
        for (int day = 0; day < time.days; ++day) {
            if (day < semester_days) {
                if (day_is_weekday(time, day)) {
                    add_day_visit(students, day, 8, 17, campus);
                }
            } else {
                add_stay(students, time, day, day + 1, away);
            }
        }
        b.add(std::move(students));
        b.add(stay_home(d, 120, time));
        b.place(d, "college-town", 0.95);
    }
    for (std::uint32_t t = 4; t <= 9; ++t) {
        b.add(stay_home(t, 800, time));
        b.place(t, "college-town", 0.95);
    }
    for (std::uint32_t a = 10; a <= 11; ++a) {
        b.add(stay_home(a, 1000, time));
        b.place(a, "away", 0.7);
    }
    return b.finish();
}

SyntheticWorld build_festival(const SynthConfig& config) {
    const std::uint32_t n = config.n_cbgs > 0 ? static_cast<std::uint32_t>(config.n_cbgs) : 8;
    if (n < 2) {
        throw input_error("festival preset needs at least 2 block groups");
    }
    WorldBuilder b;
    b.init(n, config, 0.25);
    const std::uint32_t venue = 0;
    const int festival_day = std::min(19, b.world.time.days - 1);
    b.add(stay_home(venue, 500, b.world.time));
    b.place(venue, "venue", 0.95);
    for (std::uint32_t i = 1; i < n; ++i) {
        Cohort visitors = stay_home(i, 600, b.world.time, "festival-visitor");
        add_day_visit(visitors, festival_day, 10, 22, venue);
        b.add(std::move(visitors));
        b.add(stay_home(i, 1400, b.world.time));
        b.place(i, "origins", 0.8);
    }
    return b.finish();
}

// Every origin shares one outing profile, so each origin's hourly outbound
// is its monthly share times the hourly total. Resident counts are kept
// divisible by 40: expected-mode device counts stay integral at the default
// quarter sampling rate.
SyntheticWorld build_separable(const SynthConfig& config, bool separable) {
    const std::uint32_t n = config.n_cbgs > 0 ? static_cast<std::uint32_t>(config.n_cbgs) : 6;
    if (n < 3) {
        throw input_error("hopper presets need at least 3 block groups");
    }
    WorldBuilder b;
    b.init(n, config, 0.25);
    for (std::uint32_t j = 0; j < n; ++j) {
        const std::int64_t residents = 400 + 40 * static_cast<std::int64_t>(j % 16);
        const std::int64_t movers = residents * 2 / 5;
        Cohort hoppers = stay_home(j, movers, b.world.time, "hopper");
        if (separable) {
            add_hops(hoppers, b.world.time, 9, 8, n);
        } else if (j % 2 == 0) {
            add_hops(hoppers, b.world.time, 9, 4, n);
        } else {
            add_hops(hoppers, b.world.time, 14, 4, n);
        }
        b.add(std::move(hoppers));
        b.add(stay_home(j, residents - movers, b.world.time));
    }
    return b.finish();
}

SyntheticWorld build_mixed(const SynthConfig& config) {
    const std::uint32_t n = config.n_cbgs > 0 ? static_cast<std::uint32_t>(config.n_cbgs) : 100;
    if (n < 8) {
        throw input_error("mixed preset needs at least 8 block groups");
    }
    const ArchetypeMix& mix = config.mix;
    const double mix_sum = mix.homebody + mix.commuter + mix.night_worker + mix.student +
                           mix.tourist + mix.festival_visitor;
    if (std::abs(mix_sum - 1.0) > 1e-9) {
        throw input_error("archetype weights must sum to 1");
    }
    if (config.pop_min < 1 || config.pop_max < config.pop_min) {
        throw input_error("invalid resident range");
    }

    WorldBuilder b;
    b.init(n, config, 0.1); // placeholder; rates are drawn per block group below
    const TimeIndex& time = b.world.time;
    std::mt19937_64 rng(mix_seed(config.rng_seed, config.year, config.month));

    const std::uint32_t school = 0;
    const std::uint32_t venue = 1;
    const std::uint32_t n_hubs = std::max<std::uint32_t>(1, n / 20);
    std::uniform_int_distribution<std::uint32_t> hub_pick(2, 1 + n_hubs);
    std::uniform_int_distribution<int> pop_pick(config.pop_min, config.pop_max);
    std::uniform_real_distribution<double> rate_pick(0.02, 0.2);
    const int festival_day = std::min(19, time.days - 1);

    for (std::uint32_t c = 0; c < n; ++c) {
        const std::int64_t residents = pop_pick(rng);
        b.world.sampling_rate[c] = config.rate > 0.0 ? config.rate : rate_pick(rng);

        const auto share = [&](double w) {
            return static_cast<std::int64_t>(std::floor(static_cast<double>(residents) * w));
        };
        const std::int64_t commuters = share(mix.commuter);
        const std::int64_t nights = share(mix.night_worker);
        const std::int64_t students = share(mix.student);
        const std::int64_t tourists = time.days > 11 ? share(mix.tourist) : 0;
        const std::int64_t festival = share(mix.festival_visitor);
        const std::int64_t homebodies =
            residents - commuters - nights - students - tourists - festival;

        const auto other = [&](std::uint32_t dest) { return dest == c ? (dest + 1) % n : dest; };

        Cohort work = stay_home(c, commuters, time, "commuter");
        add_commute(work, time, other(hub_pick(rng)), 8, 17, true);
        b.add(std::move(work));

        Cohort night = stay_home(c, nights, time, "night-worker");
        add_nights(night, time, other(hub_pick(rng)));
        b.add(std::move(night));

        Cohort study = stay_home(c, students, time, "student");
        add_commute(study, time, other(school), 9, 15, true);
        b.add(std::move(study));

        // Each block group hosts the tourists of its antipode, so every
        // block group shows up as a destination somewhere.
        Cohort tour = stay_home(c, tourists, time, "tourist");
        add_stay(tour, time, 10, std::min(15, time.days), other((c + n / 2) % n));
        b.add(std::move(tour));

        Cohort fest = stay_home(c, festival, time, "festival-visitor");
        add_day_visit(fest, festival_day, 10, 22, other(venue));
        b.add(std::move(fest));

        b.add(stay_home(c, homebodies, time));
    }
    return b.finish();
}

} // namespace

std::vector<std::string> preset_names() {
    return {"bedroom", "industrial", "university", "festival", "separable", "nonseparable",
            "mixed"};
}

SyntheticWorld generate_world(const SynthConfig& config) {
    if (config.preset == "bedroom") {
        return build_bedroom(config);
    }
    if (config.preset == "industrial") {
        return build_industrial(config);
    }
    if (config.preset == "university") {
        return build_university(config);
    }
    if (config.preset == "festival") {
        return build_festival(config);
    }
    if (config.preset == "separable") {
        return build_separable(config, true);
    }
    if (config.preset == "nonseparable") {
        return build_separable(config, false);
    }
    if (config.preset == "mixed") {
        return build_mixed(config);
    }
    throw input_error("unknown preset: " + config.preset);
}

HourMatrix true_population(const SyntheticWorld& world) {
    HourMatrix p(world.time, world.universe);
    for (const Cohort& cohort : world.cohorts) {
        const auto count = static_cast<double>(cohort.count);
        for (int t = 0; t < world.time.tau; ++t) {
            p(t, cohort.itinerary[static_cast<std::size_t>(t)]) += count;
        }
    }
    return p;
}

HourMatrix true_inbound(const SyntheticWorld& world) {
    HourMatrix v(world.time, world.universe);
    for (const Cohort& cohort : world.cohorts) {
        const auto count = static_cast<double>(cohort.count);
        for (int t = 0; t < world.time.tau; ++t) {
            const std::uint32_t at = cohort.itinerary[static_cast<std::size_t>(t)];
            if (at != cohort.home) {
                v(t, at) += count;
            }
        }
    }
    return v;
}

HourMatrix true_outbound(const SyntheticWorld& world) {
    HourMatrix x(world.time, world.universe);
    for (const Cohort& cohort : world.cohorts) {
        const auto count = static_cast<double>(cohort.count);
        for (int t = 0; t < world.time.tau; ++t) {
            if (cohort.itinerary[static_cast<std::size_t>(t)] != cohort.home) {
                x(t, cohort.home) += count;
            }
        }
    }
    return x;
}

std::vector<double> true_monthly_outbound_arrivals(const SyntheticWorld& world) {
    std::vector<double> arrivals(world.universe->size(), 0.0);
    for (const Cohort& cohort : world.cohorts) {
        std::int64_t runs = 0;
        std::uint32_t prev = cohort.home;
        for (int t = 0; t < world.time.tau; ++t) {
            const std::uint32_t at = cohort.itinerary[static_cast<std::size_t>(t)];
            if (at != cohort.home && at != prev) {
                ++runs;
            }
            prev = at;
        }
        arrivals[cohort.home] += static_cast<double>(runs * cohort.count);
    }
    return arrivals;
}

ingest::ReferenceTable reference_from_truth(const SyntheticWorld& world) {
    const HourMatrix p = true_population(world);
    const auto n = world.universe->size();
    ingest::ReferenceTable table;
    table.daytime.assign(n, 0.0);
    table.nighttime.assign(n, 0.0);

    int weekdays = 0;
    for (int day = 0; day < world.time.days; ++day) {
        if (day_is_weekday(world.time, day)) {
            ++weekdays;
        }
    }
    for (int day = 0; day < world.time.days; ++day) {
        const bool weekday = day_is_weekday(world.time, day);
        for (std::uint32_t c = 0; c < n; ++c) {
            if (weekday || weekdays == 0) {
                table.daytime[c] += p(day * 24 + 12, c);
            }
            table.nighttime[c] += p(day * 24, c);
        }
    }
    const double day_norm = weekdays > 0 ? weekdays : world.time.days;
    for (std::uint32_t c = 0; c < n; ++c) {
        table.daytime[c] /= day_norm;
        table.nighttime[c] /= world.time.days;
    }
    return table;
}

ObservationBundle observe(const SyntheticWorld& world, const SynthConfig& config) {
    const auto n = world.universe->size();
    const int tau = world.time.tau;

    // Tracked devices per cohort.
    std::vector<double> tracked(world.cohorts.size(), 0.0);
    if (config.observation_mode == ObservationMode::sampled) {
        std::mt19937_64 rng(mix_seed(config.rng_seed ^ 0x5eedULL, config.year, config.month));
        for (std::size_t i = 0; i < world.cohorts.size(); ++i) {
            const Cohort& cohort = world.cohorts[i];
            std::binomial_distribution<std::int64_t> enroll(
                cohort.count, world.sampling_rate[cohort.home]);
            tracked[i] = static_cast<double>(enroll(rng));
        }
    } else {
        for (std::size_t i = 0; i < world.cohorts.size(); ++i) {
            const Cohort& cohort = world.cohorts[i];
            tracked[i] = world.sampling_rate[cohort.home] * static_cast<double>(cohort.count);
        }
    }

    struct Accumulator {
        std::vector<double> stops;
        std::map<std::uint32_t, double> origins;
        std::vector<std::pair<double, double>> dwells; // (hours, tracked weight)
    };
    std::vector<Accumulator> acc(n);
    for (auto& a : acc) {
        a.stops.assign(static_cast<std::size_t>(tau), 0.0);
    }

    for (std::size_t i = 0; i < world.cohorts.size(); ++i) {
        const Cohort& cohort = world.cohorts[i];
        const double w = tracked[i];
        if (w <= 0.0) {
            continue;
        }
        int t = 0;
        while (t < tau) {
            const std::uint32_t at = cohort.itinerary[static_cast<std::size_t>(t)];
            int end = t + 1;
            while (end < tau && cohort.itinerary[static_cast<std::size_t>(end)] == at) {
                ++end;
            }
            if (at != cohort.home) {
                Accumulator& a = acc[at];
                a.stops[static_cast<std::size_t>(t)] += w;
                a.origins[cohort.home] += w;
                a.dwells.emplace_back(static_cast<double>(end - t), w);
            }
            t = end;
        }
    }

    ObservationBundle bundle;
    bundle.universe = world.universe;
    bundle.time = world.time;
    bundle.crosswalk = world.crosswalk;
    bundle.patterns.records.assign(n, ingest::PatternsRecord{});

    for (std::uint32_t c = 0; c < n; ++c) {
        Accumulator& a = acc[c];
        ingest::PatternsRecord rec;
        std::int64_t stop_total = 0;
        rec.hourly_stops.assign(static_cast<std::size_t>(tau), 0);
        for (int t = 0; t < tau; ++t) {
            rec.hourly_stops[static_cast<std::size_t>(t)] =
                std::llround(a.stops[static_cast<std::size_t>(t)]);
            stop_total += rec.hourly_stops[static_cast<std::size_t>(t)];
        }
        for (const auto& [origin, weight] : a.origins) {
            const std::int64_t devices = std::llround(weight);
            if (devices > 0) {
                rec.origin_devices.emplace_back(origin, devices);
                rec.total_origin_devices += devices;
            }
        }
        if (stop_total == 0 && rec.total_origin_devices == 0) {
            continue; // never visited, no row
        }
        // Weighted median of observed visit durations.
        if (!a.dwells.empty()) {
            std::sort(a.dwells.begin(), a.dwells.end());
            double total_w = 0.0;
            for (const auto& d : a.dwells) {
                total_w += d.second;
            }
            double cum = 0.0;
            for (const auto& d : a.dwells) {
                cum += d.second;
                if (cum >= total_w / 2.0) {
                    rec.median_dwell_minutes = d.first * 60.0;
                    break;
                }
            }
        }
        rec.present = true;
        bundle.patterns.records[c] = std::move(rec);
    }

    bundle.panel.devices.assign(n, 0);
    if (config.observation_mode == ObservationMode::sampled) {
        for (std::size_t i = 0; i < world.cohorts.size(); ++i) {
            bundle.panel.devices[world.cohorts[i].home] +=
                std::llround(tracked[i]);
        }
    } else {
        for (std::uint32_t c = 0; c < n; ++c) {
            bundle.panel.devices[c] =
                std::llround(world.sampling_rate[c] * world.residents[c]);
        }
    }

    std::vector<double> residents = world.residents;
    bundle.population = make_population_table(world.universe, std::move(residents));
    bundle.reference = reference_from_truth(world);
    return bundle;
}

SynthConfig advance_months(SynthConfig config, int offset) {
    int m = config.month - 1 + offset;
    config.year += m / 12;
    m %= 12;
    if (m < 0) {
        m += 12;
        config.year -= 1;
    }
    config.month = m + 1;
    return config;
}

void write_bundle(const std::filesystem::path& dir, const ObservationBundle& bundle) {
    std::filesystem::create_directories(dir);
    ingest::write_patterns(dir / "patterns.csv", bundle.universe, bundle.time, bundle.patterns);
    ingest::write_panel(dir / "panel.csv", bundle.universe, bundle.panel);
    ingest::write_population(dir / "population.csv", bundle.population);
    ingest::write_reference(dir / "reference.csv", bundle.universe, bundle.reference);
    if (!bundle.crosswalk.entries.empty()) {
        ingest::write_crosswalk(dir / "crosswalk.csv", bundle.universe, bundle.crosswalk);
    }
}

void write_truth(const std::filesystem::path& path, const SyntheticWorld& world) {
    ingest::write_surface(path, true_population(world));
}

} // namespace fluxpop::synth
