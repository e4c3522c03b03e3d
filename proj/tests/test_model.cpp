#include <doctest.h>

#include "fluxpop/model.hpp"

using namespace fluxpop;

TEST_CASE("universe construction and lookup") {
    const Universe u = build_universe({"A", "B", "C"});
    CHECK(u.size() == 3);
    CHECK(u.index_of("B") == 1);
    CHECK(u.id(2) == "C");
    CHECK(u.contains("A"));
    CHECK(u.find("missing") == u.size());
}

TEST_CASE("universe rejects duplicates and emptiness") {
    CHECK_THROWS_WITH_AS(build_universe({"A", "A"}), doctest::Contains("duplicate id A"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(build_universe({}), doctest::Contains("empty universe"),
                         std::invalid_argument);
}

TEST_CASE("universe index is a bijection") {
    const Universe u = build_universe({"x1", "x2", "x3", "x4", "x5"});
    for (std::uint32_t i = 0; i < u.size(); ++i) {
        CHECK(u.index_of(u.id(i)) == i);
    }
}

TEST_CASE("time index follows the civil calendar") {
    const TimeIndex sep = build_time_index(2022, 9);
    CHECK(sep.days == 30);
    CHECK(sep.tau == 720);
    CHECK(sep.first_weekday == 4); // 2022-09-01 was a Thursday

    CHECK(build_time_index(2022, 1).tau == 744);
    CHECK(build_time_index(2022, 2).tau == 672);
    CHECK(build_time_index(2024, 2).days == 29);
    CHECK_THROWS_AS(build_time_index(2022, 13), std::invalid_argument);
    CHECK_THROWS_AS(build_time_index(2022, 0), std::invalid_argument);
}

TEST_CASE("synthetic day counts keep tau consistent") {
    const TimeIndex t = time_index_with_days(2022, 9, 2);
    CHECK(t.days == 2);
    CHECK(t.tau == 48);
    CHECK(t.first_weekday == 4);
    CHECK_THROWS_AS(time_index_with_days(2022, 9, 0), std::invalid_argument);
}

TEST_CASE("hour meta decomposes the hour index") {
    const TimeIndex sep = build_time_index(2022, 9);

    const HourMeta m = hour_meta(sep, 36);
    CHECK(m.day == 1);
    CHECK(m.hour_of_day == 12);
    CHECK(m.is_weekday); // Friday

    const HourMeta zero = hour_meta(sep, 0);
    CHECK(zero.day == 0);
    CHECK(zero.hour_of_day == 0);
    CHECK(zero.is_weekday); // Thursday

    // 2022-09-03 was a Saturday
    CHECK_FALSE(hour_meta(sep, 2 * 24).is_weekday);

    CHECK_THROWS_AS(hour_meta(sep, sep.tau), std::out_of_range);
    CHECK_THROWS_AS(hour_meta(sep, -1), std::out_of_range);
}

TEST_CASE("hour meta round-trips for every hour") {
    const TimeIndex sep = build_time_index(2022, 9);
    for (int t = 0; t < sep.tau; ++t) {
        const HourMeta m = hour_meta(sep, t);
        CHECK(m.day * 24 + m.hour_of_day == t);
    }
}

TEST_CASE("population table validates alignment and sign") {
    const auto u = make_universe({"A", "B"});
    const PopulationTable table = make_population_table(u, {1500.0, 0.0});
    CHECK(table.values[0] == 1500.0);
    CHECK(table.total() == 1500.0);
    CHECK_THROWS_AS(make_population_table(u, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_population_table(u, {1.0, -5.0}), std::invalid_argument);
}

TEST_CASE("hour matrix rejects shape mismatches") {
    const auto u = make_universe({"A", "B"});
    const TimeIndex t = time_index_with_days(2022, 9, 1);
    HourMatrix m(t, u);
    CHECK(m.rows() == 24);
    CHECK(m.cols() == 2);
    m(3, 1) = 7.0;
    CHECK(m.at(3, 1) == 7.0);
    CHECK_THROWS_AS(m.at(24, 0), std::out_of_range);
    CHECK_THROWS_AS(HourMatrix(t, u, std::vector<double>(47, 0.0)), std::invalid_argument);
    CHECK_NOTHROW(HourMatrix(t, u, std::vector<double>(48, 0.0)));
}
