#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "kmvar/lifetable.hpp"
#include "support/generators.hpp"

using namespace kmvar;

namespace {

std::vector<ObservationRecord> recs(std::initializer_list<std::pair<double, int>> xs) {
    std::vector<ObservationRecord> out;
    for (auto [t, s] : xs) out.push_back({t, s});
    return out;
}

// Direct risk-set enumeration: for each distinct event time count everyone
// with time >= t, the deaths at t, and the censorings in [t, next event).
RiskTable enumerate_risk_sets(const std::vector<ObservationRecord>& records) {
    std::vector<double> event_times;
    for (const auto& r : records) {
        if (r.status == 1) event_times.push_back(r.time);
    }
    std::sort(event_times.begin(), event_times.end());
    event_times.erase(std::unique(event_times.begin(), event_times.end()), event_times.end());

    RiskTable out;
    out.total = static_cast<std::int64_t>(records.size());
    for (const auto& r : records) {
        if (r.status == 0 && (event_times.empty() || r.time < event_times.front())) {
            ++out.pre_first_censored;
        }
    }
    for (std::size_t j = 0; j < event_times.size(); ++j) {
        const double t = event_times[j];
        const double next = j + 1 < event_times.size() ? event_times[j + 1]
                                                       : std::numeric_limits<double>::infinity();
        RiskRow row{t, 0, 0, 0};
        for (const auto& r : records) {
            if (r.time >= t) ++row.n;
            if (r.time == t && r.status == 1) ++row.d;
            if (r.status == 0 && r.time >= t && r.time < next) ++row.c;
        }
        out.rows.push_back(row);
    }
    return out;
}

}  // namespace

TEST_CASE("build_risk_table: worked example") {
    const auto table = build_risk_table(recs({{1, 1}, {2, 0}, {3, 1}, {4, 0}}));
    CHECK(table.total == 4);
    CHECK(table.pre_first_censored == 0);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0] == RiskRow{1, 4, 1, 1});
    CHECK(table.rows[1] == RiskRow{3, 2, 1, 1});
}

TEST_CASE("build_risk_table: no events") {
    const auto table = build_risk_table(recs({{5, 0}, {7, 0}}));
    CHECK(table.rows.empty());
    CHECK(table.total == 2);
    CHECK(table.pre_first_censored == 2);
    CHECK_NOTHROW(validate(table));
}

TEST_CASE("build_risk_table: censoring tied with an event stays at risk") {
    const auto table = build_risk_table(recs({{2, 1}, {2, 1}, {2, 0}}));
    REQUIRE(table.rows.size() == 1);
    CHECK(table.rows[0] == RiskRow{2, 3, 2, 1});
}

TEST_CASE("build_risk_table: censorings before the first event") {
    const auto table = build_risk_table(recs({{0.5, 0}, {1, 1}, {0.2, 0}, {3, 1}}));
    CHECK(table.pre_first_censored == 2);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0].n == 2);
    CHECK(table.rows[1] == RiskRow{3, 1, 1, 0});
}

TEST_CASE("build_risk_table: errors") {
    CHECK_THROWS_AS(build_risk_table({}), EmptyDataset);

    const auto bad_time = recs({{1, 1}, {-1, 0}});
    try {
        build_risk_table(bad_time);
        FAIL("expected InvalidRecord");
    } catch (const InvalidRecord& e) {
        CHECK(e.index() == 1);
    }
    CHECK_THROWS_AS(build_risk_table(recs({{std::nan(""), 1}})), InvalidRecord);
    CHECK_THROWS_AS(build_risk_table(recs({{HUGE_VAL, 1}})), InvalidRecord);
    CHECK_THROWS_AS(build_risk_table(recs({{1, 2}})), InvalidRecord);
}

TEST_CASE("build_risk_table matches direct risk-set enumeration") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        const auto records = testing::random_records(rng, 60, 0.4, 12);
        const auto table = build_risk_table(records);
        CHECK(table == enumerate_risk_sets(records));
    }
}

TEST_CASE("risk table properties on random data") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        auto records = testing::random_records(rng, 200, 0.5);
        const auto table = build_risk_table(records);
        CHECK_NOTHROW(validate(table));

        // Count chain replays every n from the totals.
        std::int64_t n = table.total - table.pre_first_censored;
        std::int64_t events = 0, censored = table.pre_first_censored;
        for (const auto& row : table.rows) {
            CHECK(row.n == n);
            n -= row.d + row.c;
            events += row.d;
            censored += row.c;
        }
        CHECK(n == 0);
        CHECK(events + censored == table.total);
        CHECK(events == std::count_if(records.begin(), records.end(),
                                      [](const auto& r) { return r.status == 1; }));

        std::shuffle(records.begin(), records.end(), rng);
        CHECK(build_risk_table(records) == table);
    }
}

TEST_CASE("validate rejects broken tables") {
    RiskTable t{{{1, 4, 1, 1}, {3, 2, 1, 1}}, 4, 0};
    CHECK_NOTHROW(validate(t));

    auto bad = t;
    bad.rows[1].n = 3;
    CHECK_THROWS_AS(validate(bad), Error);
    bad = t;
    bad.rows[1].t = 1;
    CHECK_THROWS_AS(validate(bad), Error);
    bad = t;
    bad.rows[0].d = 0;
    CHECK_THROWS_AS(validate(bad), Error);
}

TEST_CASE("parse_observations_csv") {
    SUBCASE("LF and CRLF") {
        const auto a = parse_observations_csv("time,status\n1.5,1\n2,0\n");
        const auto b = parse_observations_csv("time,status\r\n1.5,1\r\n2,0\r\n");
        CHECK(a == b);
        REQUIRE(a.size() == 2);
        CHECK(a[0] == ObservationRecord{1.5, 1});
        CHECK(a[1] == ObservationRecord{2.0, 0});
    }
    SUBCASE("blank lines and missing final newline") {
        const auto a = parse_observations_csv("time,status\n\n0.7276761,1\n\n54,0");
        REQUIRE(a.size() == 2);
        CHECK(a[0].time == 0.7276761);
    }
    SUBCASE("header only parses to no records") {
        CHECK(parse_observations_csv("time,status\n").empty());
    }
    SUBCASE("errors name the source line") {
        try {
            parse_observations_csv("time,status\n1,1\n\nabc,1\n");
            FAIL("expected InvalidRecord");
        } catch (const InvalidRecord& e) {
            CHECK(e.line() == 4);
            CHECK(std::string(e.what()).find("line 4") != std::string::npos);
        }
        CHECK_THROWS_AS(parse_observations_csv("t,s\n1,1\n"), InvalidRecord);
        CHECK_THROWS_AS(parse_observations_csv(""), InvalidRecord);
        CHECK_THROWS_AS(parse_observations_csv("time,status\n1,2\n"), InvalidRecord);
        CHECK_THROWS_AS(parse_observations_csv("time,status\n-1,1\n"), InvalidRecord);
        CHECK_THROWS_AS(parse_observations_csv("time,status\ninf,1\n"), InvalidRecord);
        CHECK_THROWS_AS(parse_observations_csv("time,status\n1,1,1\n"), InvalidRecord);
        CHECK_THROWS_AS(parse_observations_csv("time,status\n1\n"), InvalidRecord);
    }
}

TEST_CASE("observation CSV round trip is lossless") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    std::vector<ObservationRecord> records(500);
    for (auto& r : records) r = {u(rng), static_cast<int>(rng() & 1)};
    std::ostringstream out;
    write_observations_csv(out, records);
    CHECK(parse_observations_csv(out.str()) == records);
}
