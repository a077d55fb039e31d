#include <doctest.h>

#include <cmath>
#include <random>

#include "caa/geo.hpp"
#include "fixtures.hpp"

using namespace caa;
using namespace caa::testing;

namespace {

// Independent great-circle oracle via the spherical law of cosines.
double oracle_km(const GeoPoint& a, const GeoPoint& b) {
    const double d2r = M_PI / 180.0;
    double c = std::sin(a.lat * d2r) * std::sin(b.lat * d2r) +
               std::cos(a.lat * d2r) * std::cos(b.lat * d2r) * std::cos((b.lon - a.lon) * d2r);
    return kEarthRadiusKm * std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace

TEST_CASE("travel time table is symmetric and rejects bad rows") {
    TempDir dir("geo");
    auto path = write_file(dir.file("tt.tsv"),
        "org_lo\torg_hi\tseconds\n"
        "A\tB\t1800\n"
        "A\tC\t3600\n"
        "B\tC\t2400\n");
    TravelTimeTable table = load_travel_times(path);
    CHECK(table.size() == 3);
    CHECK(*table.lookup("A", "B") == 1800.0);
    CHECK(*table.lookup("B", "A") == 1800.0);
    CHECK(table.lookup("A", "Z") == nullptr);

    SUBCASE("negative duration") {
        auto bad = write_file(dir.file("neg.tsv"), "org_lo\torg_hi\tseconds\nA\tB\t-5\n");
        CHECK_THROWS_AS(load_travel_times(bad), DataError);
    }
    SUBCASE("conflicting duplicate") {
        auto bad = write_file(dir.file("dup.tsv"),
            "org_lo\torg_hi\tseconds\nA\tB\t100\nB\tA\t200\n");
        CHECK_THROWS_AS(load_travel_times(bad), DataError);
    }
}

TEST_CASE("fallback_time closed-form checks") {
    SUBCASE("identical coordinates give zero before flooring") {
        CHECK(fallback_time({48.0, 16.0}, {48.0, 16.0}, 60.0) == 0.0);
    }
    SUBCASE("antipodes at 60 km/h") {
        // Half circumference 6371 * pi km.
        double expected = (kEarthRadiusKm * M_PI) / 60.0 * 3600.0;
        CHECK(fallback_time({0.0, 0.0}, {0.0, 180.0}, 60.0) == doctest::Approx(expected).epsilon(1e-9));
        CHECK(expected == doctest::Approx(1.2009e6).epsilon(1e-3));
    }
    SUBCASE("Vienna to Graz is roughly 145 km") {
        double km = haversine_km({48.2082, 16.3738}, {47.0707, 15.4395});
        CHECK(km == doctest::Approx(145.0).epsilon(0.02));
        double secs = fallback_time({48.2082, 16.3738}, {47.0707, 15.4395}, 60.0);
        CHECK(secs == doctest::Approx(8700.0).epsilon(0.02));
    }
    SUBCASE("invalid coordinates are rejected") {
        CHECK_THROWS_AS(haversine_km({95.0, 0.0}, {0.0, 0.0}), DataError);
        CHECK_THROWS_AS(haversine_km({0.0, 200.0}, {0.0, 0.0}), DataError);
        CHECK_THROWS_AS(fallback_time({0.0, 0.0}, {0.0, 1.0}, 0.0), UsageError);
    }
}

TEST_CASE("haversine matches an independent great-circle oracle") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> lat(-89.0, 89.0), lon(-180.0, 180.0);
    for (int i = 0; i < 1000; ++i) {
        GeoPoint a{lat(rng), lon(rng)}, b{lat(rng), lon(rng)};
        double ours = haversine_km(a, b);
        double ref = oracle_km(a, b);
        if (ref > 1.0)  // law of cosines is itself ill-conditioned near zero
            CHECK(ours == doctest::Approx(ref).epsilon(1e-6));
    }
}

TEST_CASE("impedance prefers the table and floors the fallback") {
    TempDir dir("geo");
    TravelTimeTable table = load_travel_times(write_file(dir.file("tt.tsv"),
        "org_lo\torg_hi\tseconds\nA\tB\t1800\n"));
    GeoPoint vienna{48.2082, 16.3738}, graz{47.0707, 15.4395};

    SUBCASE("pair in table") {
        TravelTime t = impedance(table, "A", "B", vienna, graz);
        CHECK(t.seconds == 1800.0);
        CHECK(t.source == TravelTimeSource::Routed);
    }
    SUBCASE("pair absent falls back to great-circle time") {
        TravelTime t = impedance(table, "A", "C", vienna, graz);
        CHECK(t.source == TravelTimeSource::Fallback);
        CHECK(t.seconds == doctest::Approx(fallback_time(vienna, graz, 60.0)));
    }
    SUBCASE("co-located distinct organisations get the floor") {
        TravelTime t = impedance(table, "A", "C", vienna, vienna);
        CHECK(t.seconds == kTravelTimeFloorSeconds);
    }
    SUBCASE("symmetry") {
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> lat(46.0, 49.0), lon(9.0, 17.0);
        for (int i = 0; i < 50; ++i) {
            GeoPoint p{lat(rng), lon(rng)}, q{lat(rng), lon(rng)};
            CHECK(impedance(table, "X", "Y", p, q).seconds ==
                  impedance(table, "Y", "X", q, p).seconds);
        }
    }
}
