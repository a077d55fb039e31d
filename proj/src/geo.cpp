#include "caa/geo.hpp"

#include <cmath>

#include "tsv.hpp"

namespace caa {

void TravelTimeTable::add(const std::string& a, const std::string& b, double seconds) {
    if (!(seconds > 0.0)) throw DataError("non-positive travel time for pair " + a + " / " + b);
    auto pair = canonical_pair(a, b);
    auto [it, inserted] = entries_.emplace(pair, seconds);
    if (!inserted && it->second != seconds)
        throw DataError("conflicting travel times for pair " + pair.first + " / " + pair.second);
}

const double* TravelTimeTable::lookup(const std::string& a, const std::string& b) const {
    auto it = entries_.find(canonical_pair(a, b));
    return it == entries_.end() ? nullptr : &it->second;
}

TravelTimeTable load_travel_times(const std::filesystem::path& path) {
    TravelTimeTable table;
    detail::for_each_row(path, {"org_lo", "org_hi", "seconds"},
                         [&](std::size_t row, const std::vector<std::string>& cols) {
        double seconds = detail::parse_double(cols[2], row, "seconds");
        if (!(seconds > 0.0))
            throw DataError("row " + std::to_string(row) + ": non-positive travel time");
        table.add(cols[0], cols[1], seconds);
    });
    return table;
}

namespace {

constexpr double kDegToRad = M_PI / 180.0;

void check_coordinates(const GeoPoint& p) {
    if (!(p.lat >= -90.0 && p.lat <= 90.0) || !(p.lon >= -180.0 && p.lon <= 180.0))
        throw DataError("coordinates out of range: lat " + std::to_string(p.lat) + ", lon " +
                        std::to_string(p.lon));
}

}  // namespace

double haversine_km(const GeoPoint& a, const GeoPoint& b) {
    check_coordinates(a);
    check_coordinates(b);
    const double lat1 = a.lat * kDegToRad, lat2 = b.lat * kDegToRad;
    const double dlat = (b.lat - a.lat) * kDegToRad;
    const double dlon = (b.lon - a.lon) * kDegToRad;
    const double s1 = std::sin(dlat / 2.0), s2 = std::sin(dlon / 2.0);
    const double h = s1 * s1 + std::cos(lat1) * std::cos(lat2) * s2 * s2;
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

double fallback_time(const GeoPoint& a, const GeoPoint& b, double speed_kmh) {
    if (!(speed_kmh > 0.0)) throw UsageError("fallback speed must be positive");
    return haversine_km(a, b) / speed_kmh * 3600.0;
}

TravelTime impedance(const TravelTimeTable& table, const std::string& org_a, const std::string& org_b,
                     const GeoPoint& coord_a, const GeoPoint& coord_b, const ImpedanceOptions& opts) {
    TravelTime result;
    if (const double* seconds = table.lookup(org_a, org_b)) {
        result.seconds = *seconds;
        result.source = TravelTimeSource::Routed;
    } else {
        result.seconds = fallback_time(coord_a, coord_b, opts.fallback_speed_kmh);
        result.source = TravelTimeSource::Fallback;
    }
    result.seconds = std::max(result.seconds, opts.floor_seconds);
    return result;
}

}  // namespace caa
