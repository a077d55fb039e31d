#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "caa/network.hpp"
#include "caa/types.hpp"

namespace caa {

inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kDefaultFallbackSpeedKmh = 60.0;
inline constexpr double kTravelTimeFloorSeconds = 60.0;

enum class TravelTimeSource { Routed, Fallback };

struct TravelTime {
    double seconds = 0.0;
    TravelTimeSource source = TravelTimeSource::Routed;
};

class TravelTimeTable {
public:
    void add(const std::string& a, const std::string& b, double seconds);
    const double* lookup(const std::string& a, const std::string& b) const;
    std::size_t size() const { return entries_.size(); }

private:
    std::map<OrgPair, double> entries_;
};

// Pair file (TSV, header row): org_lo <TAB> org_hi <TAB> seconds.
TravelTimeTable load_travel_times(const std::filesystem::path& path);

struct GeoPoint {
    double lat = 0.0;
    double lon = 0.0;
};

// Great-circle distance, km. Throws DataError on out-of-range coordinates.
double haversine_km(const GeoPoint& a, const GeoPoint& b);

// Great-circle travel time at a constant speed, seconds (no floor applied).
double fallback_time(const GeoPoint& a, const GeoPoint& b, double speed_kmh);

struct ImpedanceOptions {
    double fallback_speed_kmh = kDefaultFallbackSpeedKmh;
    double floor_seconds = kTravelTimeFloorSeconds;
};

// Table value if present, otherwise great-circle fallback; floored so that
// ln D_ij stays finite for co-located organisations.
TravelTime impedance(const TravelTimeTable& table, const std::string& org_a, const std::string& org_b,
                     const GeoPoint& coord_a, const GeoPoint& coord_b,
                     const ImpedanceOptions& opts = {});

}  // namespace caa
