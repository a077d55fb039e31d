#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "caa/gravity.hpp"
#include "caa/impact.hpp"
#include "caa/types.hpp"

namespace caa {

struct RunConfig {
    std::filesystem::path publications;
    std::filesystem::path registry;
    std::filesystem::path travel_times;  // optional; fallback used when empty/missing
    std::filesystem::path output_dir = "out";

    std::string datasets = "both";  // all | stable | both
    std::string models = "both";    // M1 | M2 | both
    std::vector<Scheme> schemes = {Scheme::AA, Scheme::FA, Scheme::LA};
    std::vector<long> thresholds = {300, 400, 600};

    FitOptions fit;
    bool include_other = false;
    double fallback_speed_kmh = kDefaultFallbackSpeedKmh;
    double floor_seconds = kTravelTimeFloorSeconds;
    int workers = 1;
    bool timestamp_header = true;

    bool want_all() const { return datasets != "stable"; }
    bool want_stable() const { return datasets != "all"; }
};

RunConfig load_config(const std::filesystem::path& path);
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

// Stable hash of everything that influences outputs; written into every
// emitted table so downstream stages can detect config drift.
std::string config_fingerprint(const RunConfig& cfg);

// Staged commands; each returns the process exit code (0 ok, 1 usage, 2 data,
// 3 numeric). Stages communicate through files in output_dir.
int cmd_validate(const RunConfig& cfg);
int cmd_links(const RunConfig& cfg);
int cmd_network(const RunConfig& cfg);
int cmd_gravity(const RunConfig& cfg);
int cmd_impact(const RunConfig& cfg);
int cmd_report(const RunConfig& cfg);

}  // namespace caa
