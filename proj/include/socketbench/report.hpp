#pragma once

// Socket-versus-socket comparison assembled from the batch pipelines. Every
// number in the report is the output of one gait/pressuremap/ppt operation.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "socketbench/catalog.hpp"
#include "socketbench/gait.hpp"
#include "socketbench/pressuremap.hpp"
#include "socketbench/signals.hpp"

namespace socketbench::report {

using catalog::Region;

struct SocketInputs {
    std::string id;
    std::string label;
    double mass_kg = 0.0;
    std::vector<std::pair<std::filesystem::path, std::filesystem::path>> gait_trials;  // (trial, events)
    std::filesystem::path pressure_frames;
    std::filesystem::path pressure_mask;
    std::filesystem::path pressure_cycles;
};

struct StaticInputs {
    std::filesystem::path traces;
    pressuremap::StaticTestConfig config;
    double smoothing_factor = pressuremap::default_smoothing_factor;
    double dwell_fraction = pressuremap::default_dwell_fraction;
    std::map<Region, double> literature_mpa_per_bw;
    double literature_body_mass_kg = 0.0;
};

struct SpeedReference {
    std::string label;
    double velocity_mps = 0.0;
    std::string provenance;
};

struct Manifest {
    SocketInputs candidate;
    SocketInputs reference;
    std::vector<Region> pressure_regions;
    pressuremap::Statistic pressure_statistic = pressuremap::Statistic::mean;
    gait::Window gait_window = gait::Window::stance;
    std::optional<StaticInputs> static_test;
    std::optional<SpeedReference> speed_reference;
    std::map<std::string, std::string> provenance;
};

// Paths inside resolve against the manifest's directory.
Manifest load_manifest(const std::filesystem::path& path);

struct RegionPressure {
    Region region = Region::tibia;
    signals::Peak candidate_peak;
    signals::Peak reference_peak;
    double candidate_mean_kpa = 0.0;
    double reference_mean_kpa = 0.0;
    double peak_reduction_pct = 0.0;
    double mean_reduction_pct = 0.0;
    double velocity_normalized_reduction_pct = 0.0;
};

struct StaticRegion {
    Region region = Region::tibia;
    double plateau_mpa = 0.0;
    double mpa_per_bw = 0.0;
    std::optional<double> literature_mpa_per_bw;
    std::optional<double> reduction_vs_literature_pct;
};

struct ComparisonReport {
    std::string candidate_id;
    std::string reference_id;
    double candidate_mass_kg = 0.0;
    double reference_mass_kg = 0.0;
    double mass_delta_pct = 0.0;
    std::vector<RegionPressure> pressure;
    gait::GaitMetrics candidate_gait;
    gait::GaitMetrics reference_gait;
    std::map<gait::Joint, double> symmetry_gain_pp;  // candidate - reference
    double static_target_force_n = 0.0;
    std::vector<StaticRegion> static_regions;
    std::optional<SpeedReference> speed_reference;
    std::optional<double> speed_change_pct;  // candidate CoM metric vs the speed reference
    std::map<std::string, std::string> provenance;
};

ComparisonReport compare(const Manifest& manifest);

// Deterministic JSON with units alongside every quantity.
std::string report_to_json(const ComparisonReport& report);

}  // namespace socketbench::report
