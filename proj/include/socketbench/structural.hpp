#pragma once

// Analytic stand-in for a shell FEA of the socket wall.
//
// The wall of each region is treated as a pressurised cylinder with the
// socket's inner radius. This reproduces the design *decisions* (constraint
// pass/fail, range merging) but not the stresses of a limb-shaped FE model;
// externally computed stress tables can be replayed through the same logic
// with `sweep_from_table`.

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "socketbench/catalog.hpp"

namespace socketbench::structural {

using catalog::Provenance;
using catalog::Region;

enum class ShellModel { thin_shell, thick_wall };

std::string_view to_string(ShellModel m);
ShellModel parse_shell_model(std::string_view s);

// Hoop stress [MPa] in a cylinder of inner radius `inner_radius_m` and wall
// `thickness_mm` loaded by internal `pressure_mpa`.
//   thin_shell: p r / t                           (requires t / r < 0.2)
//   thick_wall: p (ro^2 + ri^2) / (ro^2 - ri^2)   (Lame, inner surface)
double shell_stress(double pressure_mpa, double inner_radius_m, double thickness_mm, ShellModel model);

struct SweepRow {
    double thickness_mm = 0.0;
    double stress_mpa = 0.0;
    double constraint_mpa = 0.0;
    bool pass = false;  // stress < constraint
};

std::vector<SweepRow> thickness_sweep(const catalog::RegionSpec& region, std::span<const double> thicknesses_mm,
                                      const catalog::SocketGeometry& geometry, ShellModel model);

// One row of an externally supplied stress table.
struct StressEntry {
    Region region = Region::rest;
    double thickness_mm = 0.0;
    double stress_mpa = 0.0;
};

// Columns: region,thickness_mm,stress_mpa
std::vector<StressEntry> load_stress_table(const std::filesystem::path& path);
std::vector<StressEntry> parse_stress_table(std::string_view text, std::string source_name = "stress table");

// Rows for `region` in ascending thickness, pass flags against its constraint.
std::vector<SweepRow> sweep_from_table(const catalog::RegionSpec& region, std::span<const StressEntry> table);

inline constexpr double default_similarity_tol_mpa = 0.005;

// Keeps passing thicknesses; an adjacent passing pair whose stresses differ by
// less than `similarity_tol_mpa` is replaced by its midpoint. Rows must be
// sorted by thickness. Output sorted and de-duplicated.
std::vector<double> merge_thickness_range(std::span<const SweepRow> rows, double similarity_tol_mpa);

// Applies the region's min_thickness and range policy on top of the merge.
std::vector<double> region_candidates(const catalog::RegionSpec& region, std::span<const SweepRow> rows,
                                      double similarity_tol_mpa);

struct RegionSweep {
    Region region = Region::rest;
    std::vector<SweepRow> rows;
    std::vector<double> candidates_mm;
};

struct DesignSweep {
    std::vector<RegionSweep> regions;
    std::vector<double> candidates_mm;  // union across regions
};

// Every region of the catalog with a non-empty sweep list.
DesignSweep design_sweep_analytic(const catalog::Catalog& catalog, ShellModel model,
                                  double similarity_tol_mpa = default_similarity_tol_mpa);
DesignSweep design_sweep_table(const catalog::Catalog& catalog, std::span<const StressEntry> table,
                               double similarity_tol_mpa = default_similarity_tol_mpa);

// region,thickness_mm,constraint_mpa,stress_mpa,pass
std::string sweep_to_delimited(const DesignSweep& sweep);

enum class StancePhase { heel_strike, mid_stance, push_off };
enum class SocketArea { anterior, medial, lateral, posterior };

std::string_view to_string(StancePhase p);
std::string_view to_string(SocketArea a);

struct StancePhaseLoad {
    StancePhase phase = StancePhase::heel_strike;
    std::map<SocketArea, double> interface_pressure_mpa;
    double fy_n = 0.0;
    double fz_n = 0.0;
};

inline constexpr double reference_body_mass_kg = 60.0;

// Published stance-phase interface pressures and projected GRFs for a 60 kg
// user. Other masses scale the forces linearly; pressures are left as is.
std::vector<StancePhaseLoad> stance_loads(double body_mass_kg);

struct SafetyFactor {
    double value = 0.0;
    Provenance strength_provenance = Provenance::external;
};

SafetyFactor factor_of_safety(double stress_mpa, double strength_mpa,
                              Provenance strength_provenance = Provenance::external);

struct FatigueLife {
    double cycles = 0.0;
    bool clamped = false;  // stress outside the curve; cycles is the nearest endpoint
    Provenance curve_provenance = Provenance::external;
};

// Log-log (Basquin) interpolation between the bracketing S-N points.
FatigueLife fatigue_life(double stress_amplitude_mpa, std::span<const catalog::SnPoint> sn_curve,
                         Provenance curve_provenance = Provenance::external);

}  // namespace socketbench::structural
