#pragma once

// Material / region / geometry configuration shared by every other module.
//
// The catalog is a single JSON document with three top-level sections,
// `materials`, `regions` and `geometry`. Field names carry their units
// (`youngs_modulus_mpa`, `probe_area_mm2`, ...). A catalog is immutable once
// loaded and can be shared between threads freely.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace socketbench::catalog {

enum class Region { tibia, fibula, calf, rest };

enum class Sensitivity { pressure_sensitive, pressure_tolerant };

// How a region turns its passing sweep rows into candidate thicknesses.
//   all_passing:      every passing thickness, with similar neighbours merged
//   lightest_passing: only the thinnest passing thickness
enum class RangePolicy { all_passing, lightest_passing };

// Where a number came from. `external` values are not in the source study
// (datasheet-typical) and every result derived from them says so.
enum class Provenance { published, external };

std::string_view to_string(Region r);
std::string_view to_string(Sensitivity s);
std::string_view to_string(RangePolicy p);
std::string_view to_string(Provenance p);

// Accepts the canonical capitalised name ("Tibia") or lower case.
Region parse_region(std::string_view s);
Sensitivity parse_sensitivity(std::string_view s);
RangePolicy parse_range_policy(std::string_view s);
Provenance parse_provenance(std::string_view s);

inline constexpr Region all_regions[] = {Region::tibia, Region::fibula, Region::calf, Region::rest};

struct SnPoint {
    double cycles = 0.0;
    double stress_amplitude_mpa = 0.0;

    bool operator==(const SnPoint&) const = default;
};

struct PrintProfile {
    double infill_percent = 0.0;
    std::string infill_pattern;
    double nozzle_mm = 0.0;

    bool operator==(const PrintProfile&) const = default;
};

struct MaterialSpec {
    std::string name;           // identifier used everywhere else ("tough_pla")
    std::string display_name;   // as printed in reports ("Tough PLA")
    double density_kg_m3 = 0.0;
    double youngs_modulus_mpa = 0.0;
    double poisson_ratio = 0.0;
    double yield_strength_mpa = 0.0;
    Provenance yield_strength_provenance = Provenance::external;
    std::vector<SnPoint> sn_curve;  // ascending cycles, strictly falling stress
    Provenance sn_curve_provenance = Provenance::external;
    PrintProfile print_profile;
    std::string notes;

    bool operator==(const MaterialSpec&) const = default;
};

struct RegionSpec {
    Region name = Region::rest;
    Sensitivity sensitivity = Sensitivity::pressure_tolerant;
    std::optional<double> ppt_constraint_mpa;  // absent for regions that are not swept
    double standing_pressure_mpa = 0.0;
    std::optional<double> probe_area_mm2;      // absent = not reported for this constraint
    std::optional<double> min_thickness_mm;    // thinner walls are rejected outright
    RangePolicy range_policy = RangePolicy::all_passing;
    std::vector<double> sweep_thicknesses_mm;

    bool operator==(const RegionSpec&) const = default;
};

struct SocketGeometry {
    double inner_diameter_m = 0.0962;
    double height_m = 0.16;
    std::map<Region, double> thickness_by_region_mm;

    double inner_radius_m() const { return inner_diameter_m / 2.0; }

    bool operator==(const SocketGeometry&) const = default;
};

struct Issue {
    std::string field;
    std::string message;

    bool operator==(const Issue&) const = default;
};

class Catalog {
public:
    std::vector<MaterialSpec> materials;
    std::vector<RegionSpec> regions;
    SocketGeometry geometry;

    // Throw ValidationError when the name is unknown.
    const MaterialSpec& material(std::string_view name) const;
    const RegionSpec& region(Region r) const;

    const MaterialSpec* find_material(std::string_view name) const;
    const RegionSpec* find_region(Region r) const;

    bool operator==(const Catalog&) const = default;
};

// Deterministic; an empty list means the catalog is valid.
std::vector<Issue> validate_catalog(const Catalog& catalog);

// Parse and validate. ParseError on malformed text or wrongly typed fields,
// ValidationError (naming the first offending field) on invariant violations.
Catalog parse_catalog(std::string_view text);
Catalog load_catalog(const std::filesystem::path& path);

std::string serialize_catalog(const Catalog& catalog);

}  // namespace socketbench::catalog
