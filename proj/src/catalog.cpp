#include "socketbench/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "json_util.hpp"
#include "socketbench/error.hpp"

namespace socketbench::catalog {

using detail::json;

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

std::string_view to_string(Region r) {
    switch (r) {
        case Region::tibia: return "Tibia";
        case Region::fibula: return "Fibula";
        case Region::calf: return "Calf";
        case Region::rest: return "Rest";
    }
    return "?";
}

std::string_view to_string(Sensitivity s) {
    return s == Sensitivity::pressure_sensitive ? "pressure_sensitive" : "pressure_tolerant";
}

std::string_view to_string(RangePolicy p) {
    return p == RangePolicy::all_passing ? "all_passing" : "lightest_passing";
}

std::string_view to_string(Provenance p) { return p == Provenance::published ? "published" : "external"; }

Region parse_region(std::string_view s) {
    const std::string l = lower(s);
    if (l == "tibia") return Region::tibia;
    if (l == "fibula") return Region::fibula;
    if (l == "calf") return Region::calf;
    if (l == "rest") return Region::rest;
    throw ParseError("unknown region '" + std::string(s) + "'");
}

Sensitivity parse_sensitivity(std::string_view s) {
    if (s == "pressure_sensitive") return Sensitivity::pressure_sensitive;
    if (s == "pressure_tolerant") return Sensitivity::pressure_tolerant;
    throw ParseError("unknown sensitivity '" + std::string(s) + "'");
}

RangePolicy parse_range_policy(std::string_view s) {
    if (s == "all_passing") return RangePolicy::all_passing;
    if (s == "lightest_passing") return RangePolicy::lightest_passing;
    throw ParseError("unknown range policy '" + std::string(s) + "'");
}

Provenance parse_provenance(std::string_view s) {
    if (s == "published") return Provenance::published;
    if (s == "external") return Provenance::external;
    throw ParseError("unknown provenance '" + std::string(s) + "'");
}

const MaterialSpec* Catalog::find_material(std::string_view name) const {
    for (const auto& m : materials)
        if (m.name == name) return &m;
    return nullptr;
}

const RegionSpec* Catalog::find_region(Region r) const {
    for (const auto& reg : regions)
        if (reg.name == r) return &reg;
    return nullptr;
}

const MaterialSpec& Catalog::material(std::string_view name) const {
    if (const auto* m = find_material(name)) return *m;
    throw ValidationError("materials", "unknown material '" + std::string(name) + "'");
}

const RegionSpec& Catalog::region(Region r) const {
    if (const auto* reg = find_region(r)) return *reg;
    throw ValidationError("regions", "no entry for region " + std::string(to_string(r)));
}

std::vector<Issue> validate_catalog(const Catalog& catalog) {
    std::vector<Issue> issues;
    auto add = [&](std::string field, std::string message) {
        issues.push_back({std::move(field), std::move(message)});
    };

    std::set<std::string> seen_materials;
    for (const auto& m : catalog.materials) {
        const std::string base = "materials[" + m.name + "]";
        if (m.name.empty()) add("materials[]", "empty material name");
        if (!seen_materials.insert(m.name).second) add(base, "duplicate material");
        if (!(m.density_kg_m3 > 0)) add(base + ".density_kg_m3", "must be > 0");
        if (!(m.youngs_modulus_mpa > 0)) add(base + ".youngs_modulus_mpa", "must be > 0");
        if (!(m.poisson_ratio > 0 && m.poisson_ratio < 0.5))
            add(base + ".poisson_ratio", "must lie in (0, 0.5)");
        if (!(m.yield_strength_mpa > 0)) add(base + ".yield_strength_mpa", "must be > 0");
        if (m.sn_curve.size() < 2) {
            add(base + ".sn_curve", "needs at least 2 points");
        } else {
            bool monotone = true;
            for (std::size_t i = 0; i < m.sn_curve.size(); ++i) {
                const auto& p = m.sn_curve[i];
                if (!(p.cycles > 0) || !(p.stress_amplitude_mpa > 0)) monotone = false;
                if (i > 0) {
                    const auto& q = m.sn_curve[i - 1];
                    if (!(p.cycles > q.cycles) || !(p.stress_amplitude_mpa < q.stress_amplitude_mpa))
                        monotone = false;
                }
            }
            if (!monotone) add(base + ".sn_curve", "sn_curve not monotone");
        }
        if (!(m.print_profile.infill_percent > 0 && m.print_profile.infill_percent <= 100))
            add(base + ".print_profile.infill_percent", "must lie in (0, 100]");
        if (!(m.print_profile.nozzle_mm > 0)) add(base + ".print_profile.nozzle_mm", "must be > 0");
    }

    std::set<Region> seen_regions;
    for (const auto& r : catalog.regions) {
        const std::string base = "regions[" + std::string(to_string(r.name)) + "]";
        if (!seen_regions.insert(r.name).second) add(base, "duplicate region");
        if (!(r.standing_pressure_mpa >= 0)) add(base + ".standing_pressure_mpa", "must be >= 0");
        if (r.ppt_constraint_mpa && !(*r.ppt_constraint_mpa > r.standing_pressure_mpa))
            add(base + ".ppt_constraint_mpa",
                "region " + std::string(to_string(r.name)) + ": ppt_constraint must exceed standing_pressure");
        if (r.probe_area_mm2 && !(*r.probe_area_mm2 > 0)) add(base + ".probe_area_mm2", "must be > 0");
        if (r.min_thickness_mm && !(*r.min_thickness_mm > 0)) add(base + ".min_thickness_mm", "must be > 0");
        if (!r.sweep_thicknesses_mm.empty() && !r.ppt_constraint_mpa)
            add(base + ".sweep_thicknesses_mm", "swept region needs ppt_constraint_mpa");
        for (double t : r.sweep_thicknesses_mm)
            if (!(t > 0)) add(base + ".sweep_thicknesses_mm", "every thickness must be > 0");
    }

    const auto& g = catalog.geometry;
    if (!(g.inner_diameter_m > 0)) add("geometry.inner_diameter_m", "must be > 0");
    if (!(g.height_m > 0)) add("geometry.height_m", "must be > 0");
    for (const auto& [region, t] : g.thickness_by_region_mm)
        if (!(t > 0))
            add("geometry.thickness_by_region_mm." + std::string(to_string(region)), "must be > 0");

    return issues;
}

namespace {

std::vector<double> number_array(const json& arr, const std::string& path) {
    std::vector<double> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number()) throw ParseError(path + "[" + std::to_string(i) + "]: expected a number");
        out.push_back(arr[i].get<double>());
    }
    return out;
}

MaterialSpec parse_material(const json& j, const std::string& path) {
    using namespace detail;
    MaterialSpec m;
    m.name = get_string(j, "name", path);
    m.display_name = j.contains("display_name") ? get_string(j, "display_name", path) : m.name;
    m.density_kg_m3 = get_number(j, "density_kg_m3", path);
    m.youngs_modulus_mpa = get_number(j, "youngs_modulus_mpa", path);
    m.poisson_ratio = get_number(j, "poisson_ratio", path);
    m.yield_strength_mpa = get_number(j, "yield_strength_mpa", path);
    m.yield_strength_provenance = parse_provenance(get_string(j, "yield_strength_provenance", path));
    const json& sn = get_array(j, "sn_curve", path);
    for (std::size_t i = 0; i < sn.size(); ++i) {
        const std::string p = path + ".sn_curve[" + std::to_string(i) + "]";
        m.sn_curve.push_back({get_number(sn[i], "cycles", p), get_number(sn[i], "stress_amplitude_mpa", p)});
    }
    m.sn_curve_provenance = parse_provenance(get_string(j, "sn_curve_provenance", path));
    const json& pp = require(j, "print_profile", path);
    const std::string ppath = path + ".print_profile";
    m.print_profile.infill_percent = get_number(pp, "infill_percent", ppath);
    m.print_profile.infill_pattern = get_string(pp, "infill_pattern", ppath);
    m.print_profile.nozzle_mm = get_number(pp, "nozzle_mm", ppath);
    if (j.contains("notes")) m.notes = get_string(j, "notes", path);
    return m;
}

RegionSpec parse_region_spec(const json& j, const std::string& path) {
    using namespace detail;
    RegionSpec r;
    r.name = parse_region(get_string(j, "name", path));
    r.sensitivity = parse_sensitivity(get_string(j, "sensitivity", path));
    r.ppt_constraint_mpa = get_optional_number(j, "ppt_constraint_mpa", path);
    r.standing_pressure_mpa = get_number(j, "standing_pressure_mpa", path);
    r.probe_area_mm2 = get_optional_number(j, "probe_area_mm2", path);
    r.min_thickness_mm = get_optional_number(j, "min_thickness_mm", path);
    r.range_policy = j.contains("range_policy") ? parse_range_policy(get_string(j, "range_policy", path))
                                                : RangePolicy::all_passing;
    if (j.contains("sweep_thicknesses_mm"))
        r.sweep_thicknesses_mm =
            number_array(get_array(j, "sweep_thicknesses_mm", path), path + ".sweep_thicknesses_mm");
    return r;
}

json optional_to_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

Catalog parse_catalog(std::string_view text) {
    using namespace detail;
    const json doc = parse_json(text, "catalog");
    Catalog c;
    try {
        const json& mats = get_array(doc, "materials", "catalog");
        for (std::size_t i = 0; i < mats.size(); ++i)
            c.materials.push_back(parse_material(mats[i], "materials[" + std::to_string(i) + "]"));
        const json& regs = get_array(doc, "regions", "catalog");
        for (std::size_t i = 0; i < regs.size(); ++i)
            c.regions.push_back(parse_region_spec(regs[i], "regions[" + std::to_string(i) + "]"));
        const json& geo = require(doc, "geometry", "catalog");
        c.geometry.inner_diameter_m = get_number(geo, "inner_diameter_m", "geometry");
        c.geometry.height_m = get_number(geo, "height_m", "geometry");
        if (geo.contains("thickness_by_region_mm")) {
            const json& tb = geo.at("thickness_by_region_mm");
            if (!tb.is_object()) throw ParseError("geometry.thickness_by_region_mm: expected an object");
            for (const auto& [key, val] : tb.items()) {
                if (!val.is_number())
                    throw ParseError("geometry.thickness_by_region_mm." + key + ": expected a number");
                c.geometry.thickness_by_region_mm[parse_region(key)] = val.get<double>();
            }
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("catalog: ") + e.what());
    }

    const auto issues = validate_catalog(c);
    if (!issues.empty()) throw ValidationError(issues.front().field, issues.front().message);
    return c;
}

Catalog load_catalog(const std::filesystem::path& path) {
    return parse_catalog(detail::read_text_file(path));
}

std::string serialize_catalog(const Catalog& catalog) {
    json doc;
    doc["materials"] = json::array();
    for (const auto& m : catalog.materials) {
        json sn = json::array();
        for (const auto& p : m.sn_curve)
            sn.push_back({{"cycles", p.cycles}, {"stress_amplitude_mpa", p.stress_amplitude_mpa}});
        json jm = {
            {"name", m.name},
            {"display_name", m.display_name},
            {"density_kg_m3", m.density_kg_m3},
            {"youngs_modulus_mpa", m.youngs_modulus_mpa},
            {"poisson_ratio", m.poisson_ratio},
            {"yield_strength_mpa", m.yield_strength_mpa},
            {"yield_strength_provenance", to_string(m.yield_strength_provenance)},
            {"sn_curve", sn},
            {"sn_curve_provenance", to_string(m.sn_curve_provenance)},
            {"print_profile",
             {{"infill_percent", m.print_profile.infill_percent},
              {"infill_pattern", m.print_profile.infill_pattern},
              {"nozzle_mm", m.print_profile.nozzle_mm}}},
        };
        if (!m.notes.empty()) jm["notes"] = m.notes;
        doc["materials"].push_back(std::move(jm));
    }
    doc["regions"] = json::array();
    for (const auto& r : catalog.regions) {
        doc["regions"].push_back({
            {"name", to_string(r.name)},
            {"sensitivity", to_string(r.sensitivity)},
            {"ppt_constraint_mpa", optional_to_json(r.ppt_constraint_mpa)},
            {"standing_pressure_mpa", r.standing_pressure_mpa},
            {"probe_area_mm2", optional_to_json(r.probe_area_mm2)},
            {"min_thickness_mm", optional_to_json(r.min_thickness_mm)},
            {"range_policy", to_string(r.range_policy)},
            {"sweep_thicknesses_mm", r.sweep_thicknesses_mm},
        });
    }
    json thick = json::object();
    for (const auto& [region, t] : catalog.geometry.thickness_by_region_mm)
        thick[std::string(to_string(region))] = t;
    doc["geometry"] = {
        {"inner_diameter_m", catalog.geometry.inner_diameter_m},
        {"height_m", catalog.geometry.height_m},
        {"thickness_by_region_mm", thick},
    };
    return doc.dump(2) + "\n";
}

}  // namespace socketbench::catalog
