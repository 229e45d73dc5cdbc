#include "socketbench/structural.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "socketbench/delimited.hpp"
#include "socketbench/error.hpp"

namespace socketbench::structural {

std::string_view to_string(ShellModel m) { return m == ShellModel::thin_shell ? "thin_shell" : "thick_wall"; }

ShellModel parse_shell_model(std::string_view s) {
    if (s == "thin_shell") return ShellModel::thin_shell;
    if (s == "thick_wall") return ShellModel::thick_wall;
    throw ParseError("unknown shell model '" + std::string(s) + "'");
}

double shell_stress(double pressure_mpa, double inner_radius_m, double thickness_mm, ShellModel model) {
    if (!(pressure_mpa > 0) || !(inner_radius_m > 0) || !(thickness_mm > 0))
        throw DomainError("shell_stress: pressure, radius and thickness must be > 0");
    const double t = thickness_mm * 1e-3;
    if (model == ShellModel::thin_shell) {
        if (!(t / inner_radius_m < 0.2))
            throw ModelError("shell_stress: thin_shell needs thickness/radius < 0.2 (got " +
                             std::to_string(t / inner_radius_m) + ")");
        return pressure_mpa * inner_radius_m / t;
    }
    const double ri2 = inner_radius_m * inner_radius_m;
    const double ro = inner_radius_m + t;
    const double ro2 = ro * ro;
    return pressure_mpa * (ro2 + ri2) / (ro2 - ri2);
}

std::vector<SweepRow> thickness_sweep(const catalog::RegionSpec& region, std::span<const double> thicknesses_mm,
                                      const catalog::SocketGeometry& geometry, ShellModel model) {
    if (thicknesses_mm.empty()) throw DomainError("thickness_sweep: empty thickness list");
    if (!region.ppt_constraint_mpa)
        throw DomainError("thickness_sweep: region " + std::string(to_string(region.name)) + " has no constraint");
    std::vector<SweepRow> rows;
    rows.reserve(thicknesses_mm.size());
    for (double t : thicknesses_mm) {
        SweepRow row;
        row.thickness_mm = t;
        row.stress_mpa = shell_stress(region.standing_pressure_mpa, geometry.inner_radius_m(), t, model);
        row.constraint_mpa = *region.ppt_constraint_mpa;
        row.pass = row.stress_mpa < row.constraint_mpa;
        rows.push_back(row);
    }
    return rows;
}

namespace {

std::vector<StressEntry> stress_entries(const DelimitedTable& table) {
    const auto c_region = table.column("region");
    const auto c_thick = table.column("thickness_mm");
    const auto c_stress = table.column("stress_mpa");
    std::vector<StressEntry> out;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        StressEntry e;
        e.region = catalog::parse_region(table.cell(i, c_region));
        e.thickness_mm = table.number(i, c_thick);
        e.stress_mpa = table.number(i, c_stress);
        if (!(e.thickness_mm > 0) || !(e.stress_mpa >= 0))
            throw ParseError(table.source + ":" + std::to_string(table.line_numbers[i]) +
                             ": thickness must be > 0 and stress >= 0");
        out.push_back(e);
    }
    return out;
}

}  // namespace

std::vector<StressEntry> parse_stress_table(std::string_view text, std::string source_name) {
    return stress_entries(parse_delimited(text, std::move(source_name)));
}

std::vector<StressEntry> load_stress_table(const std::filesystem::path& path) {
    return stress_entries(load_delimited(path));
}

std::vector<SweepRow> sweep_from_table(const catalog::RegionSpec& region, std::span<const StressEntry> table) {
    if (!region.ppt_constraint_mpa)
        throw DomainError("sweep_from_table: region " + std::string(to_string(region.name)) + " has no constraint");
    std::vector<SweepRow> rows;
    for (const auto& e : table) {
        if (e.region != region.name) continue;
        rows.push_back({e.thickness_mm, e.stress_mpa, *region.ppt_constraint_mpa,
                        e.stress_mpa < *region.ppt_constraint_mpa});
    }
    std::sort(rows.begin(), rows.end(),
              [](const SweepRow& a, const SweepRow& b) { return a.thickness_mm < b.thickness_mm; });
    return rows;
}

namespace {

// Published stresses carry three decimals, so a difference that equals the
// tolerance must stay "not similar" whichever way it rounds in binary.
bool similar(double a, double b, double tol) { return std::abs(a - b) < tol * (1.0 - 1e-9); }

void sort_unique(std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end(), [](double a, double b) { return std::abs(a - b) < 1e-9; }), v.end());
}

}  // namespace

std::vector<double> merge_thickness_range(std::span<const SweepRow> rows, double similarity_tol_mpa) {
    if (!(similarity_tol_mpa > 0)) throw DomainError("merge_thickness_range: tolerance must be > 0");
    std::vector<double> out;
    std::size_t i = 0;
    while (i < rows.size()) {
        const auto& row = rows[i];
        if (!row.pass) {
            ++i;
            continue;
        }
        if (i + 1 < rows.size() && rows[i + 1].pass &&
            similar(row.stress_mpa, rows[i + 1].stress_mpa, similarity_tol_mpa)) {
            out.push_back(0.5 * (row.thickness_mm + rows[i + 1].thickness_mm));
            i += 2;
            continue;
        }
        out.push_back(row.thickness_mm);
        ++i;
    }
    sort_unique(out);
    return out;
}

std::vector<double> region_candidates(const catalog::RegionSpec& region, std::span<const SweepRow> rows,
                                      double similarity_tol_mpa) {
    std::vector<SweepRow> usable;
    for (const auto& r : rows)
        if (!region.min_thickness_mm || r.thickness_mm >= *region.min_thickness_mm) usable.push_back(r);

    if (region.range_policy == catalog::RangePolicy::lightest_passing) {
        for (const auto& r : usable)
            if (r.pass) return {r.thickness_mm};
        return {};
    }
    return merge_thickness_range(usable, similarity_tol_mpa);
}

namespace {

DesignSweep assemble(const catalog::Catalog& catalog, double tol,
                     const std::function<std::vector<SweepRow>(const catalog::RegionSpec&)>& rows_for) {
    DesignSweep sweep;
    for (const auto& region : catalog.regions) {
        if (region.sweep_thicknesses_mm.empty()) continue;
        RegionSweep rs;
        rs.region = region.name;
        rs.rows = rows_for(region);
        rs.candidates_mm = region_candidates(region, rs.rows, tol);
        sweep.candidates_mm.insert(sweep.candidates_mm.end(), rs.candidates_mm.begin(), rs.candidates_mm.end());
        sweep.regions.push_back(std::move(rs));
    }
    sort_unique(sweep.candidates_mm);
    return sweep;
}

}  // namespace

DesignSweep design_sweep_analytic(const catalog::Catalog& catalog, ShellModel model, double similarity_tol_mpa) {
    return assemble(catalog, similarity_tol_mpa, [&](const catalog::RegionSpec& region) {
        auto thicknesses = region.sweep_thicknesses_mm;
        std::sort(thicknesses.begin(), thicknesses.end());
        return thickness_sweep(region, thicknesses, catalog.geometry, model);
    });
}

DesignSweep design_sweep_table(const catalog::Catalog& catalog, std::span<const StressEntry> table,
                               double similarity_tol_mpa) {
    return assemble(catalog, similarity_tol_mpa, [&](const catalog::RegionSpec& region) {
        auto rows = sweep_from_table(region, table);
        if (rows.empty())
            throw DomainError("design sweep: stress table has no rows for region " +
                              std::string(to_string(region.name)));
        return rows;
    });
}

std::string sweep_to_delimited(const DesignSweep& sweep) {
    std::ostringstream out;
    out << "# units: thickness=mm constraint=MPa stress=MPa\n";
    out << "region,thickness_mm,constraint_mpa,stress_mpa,pass\n";
    for (const auto& r : sweep.regions)
        for (const auto& row : r.rows)
            out << to_string(r.region) << ',' << format_fixed(row.thickness_mm, 2) << ','
                << format_fixed(row.constraint_mpa, 3) << ',' << format_fixed(row.stress_mpa, 3) << ','
                << (row.pass ? "true" : "false") << '\n';
    return out.str();
}

std::string_view to_string(StancePhase p) {
    switch (p) {
        case StancePhase::heel_strike: return "heel_strike";
        case StancePhase::mid_stance: return "mid_stance";
        case StancePhase::push_off: return "push_off";
    }
    return "?";
}

std::string_view to_string(SocketArea a) {
    switch (a) {
        case SocketArea::anterior: return "Anterior";
        case SocketArea::medial: return "Medial";
        case SocketArea::lateral: return "Lateral";
        case SocketArea::posterior: return "Posterior";
    }
    return "?";
}

std::vector<StancePhaseLoad> stance_loads(double body_mass_kg) {
    if (!(body_mass_kg > 0)) throw DomainError("stance_loads: body mass must be > 0");
    using enum SocketArea;
    std::vector<StancePhaseLoad> loads = {
        {StancePhase::heel_strike, {{anterior, 0.0574}, {medial, 0.0698}, {lateral, 0.0677}, {posterior, 0.0750}},
         120.0, 580.0},
        {StancePhase::mid_stance, {{anterior, 0.0543}, {medial, 0.0712}, {lateral, 0.0631}, {posterior, 0.0714}},
         92.0, 582.0},
        {StancePhase::push_off, {{anterior, 0.0754}, {medial, 0.0836}, {lateral, 0.0729}, {posterior, 0.0882}},
         112.0, 578.0},
    };
    if (body_mass_kg != reference_body_mass_kg) {
        const double scale = body_mass_kg / reference_body_mass_kg;
        for (auto& l : loads) {
            l.fy_n *= scale;
            l.fz_n *= scale;
        }
    }
    return loads;
}

SafetyFactor factor_of_safety(double stress_mpa, double strength_mpa, Provenance strength_provenance) {
    if (!(stress_mpa > 0) || !(strength_mpa > 0))
        throw DomainError("factor_of_safety: stress and strength must be > 0");
    return {strength_mpa / stress_mpa, strength_provenance};
}

FatigueLife fatigue_life(double stress_amplitude_mpa, std::span<const catalog::SnPoint> sn_curve,
                         Provenance curve_provenance) {
    if (!(stress_amplitude_mpa > 0)) throw DomainError("fatigue_life: stress amplitude must be > 0");
    if (sn_curve.size() < 2) throw DomainError("fatigue_life: invalid S-N curve (fewer than 2 points)");
    for (std::size_t i = 0; i < sn_curve.size(); ++i) {
        if (!(sn_curve[i].cycles > 0) || !(sn_curve[i].stress_amplitude_mpa > 0))
            throw DomainError("fatigue_life: invalid S-N curve (non-positive point)");
        if (i > 0 && (!(sn_curve[i].cycles > sn_curve[i - 1].cycles) ||
                      !(sn_curve[i].stress_amplitude_mpa < sn_curve[i - 1].stress_amplitude_mpa)))
            throw DomainError("fatigue_life: invalid S-N curve (not monotone)");
    }

    const auto& first = sn_curve.front();
    const auto& last = sn_curve.back();
    if (stress_amplitude_mpa >= first.stress_amplitude_mpa)
        return {first.cycles, stress_amplitude_mpa > first.stress_amplitude_mpa, curve_provenance};
    if (stress_amplitude_mpa < last.stress_amplitude_mpa) return {last.cycles, true, curve_provenance};

    for (std::size_t i = 1; i < sn_curve.size(); ++i) {
        const auto& hi = sn_curve[i - 1];  // higher stress, fewer cycles
        const auto& lo = sn_curve[i];
        if (stress_amplitude_mpa < lo.stress_amplitude_mpa) continue;
        const double f = (std::log10(stress_amplitude_mpa) - std::log10(hi.stress_amplitude_mpa)) /
                         (std::log10(lo.stress_amplitude_mpa) - std::log10(hi.stress_amplitude_mpa));
        const double log_n = std::log10(hi.cycles) + f * (std::log10(lo.cycles) - std::log10(hi.cycles));
        return {std::pow(10.0, log_n), false, curve_provenance};
    }
    return {last.cycles, false, curve_provenance};
}

}  // namespace socketbench::structural
