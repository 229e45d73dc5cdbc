#include "socketbench/report.hpp"

#include "json_util.hpp"
#include "socketbench/error.hpp"

namespace socketbench::report {

using detail::json;

namespace {

SocketInputs socket_inputs(const json& j, const std::string& path, const std::filesystem::path& base) {
    using namespace detail;
    SocketInputs s;
    s.id = get_string(j, "id", path);
    s.label = j.value("label", s.id);
    s.mass_kg = get_number(j, "mass_kg", path);
    const json& trials = get_array(j, "gait", path);
    for (std::size_t i = 0; i < trials.size(); ++i) {
        const std::string p = path + ".gait[" + std::to_string(i) + "]";
        s.gait_trials.emplace_back(base / get_string(trials[i], "trial", p), base / get_string(trials[i], "events", p));
    }
    const json& pr = require(j, "pressure", path);
    s.pressure_frames = base / get_string(pr, "frames", path + ".pressure");
    s.pressure_mask = base / get_string(pr, "mask", path + ".pressure");
    s.pressure_cycles = base / get_string(pr, "cycles", path + ".pressure");
    return s;
}

std::vector<gait::GaitTrial> load_trials(const SocketInputs& s) {
    std::vector<gait::GaitTrial> out;
    for (const auto& [trial, events] : s.gait_trials) out.push_back(gait::load_trial(trial, events));
    if (out.empty()) throw ValidationError(s.id + ".gait", "no trials");
    return out;
}

}  // namespace

Manifest load_manifest(const std::filesystem::path& path) {
    using namespace detail;
    const json doc = parse_json(read_text_file(path), path.string());
    const auto base = path.parent_path();
    Manifest m;
    try {
        m.candidate = socket_inputs(require(doc, "candidate", "manifest"), "candidate", base);
        m.reference = socket_inputs(require(doc, "reference", "manifest"), "reference", base);
        for (const auto& r : get_array(doc, "pressure_regions", "manifest"))
            m.pressure_regions.push_back(catalog::parse_region(r.get<std::string>()));
        if (doc.contains("pressure_statistic"))
            m.pressure_statistic = pressuremap::parse_statistic(get_string(doc, "pressure_statistic", "manifest"));
        if (doc.contains("gait_window")) m.gait_window = gait::parse_window(get_string(doc, "gait_window", "manifest"));
        if (doc.contains("static")) {
            const json& s = doc.at("static");
            StaticInputs st;
            st.traces = base / get_string(s, "traces", "static");
            st.config.body_mass_kg = get_number(s, "body_mass_kg", "static");
            st.config.load_fraction = s.value("load_fraction", st.config.load_fraction);
            st.config.safety_factor = s.value("safety_factor", st.config.safety_factor);
            st.smoothing_factor = s.value("smoothing_factor", st.smoothing_factor);
            st.dwell_fraction = s.value("dwell_fraction", st.dwell_fraction);
            if (s.contains("literature_mpa_per_bw"))
                for (const auto& [k, v] : s.at("literature_mpa_per_bw").items())
                    st.literature_mpa_per_bw[catalog::parse_region(k)] = v.get<double>();
            st.literature_body_mass_kg = s.value("literature_body_mass_kg", 0.0);
            pressuremap::validate(st.config);
            m.static_test = std::move(st);
        }
        if (doc.contains("speed_reference")) {
            const json& s = doc.at("speed_reference");
            m.speed_reference = SpeedReference{s.value("label", std::string("reference")),
                                               get_number(s, "velocity_mps", "speed_reference"),
                                               s.value("provenance", std::string())};
        }
        if (doc.contains("provenance"))
            for (const auto& [k, v] : doc.at("provenance").items()) m.provenance[k] = v.get<std::string>();
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return m;
}

ComparisonReport compare(const Manifest& m) {
    ComparisonReport r;
    r.candidate_id = m.candidate.id;
    r.reference_id = m.reference.id;
    r.candidate_mass_kg = m.candidate.mass_kg;
    r.reference_mass_kg = m.reference.mass_kg;
    r.mass_delta_pct = gait::percent_change(m.reference.mass_kg, m.candidate.mass_kg);
    r.provenance = m.provenance;

    const auto cand_trials = load_trials(m.candidate);
    const auto ref_trials = load_trials(m.reference);
    r.candidate_gait = gait::analyze(cand_trials, m.gait_window);
    r.reference_gait = gait::analyze(ref_trials, m.gait_window);
    for (const auto j : gait::all_joints)
        r.symmetry_gain_pp[j] = r.candidate_gait.correlation_pct.at(j) - r.reference_gait.correlation_pct.at(j);
    const double cand_v = r.candidate_gait.com_peak_velocity_mps;
    const double ref_v = r.reference_gait.com_peak_velocity_mps;

    const auto cand_seq = pressuremap::load_pressure_sequence(m.candidate.pressure_frames, m.candidate.pressure_mask);
    const auto ref_seq = pressuremap::load_pressure_sequence(m.reference.pressure_frames, m.reference.pressure_mask);
    const auto cand_cycles = pressuremap::load_cycle_bounds(m.candidate.pressure_cycles);
    const auto ref_cycles = pressuremap::load_cycle_bounds(m.reference.pressure_cycles);
    for (const Region region : m.pressure_regions) {
        const auto c = pressuremap::region_mean_curve(cand_seq, region, cand_cycles, m.pressure_statistic);
        const auto f = pressuremap::region_mean_curve(ref_seq, region, ref_cycles, m.pressure_statistic);
        RegionPressure p;
        p.region = region;
        p.candidate_peak = signals::peak(c);
        p.reference_peak = signals::peak(f);
        p.candidate_mean_kpa = signals::curve_mean(c);
        p.reference_mean_kpa = signals::curve_mean(f);
        p.peak_reduction_pct = pressuremap::peak_reduction(f, c);
        p.mean_reduction_pct = pressuremap::mean_reduction(f, c);
        p.velocity_normalized_reduction_pct = pressuremap::velocity_normalized_reduction(
            p.reference_peak.value, ref_v, p.candidate_peak.value, cand_v);
        r.pressure.push_back(p);
    }

    if (m.static_test) {
        const auto& st = *m.static_test;
        r.static_target_force_n = pressuremap::static_target_force(st.config);
        const auto traces = pressuremap::load_static_traces(st.traces);
        for (const auto& res : pressuremap::analyze_static(traces, st.smoothing_factor, st.dwell_fraction)) {
            StaticRegion s;
            s.region = res.region;
            s.plateau_mpa = res.plateau_mpa;
            s.mpa_per_bw = pressuremap::bw_normalize(res.plateau_mpa, st.config.body_mass_kg, st.config.g);
            if (auto it = st.literature_mpa_per_bw.find(res.region); it != st.literature_mpa_per_bw.end()) {
                s.literature_mpa_per_bw = it->second;
                s.reduction_vs_literature_pct = pressuremap::normalized_comparison(s.mpa_per_bw, it->second);
            }
            r.static_regions.push_back(s);
        }
    }
    if (m.speed_reference) {
        r.speed_reference = m.speed_reference;
        r.speed_change_pct = gait::percent_change(m.speed_reference->velocity_mps, cand_v);
    }
    return r;
}

namespace {

json gait_json(const gait::GaitMetrics& g) {
    json rom = json::object();
    for (const auto& [key, v] : g.rom_deg)
        rom[std::string(gait::to_string(key.first))][std::string(gait::to_string(key.second))] = v;
    json corr = json::object();
    for (const auto& [j, v] : g.correlation_pct) corr[std::string(gait::to_string(j))] = v;
    json stance = json::object();
    for (const auto& [s, v] : g.stance_pct) stance[std::string(gait::to_string(s))] = v;
    return {{"rom_deg", rom},
            {"correlation_pct", corr},
            {"stance_pct", stance},
            {"stance_asymmetry_pct", g.stance_asymmetry_pct},
            {"com_peak_velocity_mps", g.com_peak_velocity_mps},
            {"trials", g.trials},
            {"cycles", {{"PS", g.cycles_ps}, {"SS", g.cycles_ss}}}};
}

}  // namespace

std::string report_to_json(const ComparisonReport& r) {
    json doc;
    doc["units"] = {{"mass", "kg"},   {"pressure_walking", "kPa"}, {"pressure_static", "MPa"},
                    {"normalized", "MPa/BW"}, {"angle", "deg"}, {"velocity", "m/s"},
                    {"force", "N"},   {"ratio", "%"}};
    doc["candidate"] = r.candidate_id;
    doc["reference"] = r.reference_id;
    doc["mass"] = {{"candidate_kg", r.candidate_mass_kg},
                   {"reference_kg", r.reference_mass_kg},
                   {"delta_pct", r.mass_delta_pct}};
    json pressure = json::array();
    for (const auto& p : r.pressure)
        pressure.push_back({{"region", catalog::to_string(p.region)},
                            {"candidate_peak_kpa", p.candidate_peak.value},
                            {"candidate_peak_pct", p.candidate_peak.percent},
                            {"reference_peak_kpa", p.reference_peak.value},
                            {"reference_peak_pct", p.reference_peak.percent},
                            {"candidate_mean_kpa", p.candidate_mean_kpa},
                            {"reference_mean_kpa", p.reference_mean_kpa},
                            {"peak_reduction_pct", p.peak_reduction_pct},
                            {"mean_reduction_pct", p.mean_reduction_pct},
                            {"velocity_normalized_reduction_pct", p.velocity_normalized_reduction_pct}});
    doc["walking_pressure"] = pressure;
    json gains = json::object();
    for (const auto& [j, v] : r.symmetry_gain_pp) gains[std::string(gait::to_string(j))] = v;
    doc["gait"] = {{"candidate", gait_json(r.candidate_gait)},
                   {"reference", gait_json(r.reference_gait)},
                   {"symmetry_gain_pp", gains}};
    if (!r.static_regions.empty()) {
        json regions = json::array();
        for (const auto& s : r.static_regions) {
            json e = {{"region", catalog::to_string(s.region)},
                      {"plateau_mpa", s.plateau_mpa},
                      {"mpa_per_bw", s.mpa_per_bw}};
            e["literature_mpa_per_bw"] = s.literature_mpa_per_bw ? json(*s.literature_mpa_per_bw) : json(nullptr);
            e["reduction_vs_literature_pct"] =
                s.reduction_vs_literature_pct ? json(*s.reduction_vs_literature_pct) : json(nullptr);
            regions.push_back(std::move(e));
        }
        doc["static_test"] = {{"target_force_n", r.static_target_force_n}, {"regions", regions}};
    }
    if (r.speed_reference)
        doc["speed"] = {{"reference_label", r.speed_reference->label},
                        {"reference_velocity_mps", r.speed_reference->velocity_mps},
                        {"candidate_velocity_mps", r.candidate_gait.com_peak_velocity_mps},
                        {"change_pct", *r.speed_change_pct},
                        {"provenance", r.speed_reference->provenance}};
    json prov = json::object();
    for (const auto& [k, v] : r.provenance) prov[k] = v;
    doc["provenance"] = prov;
    return doc.dump(2) + "\n";
}

}  // namespace socketbench::report
