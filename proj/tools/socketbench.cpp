// socketbench: batch pipelines and the live PPT session service.

#include <CLI11.hpp>
#include <json.hpp>

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <pthread.h>
#include <sstream>
#include <thread>

#include "socketbench/catalog.hpp"
#include "socketbench/delimited.hpp"
#include "socketbench/error.hpp"
#include "socketbench/gait.hpp"
#include "socketbench/ppt.hpp"
#include "socketbench/pressuremap.hpp"
#include "socketbench/report.hpp"
#include "socketbench/service.hpp"
#include "socketbench/structural.hpp"

#ifndef SOCKETBENCH_DATA_DIR
#define SOCKETBENCH_DATA_DIR "data"
#endif

namespace sb = socketbench;
using nlohmann::json;

namespace {

const std::string default_catalog = std::string(SOCKETBENCH_DATA_DIR) + "/paper_catalog.json";
const std::string default_stress_table = std::string(SOCKETBENCH_DATA_DIR) + "/fixtures/stress_tables.csv";

json sweep_json(const sb::structural::DesignSweep& sweep, std::string_view source) {
    json regions = json::array();
    for (const auto& r : sweep.regions) {
        json rows = json::array();
        for (const auto& row : r.rows)
            rows.push_back({{"thickness_mm", row.thickness_mm},
                            {"stress_mpa", row.stress_mpa},
                            {"constraint_mpa", row.constraint_mpa},
                            {"pass", row.pass}});
        regions.push_back({{"region", sb::catalog::to_string(r.region)}, {"rows", rows}, {"candidates_mm", r.candidates_mm}});
    }
    return {{"units", {{"thickness", "mm"}, {"stress", "MPa"}}},
            {"stress_source", source},
            {"regions", regions},
            {"candidates_mm", sweep.candidates_mm}};
}

struct DesignSweepOpts {
    std::string catalog = default_catalog;
    std::string mode = "table";
    std::string stress_table = default_stress_table;
    std::string model = "thick_wall";
    double tol = sb::structural::default_similarity_tol_mpa;
    bool csv = false;
};

int design_sweep(const DesignSweepOpts& o) {
    const auto cat = sb::catalog::load_catalog(o.catalog);
    sb::structural::DesignSweep sweep;
    std::string source;
    if (o.mode == "table") {
        const auto table = sb::structural::load_stress_table(o.stress_table);
        sweep = sb::structural::design_sweep_table(cat, table, o.tol);
        source = "table";
    } else if (o.mode == "analytic") {
        const auto model = sb::structural::parse_shell_model(o.model);
        sweep = sb::structural::design_sweep_analytic(cat, model, o.tol);
        source = "analytic:" + std::string(sb::structural::to_string(model));
    } else {
        throw sb::ValidationError("mode", "expected 'table' or 'analytic'");
    }
    if (o.csv) {
        std::cout << sb::structural::sweep_to_delimited(sweep);
        std::cout << "# candidates_mm=";
        for (std::size_t i = 0; i < sweep.candidates_mm.size(); ++i)
            std::cout << (i ? "," : "") << sb::format_fixed(sweep.candidates_mm[i], 2);
        std::cout << "\n";
    } else {
        std::cout << sweep_json(sweep, source).dump(2) << "\n";
    }
    return 0;
}

struct DesignCheckOpts {
    std::string catalog = default_catalog;
    std::string material;
    double stress = 0.0;
    std::optional<double> amplitude;
};

int design_check(const DesignCheckOpts& o) {
    const auto cat = sb::catalog::load_catalog(o.catalog);
    const auto& m = cat.material(o.material);
    const auto fos = sb::structural::factor_of_safety(o.stress, m.yield_strength_mpa, m.yield_strength_provenance);
    const auto life = sb::structural::fatigue_life(o.amplitude.value_or(o.stress), m.sn_curve, m.sn_curve_provenance);
    json out = {{"units", {{"stress", "MPa"}, {"life", "cycles"}}},
                {"material", m.name},
                {"stress_mpa", o.stress},
                {"yield_strength_mpa", m.yield_strength_mpa},
                {"factor_of_safety", fos.value},
                {"strength_provenance", sb::catalog::to_string(fos.strength_provenance)},
                {"stress_amplitude_mpa", o.amplitude.value_or(o.stress)},
                {"fatigue_life_cycles", life.cycles},
                {"fatigue_clamped", life.clamped},
                {"sn_curve_provenance", sb::catalog::to_string(life.curve_provenance)}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int ppt_select(const std::string& catalog_path, const std::string& matrix_path) {
    const auto cat = sb::catalog::load_catalog(catalog_path);
    const auto matrix = sb::ppt::load_matrix(matrix_path);
    std::cout << sb::ppt::serialize_selection(sb::ppt::select_materials(matrix, cat), cat);
    return 0;
}

int ppt_replay(const std::string& catalog_path, const std::string& plan_path, bool with_selection) {
    const auto plan = sb::ppt::load_session_plan(plan_path);
    const auto result = sb::ppt::replay_plan(plan);
    json sessions = json::array();
    for (const auto& o : result.sessions) {
        const auto& s = o.session;
        sessions.push_back({{"region", sb::catalog::to_string(s.region())},
                            {"material", s.specimen().material},
                            {"thickness_mm", s.specimen().thickness_mm},
                            {"screening", s.screening},
                            {"state", sb::ppt::to_string(s.state())},
                            {"pain_force_n", s.pain_force_n() ? json(*s.pain_force_n()) : json(nullptr)},
                            {"ppt_mpa", o.ppt_mpa ? json(*o.ppt_mpa) : json(nullptr)},
                            {"abort_reason", s.abort_reason().empty() ? json(nullptr) : json(s.abort_reason())},
                            {"rest_s", s.required_rest_s()}});
    }
    json out = {{"units", {{"force", "N"}, {"ppt", "MPa"}, {"time", "s"}}},
                {"sessions", sessions},
                {"matrix", json::parse(sb::ppt::serialize_matrix(result.matrix))}};
    if (with_selection) {
        const auto cat = sb::catalog::load_catalog(catalog_path);
        out["selection"] = json::parse(sb::ppt::serialize_selection(sb::ppt::select_materials(result.matrix, cat), cat));
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int gait_analyze(const std::vector<std::string>& trials, const std::vector<std::string>& events,
                 const std::string& window) {
    if (trials.size() != events.size())
        throw sb::ValidationError("events", "one --events file per --trial");
    std::vector<sb::gait::GaitTrial> loaded;
    for (std::size_t i = 0; i < trials.size(); ++i) loaded.push_back(sb::gait::load_trial(trials[i], events[i]));
    std::cout << sb::gait::metrics_to_delimited(sb::gait::analyze(loaded, sb::gait::parse_window(window)));
    return 0;
}

int pressure_analyze(const std::string& frames, const std::string& mask, const std::string& cycles,
                     const std::string& statistic) {
    const auto seq = sb::pressuremap::load_pressure_sequence(frames, mask);
    const auto bounds = sb::pressuremap::load_cycle_bounds(cycles);
    const auto stat = sb::pressuremap::parse_statistic(statistic);
    std::cout << "region,statistic,peak_kpa,peak_pct,mean_kpa\n";
    for (const auto& [region, cells] : seq.masks()) {
        const auto curve = sb::pressuremap::region_mean_curve(seq, region, bounds, stat);
        const auto pk = sb::signals::peak(curve);
        std::cout << sb::catalog::to_string(region) << ',' << sb::pressuremap::to_string(stat) << ','
                  << sb::format_fixed(pk.value, 4) << ',' << pk.percent << ','
                  << sb::format_fixed(sb::signals::curve_mean(curve), 4) << "\n";
    }
    return 0;
}

struct StaticOpts {
    std::string traces;
    double body_mass = 60.0;
    double load_fraction = 0.45;
    double safety_factor = 1.5;
    double smoothing = sb::pressuremap::default_smoothing_factor;
    double dwell = sb::pressuremap::default_dwell_fraction;
};

int static_analyze(const StaticOpts& o) {
    const sb::pressuremap::StaticTestConfig cfg{o.body_mass, o.load_fraction, o.safety_factor};
    const auto traces = sb::pressuremap::load_static_traces(o.traces);
    std::cout << "# target_force_n=" << sb::format_fixed(sb::pressuremap::static_target_force(cfg), 3) << "\n";
    std::cout << "region,plateau_mpa,mpa_per_bw,dwell_samples\n";
    for (const auto& r : sb::pressuremap::analyze_static(traces, o.smoothing, o.dwell)) {
        std::ostringstream bw;
        bw.precision(6);
        bw << std::scientific << sb::pressuremap::bw_normalize(r.plateau_mpa, cfg.body_mass_kg, cfg.g);
        std::cout << sb::catalog::to_string(r.region) << ',' << sb::format_fixed(r.plateau_mpa, 7) << ','
                  << bw.str() << ',' << r.dwell_samples << "\n";
    }
    return 0;
}

int report_compare(const std::string& manifest) {
    std::cout << sb::report::report_to_json(sb::report::compare(sb::report::load_manifest(manifest)));
    return 0;
}

struct ServeOpts {
    std::string catalog = default_catalog;
    std::string replay;
    bool live = false;
    double rate = 80.0;
    int port = 8080;
    std::string host = "127.0.0.1";
    double rest_scale = 1.0;
    bool auto_mark = false;
    double slope = 1.0;
    double intercept = 0.0;
    std::string static_dir;
};

int serve(const ServeOpts& o) {
    // Signals go to a dedicated thread; every thread started below inherits the mask.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    sb::service::ServiceConfig cfg;
    cfg.catalog = sb::catalog::load_catalog(o.catalog);
    std::unique_ptr<sb::service::LineSource> live;
    if (!o.replay.empty()) {
        cfg.replay = sb::ppt::load_session_plan(o.replay);
    } else if (o.live) {
        live = std::make_unique<sb::service::LineSource>(std::cin);
        cfg.live = live.get();
        cfg.live_calibration = {o.slope, o.intercept, 1.0};
    } else {
        throw sb::ValidationError("source", "pass --replay <plan> or --live");
    }
    cfg.rate_hz = o.rate;
    cfg.rest_scale = o.rest_scale;
    cfg.auto_mark = o.auto_mark;

    sb::service::SessionService service(std::move(cfg));
    sb::service::HttpServer server(service, o.static_dir.empty() ? std::nullopt : std::optional(o.static_dir));
    const int port = server.bind(o.host, o.port);
    std::cerr << "socketbench: listening on http://" << o.host << ":" << port << " ("
              << (o.replay.empty() ? "live" : "replay") << ")\n";

    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        server.stop();
    });
    server.listen();
    // listen() also returns on bind loss; make sure the waiter can exit
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"socketbench: socket design, PPT acquisition and gait/pressure evaluation"};
    app.require_subcommand(1);

    DesignSweepOpts sweep;
    DesignCheckOpts check;
    auto* design = app.add_subcommand("design", "structural design pipeline");
    design->require_subcommand(1);
    auto* d_sweep = design->add_subcommand("sweep", "thickness sweep and candidate range");
    d_sweep->add_option("--catalog", sweep.catalog, "catalog JSON")->check(CLI::ExistingFile);
    d_sweep->add_option("--mode", sweep.mode, "table | analytic")->check(CLI::IsMember({"table", "analytic"}));
    d_sweep->add_option("--stress-table", sweep.stress_table, "region,thickness_mm,stress_mpa")->check(CLI::ExistingFile);
    d_sweep->add_option("--model", sweep.model, "thin_shell | thick_wall (analytic mode)");
    d_sweep->add_option("--tol", sweep.tol, "similarity tolerance, MPa");
    d_sweep->add_flag("--csv", sweep.csv, "delimited output");
    auto* d_check = design->add_subcommand("check", "factor of safety and fatigue life");
    d_check->add_option("--catalog", check.catalog, "catalog JSON")->check(CLI::ExistingFile);
    d_check->add_option("--material", check.material, "material id")->required();
    d_check->add_option("--stress", check.stress, "peak stress, MPa")->required();
    d_check->add_option("--amplitude", check.amplitude, "stress amplitude for fatigue, MPa (default: --stress)");

    std::string ppt_catalog = default_catalog, matrix_path, plan_path;
    bool replay_select = false;
    auto* ppt = app.add_subcommand("ppt", "pressure-pain-threshold matrix");
    ppt->require_subcommand(1);
    auto* p_select = ppt->add_subcommand("select", "material and thickness per region");
    p_select->add_option("--catalog", ppt_catalog, "catalog JSON")->check(CLI::ExistingFile);
    p_select->add_option("--matrix", matrix_path, "PPT matrix JSON")->required()->check(CLI::ExistingFile);
    auto* p_replay = ppt->add_subcommand("replay", "replay a session plan offline");
    p_replay->add_option("--catalog", ppt_catalog, "catalog JSON")->check(CLI::ExistingFile);
    p_replay->add_option("--plan", plan_path, "session plan JSON")->required()->check(CLI::ExistingFile);
    p_replay->add_flag("--select", replay_select, "append the selection");

    std::vector<std::string> trials, events;
    std::string window = "stance";
    auto* gait = app.add_subcommand("gait", "gait kinematics");
    gait->require_subcommand(1);
    auto* g_analyze = gait->add_subcommand("analyze", "RoM, symmetry, stance and CoM metrics");
    g_analyze->add_option("--trial", trials, "trial CSV (repeatable)")->required()->check(CLI::ExistingFile);
    g_analyze->add_option("--events", events, "events CSV, one per trial")->required()->check(CLI::ExistingFile);
    g_analyze->add_option("--window", window, "stance | full_cycle");

    std::string frames, mask, cycles, statistic = "mean";
    auto* pressure = app.add_subcommand("pressure", "walking pressure maps");
    pressure->require_subcommand(1);
    auto* pr_analyze = pressure->add_subcommand("analyze", "per-region cycle curves");
    pr_analyze->add_option("--frames", frames, "long-form frames CSV")->required()->check(CLI::ExistingFile);
    pr_analyze->add_option("--mask", mask, "region mask CSV")->required()->check(CLI::ExistingFile);
    pr_analyze->add_option("--cycles", cycles, "cycle bounds CSV")->required()->check(CLI::ExistingFile);
    pr_analyze->add_option("--statistic", statistic, "mean | peak_cell");

    StaticOpts st;
    auto* stat = app.add_subcommand("static", "static compression test");
    stat->require_subcommand(1);
    auto* s_analyze = stat->add_subcommand("analyze", "plateau pressures and MPa/BW");
    s_analyze->add_option("--traces", st.traces, "sensor traces CSV")->required()->check(CLI::ExistingFile);
    s_analyze->add_option("--body-mass", st.body_mass, "kg");
    s_analyze->add_option("--load-fraction", st.load_fraction);
    s_analyze->add_option("--safety-factor", st.safety_factor);
    s_analyze->add_option("--smoothing", st.smoothing, "moving-mean smoothing factor");
    s_analyze->add_option("--dwell-fraction", st.dwell, "plateau threshold relative to the maximum");

    std::string manifest;
    auto* report = app.add_subcommand("report", "socket comparison");
    report->require_subcommand(1);
    auto* r_compare = report->add_subcommand("compare", "full comparison report");
    r_compare->add_option("--manifest", manifest, "comparison manifest JSON")->required()->check(CLI::ExistingFile);

    ServeOpts so;
    auto* srv = app.add_subcommand("serve", "live PPT session service");
    srv->add_option("--catalog", so.catalog, "catalog JSON")->check(CLI::ExistingFile);
    srv->add_option("--replay", so.replay, "session plan to replay")->check(CLI::ExistingFile);
    srv->add_flag("--live", so.live, "read `t_s,raw` lines from stdin");
    srv->add_option("--rate", so.rate, "replay rate, Hz");
    srv->add_option("--port", so.port, "TCP port (0 = ephemeral)")->envname("SOCKETBENCH_PORT");
    srv->add_option("--host", so.host, "bind address");
    srv->add_option("--rest-scale", so.rest_scale, "wall seconds per protocol rest second (0 = no wait)");
    srv->add_flag("--auto-mark", so.auto_mark, "replay: mark at the recorded pain time");
    srv->add_option("--slope", so.slope, "live calibration, N per raw unit");
    srv->add_option("--intercept", so.intercept, "live calibration, N");
    srv->add_option("--static", so.static_dir, "directory served at /")->check(CLI::ExistingDirectory);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*d_sweep) return design_sweep(sweep);
        if (*d_check) return design_check(check);
        if (*p_select) return ppt_select(ppt_catalog, matrix_path);
        if (*p_replay) return ppt_replay(ppt_catalog, plan_path, replay_select);
        if (*g_analyze) return gait_analyze(trials, events, window);
        if (*pr_analyze) return pressure_analyze(frames, mask, cycles, statistic);
        if (*s_analyze) return static_analyze(st);
        if (*r_compare) return report_compare(manifest);
        if (*srv) return serve(so);
    } catch (const sb::Error& e) {
        std::cerr << "socketbench: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
