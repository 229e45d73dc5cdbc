// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "socketbench/catalog.hpp"
#include "socketbench/error.hpp"
#include "socketbench/gait.hpp"
#include "socketbench/ppt.hpp"
#include "socketbench/pressuremap.hpp"
#include "socketbench/report.hpp"
#include "socketbench/signals.hpp"
#include "socketbench/structural.hpp"
#include "test_support.hpp"

using namespace socketbench;
using catalog::Region;
using Clock = std::chrono::steady_clock;

namespace {

class Checks {
public:
    void expect(bool ok, const std::string& what) {
        if (!ok) failures_.push_back(what);
    }
    void near(double got, double want, double tol, const std::string& what) {
        std::ostringstream os;
        os << what << ": got " << got << ", want " << want << " +/- " << tol;
        expect(std::abs(got - want) <= tol, os.str());
    }
    const std::vector<std::string>& failures() const { return failures_; }

private:
    std::vector<std::string> failures_;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

const catalog::Catalog& cat() {
    static const auto c = catalog::load_catalog(catalog_path());
    return c;
}

void selection_replay(Checks& c) {
    const auto t0 = Clock::now();
    const auto sel = ppt::select_materials(ppt::load_matrix(fixture("ppt_matrix.json")), cat());
    const double elapsed = seconds_since(t0);
    const std::map<Region, std::pair<std::string, double>> want{
        {Region::tibia, {"tpu", 4.0}}, {Region::fibula, {"carbon_fiber", 5.5}}, {Region::calf, {"kevlar", 7.5}}};
    for (const auto& [region, pick] : want) {
        const auto& got = sel.regions.at(region);
        c.expect(got.material == pick.first && got.thickness_mm == pick.second,
                 std::string(catalog::to_string(region)) + " selected " + got.material + " " +
                     std::to_string(got.thickness_mm));
    }
    c.expect(elapsed < 1.0, "selection took " + std::to_string(elapsed) + " s");
}

void thickness_range(Checks& c) {
    const auto t0 = Clock::now();
    const auto sweep = structural::design_sweep_table(cat(), structural::load_stress_table(fixture("stress_tables.csv")));
    const double elapsed = seconds_since(t0);
    std::string got;
    for (double t : sweep.candidates_mm) got += std::to_string(t) + " ";
    c.expect(sweep.candidates_mm == std::vector<double>{3.0, 4.0, 5.5, 7.5}, "candidates " + got);
    c.expect(elapsed < 1.0, "sweep took " + std::to_string(elapsed) + " s");
}

const report::ComparisonReport& comparison() {
    static const auto r = report::compare(report::load_manifest(fixture("comparison.json")));
    return r;
}

void static_test(Checks& c) {
    c.near(pressuremap::static_target_force({60, 0.45, 1.5, 9.81}), 398.0, 1.0, "target force");
    const auto& r = comparison();
    const std::map<Region, double> want{{Region::tibia, 8.5}, {Region::fibula, 15.4}, {Region::calf, 61.0}};
    c.expect(r.static_regions.size() == want.size(), "static regions");
    for (const auto& s : r.static_regions) {
        const auto name = std::string(catalog::to_string(s.region));
        if (!s.reduction_vs_literature_pct) {
            c.expect(false, name + ": no literature comparison");
            continue;
        }
        c.near(*s.reduction_vs_literature_pct, want.at(s.region), 0.1, name + " normalized comparison");
    }
}

void walking_pressure(Checks& c) {
    const auto& r = comparison();
    struct Want {
        Region region;
        double cand_kpa;
        int cand_pct;
        double ref_kpa;
        int ref_pct;
        double peak_red;
        double vel_red;
    };
    const std::vector<Want> want{{Region::tibia, 40.00, 55, 73.00, 64, 45.2, 21.5},
                                 {Region::fibula, 47.97, 63, 69.92, 68, 31.4, 1.7}};
    c.expect(r.pressure.size() == want.size(), "pressure regions");
    for (std::size_t i = 0; i < std::min(want.size(), r.pressure.size()); ++i) {
        const auto& w = want[i];
        const auto& p = r.pressure[i];
        const auto name = std::string(catalog::to_string(w.region));
        c.expect(p.region == w.region, name + " order");
        c.near(p.candidate_peak.value, w.cand_kpa, 5e-3, name + " candidate peak kPa");
        c.expect(p.candidate_peak.percent == w.cand_pct, name + " candidate peak %");
        c.near(p.reference_peak.value, w.ref_kpa, 5e-3, name + " reference peak kPa");
        c.expect(p.reference_peak.percent == w.ref_pct, name + " reference peak %");
        c.near(p.peak_reduction_pct, w.peak_red, 0.1, name + " peak reduction");
        c.near(p.velocity_normalized_reduction_pct, w.vel_red, 0.1, name + " velocity-normalized reduction");
    }
}

void kinematics(Checks& c) {
    using gait::Joint;
    using gait::Side;
    const auto& r = comparison();
    const auto& a = r.candidate_gait;
    const auto& b = r.reference_gait;
    c.near(a.correlation_pct.at(Joint::knee), 94.43, 5e-3, "candidate knee symmetry");
    c.near(b.correlation_pct.at(Joint::knee), 28.85, 5e-3, "reference knee symmetry");
    c.near(a.correlation_pct.at(Joint::ankle), 98.83, 5e-3, "candidate ankle symmetry");
    c.near(b.correlation_pct.at(Joint::ankle), 96.45, 5e-3, "reference ankle symmetry");
    const std::vector<std::tuple<Joint, Side, double, double>> rom{
        {Joint::hip, Side::ps, 34.49, 34.28},  {Joint::hip, Side::ss, 31.95, 41.73},
        {Joint::knee, Side::ps, 60.10, 74.92}, {Joint::knee, Side::ss, 63.39, 65.31},
        {Joint::ankle, Side::ps, 16.67, 23.64}, {Joint::ankle, Side::ss, 35.82, 39.16}};
    for (const auto& [j, s, va, vb] : rom) {
        const auto name = std::string(gait::to_string(j)) + "/" + std::string(gait::to_string(s));
        c.near(a.rom_deg.at({j, s}), va, 0.01, "candidate RoM " + name);
        c.near(b.rom_deg.at({j, s}), vb, 0.01, "reference RoM " + name);
    }
    c.near(a.stance_pct.at(Side::ps), 63.0, 1e-9, "prosthetic stance");
    c.near(a.stance_pct.at(Side::ss), 58.6, 1e-9, "sound stance");
    c.near(a.stance_asymmetry_pct, 7.51, 0.05, "stance asymmetry");
    // exact up to the rounding of a three-trial mean
    c.near(a.com_peak_velocity_mps, 0.97, 1e-12, "candidate CoM");
    c.near(b.com_peak_velocity_mps, 1.39, 1e-12, "reference CoM");
    c.near(r.mass_delta_pct, -22.2, 0.1, "mass delta");
}

// Compact re-run of the property suites with a fixed seed.
void property_suites(Checks& c) {
    std::mt19937_64 g(7);
    auto uni = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(g); };
    auto uint = [&](int a, int b) { return std::uniform_int_distribution<int>(a, b)(g); };

    int bad = 0;
    for (int i = 0; i < 1000; ++i) {
        const double p = uni(1e-3, 1.0), r = uni(0.01, 0.2), rmm = r * 1000;
        const double t1 = uni(0.05, 0.19 * rmm), t2 = uni(t1 * (1 + 1e-6), 0.199 * rmm);
        for (auto m : {structural::ShellModel::thin_shell, structural::ShellModel::thick_wall})
            if (!(structural::shell_stress(p, r, t2, m) < structural::shell_stress(p, r, t1, m))) ++bad;
    }
    c.expect(bad == 0, std::to_string(bad) + " shell-stress monotonicity violations");

    const std::vector<std::string> mats{"tpu", "tough_pla", "kevlar", "carbon_fiber"};
    const std::vector<double> ts{3.0, 4.0, 5.5, 7.5};
    bad = 0;
    for (int i = 0; i < 300; ++i) {
        ppt::PPTMatrix a, b;
        for (Region reg : ppt::selection_regions) {
            const double scale = std::ldexp(1.0, uint(-6, 6));
            for (int k = uint(1, 8); k > 0; --k) {
                const ppt::MatrixKey key{reg, mats[uint(0, 3)], ts[uint(0, 3)]};
                const double v = uint(0, 2) == 0 ? 0.05 * uint(1, 4) : uni(0.01, 0.5);
                a.record(key, v);
                b.record(key, v * scale);
            }
        }
        const auto sa = ppt::select_materials(a, cat()), sb = ppt::select_materials(b, cat());
        for (Region reg : ppt::selection_regions)
            if (sa.regions.at(reg).material != sb.regions.at(reg).material ||
                sa.regions.at(reg).thickness_mm != sb.regions.at(reg).thickness_mm)
                ++bad;
    }
    c.expect(bad == 0, std::to_string(bad) + " selections changed under row scaling");

    bad = 0;
    for (int i = 0; i < 500; ++i) {
        signals::CycleCurve x, y;
        for (std::size_t k = 0; k < signals::cycle_points; ++k) {
            x[k] = std::sin(0.07 * k) + uni(-0.3, 0.3);
            y[k] = std::cos(0.05 * k) + uni(-0.3, 0.3);
        }
        auto x2 = x, y2 = y;
        const double ka = uni(0.01, 100), ca = uni(-100, 100), kb = uni(0.01, 100), cb = uni(-100, 100);
        for (auto& v : x2.values) v = ka * v + ca;
        for (auto& v : y2.values) v = kb * v + cb;
        const signals::PercentWindow w{uint(0, 40), uint(60, 100)};
        if (std::abs(signals::pearson(x, y, w) - signals::pearson(x2, y2, w)) > 1e-9) ++bad;
    }
    c.expect(bad == 0, std::to_string(bad) + " pearson affine violations");

    bad = 0;
    for (int seq = 0; seq < 10000; ++seq) {
        ppt::PPTSession s(Region::tibia, {"tpu", 4.0});
        bool rested = false, ramped_after_rest = false;
        double t = 0;
        for (int i = uint(1, 40); i > 0; --i) {
            ppt::SessionEvent e;
            switch (uint(0, 6)) {
                case 0: e = ppt::event::StartRest{uni(0, 900)}; break;
                case 1: e = ppt::event::RestElapsed{uni(0, 1000)}; break;
                case 2: e = ppt::event::StartRamp{uint(0, 1) == 1}; break;
                case 3:
                case 4: e = ppt::event::Sample{t += uni(-0.05, 0.1), uni(0, 220)}; break;
                case 5: e = ppt::event::MarkPain{}; break;
                default: e = ppt::event::Abort{"fuzz"}; break;
            }
            try {
                s.apply(e);
            } catch (const Error&) {
            }
            if (s.state() == ppt::SessionState::resting) rested = true;
            if (s.state() == ppt::SessionState::ramping && rested) ramped_after_rest = true;
            if (s.state() == ppt::SessionState::marked && !ramped_after_rest) ++bad;
        }
    }
    c.expect(bad == 0, std::to_string(bad) + " illegal marked states");

    std::vector<ppt::CalibrationPair> pairs;
    for (int k = 0; k < 100; ++k) {
        const double x = uni(0, 4);
        pairs.push_back({x, 104.44 * x + 3.0086});
    }
    const auto fit = ppt::calibrate(pairs);
    c.expect(std::abs(fit.slope - 104.44) / 104.44 < 1e-9, "calibration slope " + std::to_string(fit.slope));
    c.expect(std::abs(fit.intercept - 3.0086) / 3.0086 < 1e-9, "calibration intercept " + std::to_string(fit.intercept));
}

// Every batch pipeline from the core library alone.
void batch_without_secondary(Checks& c) {
    const auto sweep = structural::design_sweep_table(cat(), structural::load_stress_table(fixture("stress_tables.csv")));
    c.expect(!sweep.candidates_mm.empty(), "design sweep");
    const auto replay = ppt::replay_plan(ppt::load_session_plan(fixture("ppt/plan.json")));
    const auto sel = ppt::select_materials(replay.matrix, cat());
    c.expect(sel.regions.size() == 3, "replayed selection");
    const auto& r = comparison();
    c.expect(!report::report_to_json(r).empty(), "comparison report");
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Checks&)>>> criteria{
        {"selection replay", selection_replay},
        {"thickness range", thickness_range},
        {"static test", static_test},
        {"walking pressure", walking_pressure},
        {"kinematics", kinematics},
        {"property suites", property_suites},
        {"batch suite without secondary component", batch_without_secondary},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Checks c;
        try {
            run(c);
        } catch (const std::exception& e) {
            c.expect(false, std::string("exception: ") + e.what());
        }
        const bool ok = c.failures().empty();
        failed += ok ? 0 : 1;
        std::cout << (ok ? "PASS " : "FAIL ") << name;
        for (const auto& f : c.failures()) std::cout << " | " << f;
        std::cout << "\n";
    }
    return failed == 0 ? 0 : 1;
}
