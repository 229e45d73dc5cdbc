#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "gait_builder.hpp"
#include "socketbench/catalog.hpp"
#include "socketbench/error.hpp"
#include "socketbench/gait.hpp"
#include "socketbench/ppt.hpp"
#include "socketbench/pressuremap.hpp"
#include "socketbench/signals.hpp"
#include "socketbench/structural.hpp"
#include "test_support.hpp"

using namespace socketbench;
using catalog::Region;

namespace {

std::mt19937_64& rng() {
    static std::mt19937_64 g(20240917);
    return g;
}

double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng()); }
int uniform_int(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng()); }

signals::CycleCurve random_curve() {
    signals::CycleCurve c;
    const double f1 = uniform(0.02, 0.2), f2 = uniform(0.2, 0.6), a = uniform(-5, 5);
    for (std::size_t k = 0; k < signals::cycle_points; ++k)
        c[k] = a + std::sin(f1 * k) + 0.5 * std::cos(f2 * k) + uniform(-0.3, 0.3);
    return c;
}

}  // namespace

TEST_CASE("shell stress decreases with thickness (1000 cases per model)") {
    for (int i = 0; i < 1000; ++i) {
        const double p = uniform(1e-3, 1.0);
        const double r = uniform(0.01, 0.2);
        const double rmm = r * 1000;
        // thin shell needs t/r < 0.2
        const double t1 = uniform(0.05, 0.19 * rmm);
        const double t2 = uniform(t1 * (1 + 1e-6), 0.199 * rmm);
        CAPTURE(p);
        CAPTURE(r);
        CAPTURE(t1);
        CAPTURE(t2);
        const double thin1 = structural::shell_stress(p, r, t1, structural::ShellModel::thin_shell);
        const double thin2 = structural::shell_stress(p, r, t2, structural::ShellModel::thin_shell);
        const double thick1 = structural::shell_stress(p, r, t1, structural::ShellModel::thick_wall);
        const double thick2 = structural::shell_stress(p, r, t2, structural::ShellModel::thick_wall);
        REQUIRE(thin2 < thin1);
        REQUIRE(thick2 < thick1);
        REQUIRE(thick1 >= thin1);
        const double t3 = uniform(t2 * (1 + 1e-6), 50 * rmm);
        REQUIRE(structural::shell_stress(p, r, t3, structural::ShellModel::thick_wall) < thick2);
    }
}

TEST_CASE("thick and thin shell agree for thin walls") {
    double prev = 1e9;
    for (double ratio : {0.1, 0.01, 0.001, 0.0001}) {
        const double r = 0.05, t = ratio * r * 1000;
        const double q = structural::shell_stress(0.1, r, t, structural::ShellModel::thick_wall) /
                         structural::shell_stress(0.1, r, t, structural::ShellModel::thin_shell);
        CHECK(q >= 1.0);
        CHECK(q - 1.0 < prev);
        prev = q - 1.0;
    }
    CHECK(prev < 1e-3);
}

TEST_CASE("merged range only holds passing thicknesses or adjacent midpoints") {
    for (int i = 0; i < 500; ++i) {
        const int n = uniform_int(1, 8);
        const double constraint = 0.3;
        std::vector<structural::SweepRow> rows;
        double t = uniform(1, 3);
        for (int k = 0; k < n; ++k) {
            const double s = uniform(0.1, 0.4);
            rows.push_back({t, s, constraint, s < constraint});
            t += uniform(0.5, 2);
        }
        const double tol = uniform(0.001, 0.1);
        const auto out = structural::merge_thickness_range(rows, tol);
        std::set<double> allowed;
        for (std::size_t k = 0; k < rows.size(); ++k) {
            if (rows[k].pass) allowed.insert(rows[k].thickness_mm);
            if (k + 1 < rows.size() && rows[k].pass && rows[k + 1].pass)
                allowed.insert((rows[k].thickness_mm + rows[k + 1].thickness_mm) / 2);
        }
        REQUIRE(std::is_sorted(out.begin(), out.end()));
        REQUIRE(std::adjacent_find(out.begin(), out.end()) == out.end());
        for (double x : out) {
            REQUIRE(allowed.count(x) == 1);
            for (const auto& r : rows)
                if (r.thickness_mm == x) REQUIRE(r.pass);
        }
    }
}

TEST_CASE("fatigue life is non-increasing in stress") {
    const auto cat = catalog::load_catalog(catalog_path());
    for (const auto& m : cat.materials) {
        double prev = std::numeric_limits<double>::infinity();
        for (double s = 0.5; s < 2 * m.sn_curve.front().stress_amplitude_mpa; s *= 1.03) {
            const double n = structural::fatigue_life(s, m.sn_curve).cycles;
            CHECK(n <= prev);
            prev = n;
        }
    }
}

TEST_CASE("selection is invariant under positive row scaling") {
    const auto cat = catalog::load_catalog(catalog_path());
    const std::vector<std::string> mats{"tpu", "tough_pla", "kevlar", "carbon_fiber"};
    const std::vector<double> ts{3.0, 4.0, 5.5, 7.5};
    for (int i = 0; i < 300; ++i) {
        ppt::PPTMatrix a;
        std::map<Region, std::vector<std::pair<ppt::MatrixKey, double>>> rows;
        for (Region reg : ppt::selection_regions) {
            const int n = uniform_int(1, 8);
            for (int k = 0; k < n; ++k) {
                ppt::MatrixKey key{reg, mats[uniform_int(0, 3)], ts[uniform_int(0, 3)]};
                // a third of the values come from a coarse grid so ties occur
                const double v = uniform_int(0, 2) == 0 ? 0.05 * uniform_int(1, 4) : uniform(0.01, 0.5);
                rows[reg].push_back({key, v});
            }
        }
        ppt::PPTMatrix b;
        for (const auto& [reg, entries] : rows) {
            const double scale = std::ldexp(1.0, uniform_int(-6, 6));  // exact in binary
            for (const auto& [key, v] : entries) {
                a.record(key, v);
                b.record(key, v * scale);
            }
        }
        const auto sa = ppt::select_materials(a, cat);
        const auto sb = ppt::select_materials(b, cat);
        for (Region reg : ppt::selection_regions) {
            REQUIRE(sa.regions.at(reg).material == sb.regions.at(reg).material);
            REQUIRE(sa.regions.at(reg).thickness_mm == sb.regions.at(reg).thickness_mm);
            // the selected value is the row maximum
            double best = 0;
            for (const auto& [key, v] : a.entries())
                if (key.region == reg) best = std::max(best, v);
            REQUIRE(sa.regions.at(reg).ppt_mpa == best);
        }
    }
}

TEST_CASE("pearson is invariant under positive affine maps") {
    for (int i = 0; i < 500; ++i) {
        const auto a = random_curve();
        const auto b = random_curve();
        auto a2 = a;
        auto b2 = b;
        const double ka = uniform(0.01, 100), ca = uniform(-100, 100);
        const double kb = uniform(0.01, 100), cb = uniform(-100, 100);
        for (auto& v : a2.values) v = ka * v + ca;
        for (auto& v : b2.values) v = kb * v + cb;
        const signals::PercentWindow w{uniform_int(0, 40), uniform_int(60, 100)};
        const double r = signals::pearson(a, b, w);
        REQUIRE(r >= -1.0 - 1e-12);
        REQUIRE(r <= 1.0 + 1e-12);
        REQUIRE(signals::pearson(a2, b2, w) == doctest::Approx(r).epsilon(1e-9));
        auto neg = b;
        for (auto& v : neg.values) v = -v;
        REQUIRE(signals::pearson(a, neg, w) == doctest::Approx(-r).epsilon(1e-9));
    }
}

TEST_CASE("state machine fuzz: 10^4 random event sequences") {
    int reached_marked = 0;
    for (int seq = 0; seq < 10000; ++seq) {
        ppt::PPTSession s(Region::tibia, {"tpu", 4.0}, {uniform(0.5, 2), uniform(-1, 1), 1.0}, 200.0);
        bool seen_resting = false, seen_ramping_after_rest = false;
        double t = 0;
        const int len = uniform_int(1, 40);
        for (int i = 0; i < len; ++i) {
            ppt::SessionEvent e;
            switch (uniform_int(0, 7)) {
                case 0: e = ppt::event::StartRest{uniform(0, 900)}; break;
                case 1: e = ppt::event::RestElapsed{uniform(0, 1000)}; break;
                case 2: e = ppt::event::StartRamp{uniform_int(0, 1) == 1}; break;
                case 3:
                case 4:
                case 5:
                    t += uniform_int(0, 9) == 0 ? -0.5 : uniform(0.001, 0.1);
                    e = ppt::event::Sample{t, uniform(0, 220)};
                    break;
                case 6: e = ppt::event::MarkPain{}; break;
                default: e = ppt::event::Abort{"fuzz"}; break;
            }
            const auto before = s;
            try {
                s.apply(e);
            } catch (const StateError&) {
                REQUIRE(s.state() == before.state());
                REQUIRE(s.samples().size() == before.samples().size());
            } catch (const DomainError&) {
                REQUIRE(s.state() == before.state());
                REQUIRE(s.samples().size() == before.samples().size());
            }
            if (s.state() == ppt::SessionState::resting) seen_resting = true;
            if (s.state() == ppt::SessionState::ramping && seen_resting) seen_ramping_after_rest = true;

            REQUIRE(s.pain_mark().has_value() == (s.state() == ppt::SessionState::marked));
            if (s.state() == ppt::SessionState::marked) REQUIRE(seen_ramping_after_rest);
            if (s.state() == ppt::SessionState::ramping) REQUIRE(seen_resting);
            for (std::size_t k = 0; k < s.samples().size(); ++k) {
                REQUIRE(s.samples()[k].force_n <= s.max_force_limit_n());
                if (k) REQUIRE(s.samples()[k].t_s > s.samples()[k - 1].t_s);
            }
        }
        if (s.state() == ppt::SessionState::marked) ++reached_marked;
    }
    CHECK(reached_marked > 0);
}

TEST_CASE("calibration recovers the static-test line") {
    for (int i = 0; i < 50; ++i) {
        const int n = uniform_int(2, 200);
        std::vector<ppt::CalibrationPair> pairs;
        for (int k = 0; k < n; ++k) {
            const double x = uniform(0, 4);
            pairs.push_back({x, 104.44 * x + 3.0086});
        }
        const auto c = ppt::calibrate(pairs);
        REQUIRE(std::abs(c.slope - 104.44) / 104.44 < 1e-9);
        REQUIRE(std::abs(c.intercept - 3.0086) / 3.0086 < 1e-9);
        REQUIRE(c.r_squared >= 0);
        REQUIRE(c.r_squared <= 1 + 1e-12);
    }
}

TEST_CASE("ppt value times area is the pain force") {
    for (int i = 0; i < 200; ++i) {
        ppt::PPTSession s(Region::fibula, {"kevlar", 5.5});
        s.apply(ppt::event::StartRest{0});
        s.apply(ppt::event::StartRamp{});
        const double f = uniform(0.1, 199);
        s.apply(ppt::event::Sample{1.0, f});
        s.apply(ppt::event::MarkPain{});
        const double area = uniform(1, 500);
        REQUIRE(ppt::ppt_value(s, area) * area == doctest::Approx(f).epsilon(1e-14));
    }
}

TEST_CASE("peak shifts with an additive offset") {
    for (int i = 0; i < 200; ++i) {
        const auto c = random_curve();
        auto d = c;
        const double off = uniform(-50, 50);
        for (auto& v : d.values) v += off;
        REQUIRE(signals::peak(d).percent == signals::peak(c).percent);
        REQUIRE(signals::peak(d).value == doctest::Approx(signals::peak(c).value + off));
    }
}

TEST_CASE("pressure reduction identities") {
    for (int i = 0; i < 200; ++i) {
        const double rp = uniform(10, 100), cp = uniform(10, 100), v = uniform(0.3, 2);
        signals::CycleCurve ref, cand;
        for (std::size_t k = 0; k < signals::cycle_points; ++k) {
            ref[k] = k == 40 ? rp : 1.0;
            cand[k] = k == 60 ? cp : 1.0;
        }
        REQUIRE(pressuremap::velocity_normalized_reduction(rp, v, cp, v) ==
                doctest::Approx(pressuremap::peak_reduction(ref, cand)));
        const double m = uniform(20, 150), p = uniform(0, 0.1);
        REQUIRE(pressuremap::bw_normalize(p, m) * m * pressuremap::standard_gravity == doctest::Approx(p));
    }
}

TEST_CASE("moving mean is the identity on constants") {
    for (int i = 0; i < 100; ++i) {
        const int n = uniform_int(1, 300);
        const double c = uniform(-10, 10);
        std::vector<double> t(n), v(n, c);
        for (int k = 0; k < n; ++k) t[k] = k * 0.01;
        const auto out = signals::moving_mean(signals::Series(t, v), uniform(0.01, 1.0));
        for (double x : out.v()) REQUIRE(x == doctest::Approx(c));
    }
}

TEST_CASE("gait metric invariants") {
    using namespace socketbench::gait;
    SUBCASE("rom is unchanged by an affine time warp") {
        const auto base = build_trial({});
        for (int i = 0; i < 20; ++i) {
            const double a = uniform(0.5, 2.0), b = uniform(-1, 5);
            GaitTrial w = base;
            auto warp = [&](const signals::Series& s) {
                std::vector<double> t = s.t();
                for (auto& x : t) x = a * x + b;
                return signals::Series(t, s.v());
            };
            for (auto& [key, series] : w.joints) series = warp(series);
            w.pelvis_velocity = warp(w.pelvis_velocity);
            for (auto& e : w.events) e.t_s = a * e.t_s + b;
            for (Joint j : all_joints)
                for (Side s : all_sides)
                    for (Window win : {Window::stance, Window::full_cycle}) {
                        const double r0 = rom(base, j, s, win);
                        REQUIRE(r0 >= 0);
                        REQUIRE(rom(w, j, s, win) == doctest::Approx(r0).epsilon(1e-9));
                    }
        }
    }
    SUBCASE("symmetry ignores a constant offset on either side") {
        for (int i = 0; i < 20; ++i) {
            const double off = uniform(-40, 40);
            TrialSpec s;
            const auto ss = s.ss;
            const auto t0 = build_trial(s);
            s.ss = [ss, off](double t) { return ss(t) + off; };
            const auto t1 = build_trial(s);
            for (Joint j : all_joints)
                REQUIRE(joint_symmetry(t1, j, Window::stance) ==
                        doctest::Approx(joint_symmetry(t0, j, Window::stance)).epsilon(1e-6));
        }
    }
    SUBCASE("swapping sides flips the stance asymmetry") {
        for (int i = 0; i < 200; ++i) {
            const double ps = uniform(40, 80), ss = uniform(40, 80);
            const double fwd = stance_asymmetry(ps, ss), back = stance_asymmetry(ss, ps);
            // with the reference in the denominator the swap is a sign flip scaled by ss/ps
            REQUIRE(back == doctest::Approx(-fwd * ss / ps));
            REQUIRE((fwd > 0) == (back < 0));
        }
    }
}
