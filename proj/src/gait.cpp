#include "socketbench/gait.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>

#include "socketbench/delimited.hpp"
#include "socketbench/error.hpp"

namespace socketbench::gait {

using signals::CycleCurve;
using signals::PercentWindow;
using signals::Series;

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace

std::string_view to_string(Joint j) {
    switch (j) {
        case Joint::hip: return "hip";
        case Joint::knee: return "knee";
        case Joint::ankle: return "ankle";
    }
    return "?";
}

std::string_view to_string(Side s) { return s == Side::ps ? "PS" : "SS"; }

std::string_view to_string(EventType e) { return e == EventType::heel_strike ? "heel_strike" : "toe_off"; }

std::string_view to_string(Window w) { return w == Window::stance ? "stance" : "full_cycle"; }

Joint parse_joint(std::string_view s) {
    const auto l = lower(s);
    if (l == "hip") return Joint::hip;
    if (l == "knee") return Joint::knee;
    if (l == "ankle") return Joint::ankle;
    throw ParseError("unknown joint '" + std::string(s) + "'");
}

Side parse_side(std::string_view s) {
    const auto l = lower(s);
    if (l == "ps") return Side::ps;
    if (l == "ss") return Side::ss;
    throw ParseError("unknown side '" + std::string(s) + "'");
}

EventType parse_event_type(std::string_view s) {
    const auto l = lower(s);
    if (l == "heel_strike" || l == "hs") return EventType::heel_strike;
    if (l == "toe_off" || l == "to") return EventType::toe_off;
    throw ParseError("unknown event type '" + std::string(s) + "'");
}

Window parse_window(std::string_view s) {
    const auto l = lower(s);
    if (l == "stance") return Window::stance;
    if (l == "full_cycle" || l == "full") return Window::full_cycle;
    throw ParseError("unknown window '" + std::string(s) + "'");
}

const Series& GaitTrial::joint(Joint j, Side s) const {
    auto it = joints.find({j, s});
    if (it == joints.end())
        throw ValidationError(name + "." + std::string(to_string(j)) + "_" + lower(to_string(s)),
                              "joint series missing");
    return it->second;
}

void validate_trial(const GaitTrial& trial) {
    for (std::size_t i = 1; i < trial.events.size(); ++i)
        if (trial.events[i].t_s < trial.events[i - 1].t_s)
            throw ValidationError(trial.name + ".events", "events are not time-ordered");
    for (const Side side : all_sides) {
        EventType expected = EventType::heel_strike;
        for (const auto& e : trial.events) {
            if (e.side != side) continue;
            if (e.type != expected)
                throw ValidationError(trial.name + ".events", std::string(to_string(side)) + " " +
                                                                   std::string(to_string(e.type)) + " at " +
                                                                   format_fixed(e.t_s, 3) + " s breaks alternation");
            expected = expected == EventType::heel_strike ? EventType::toe_off : EventType::heel_strike;
        }
    }
    const std::vector<double>* base = nullptr;
    for (const auto& [key, series] : trial.joints) {
        if (!base) {
            base = &series.t();
        } else if (series.t() != *base) {
            throw ValidationError(trial.name + ".joints", "joint series do not share a time base");
        }
    }
    if (!(trial.sampling_rate_hz > 0)) throw ValidationError(trial.name + ".sampling_rate_hz", "must be > 0");
}

namespace {

struct ColumnSpec {
    std::string_view name;
    Joint joint;
    Side side;
};

constexpr ColumnSpec joint_columns[] = {
    {"hip_ps_deg", Joint::hip, Side::ps},   {"knee_ps_deg", Joint::knee, Side::ps},
    {"ankle_ps_deg", Joint::ankle, Side::ps}, {"hip_ss_deg", Joint::hip, Side::ss},
    {"knee_ss_deg", Joint::knee, Side::ss}, {"ankle_ss_deg", Joint::ankle, Side::ss},
};

GaitTrial build_trial(const DelimitedTable& samples, const DelimitedTable& events, std::string name) {
    GaitTrial trial;
    trial.name = std::move(name);
    const auto c_t = samples.column("t_s");
    std::vector<double> t;
    t.reserve(samples.rows.size());
    for (std::size_t r = 0; r < samples.rows.size(); ++r) t.push_back(samples.number(r, c_t));
    if (t.size() < 2) throw ParseError(samples.source + ": need at least two samples");

    auto column_values = [&](std::size_t c) {
        std::vector<double> v;
        v.reserve(samples.rows.size());
        for (std::size_t r = 0; r < samples.rows.size(); ++r) v.push_back(samples.number(r, c));
        return v;
    };
    try {
        for (const auto& spec : joint_columns)
            trial.joints.emplace(std::pair{spec.joint, spec.side}, Series(t, column_values(samples.column(spec.name))));
        trial.pelvis_velocity = Series(t, column_values(samples.column("pelvis_vx_mps")));
    } catch (const DomainError& e) {
        throw ParseError(samples.source + ": " + e.what());
    }
    trial.sampling_rate_hz = samples.has_directive("rate_hz")
                                 ? std::stod(samples.directive("rate_hz"))
                                 : static_cast<double>(t.size() - 1) / (t.back() - t.front());

    const auto e_t = events.column("t_s");
    const auto e_type = events.column("type");
    const auto e_side = events.column("side");
    for (std::size_t r = 0; r < events.rows.size(); ++r) {
        try {
            trial.events.push_back(
                {events.number(r, e_t), parse_event_type(events.cell(r, e_type)), parse_side(events.cell(r, e_side))});
        } catch (const ParseError& e) {
            if (std::string_view(e.what()).starts_with(events.source)) throw;
            throw ParseError(events.source + ":" + std::to_string(events.line_numbers[r]) + ": " + e.what());
        }
    }
    validate_trial(trial);
    return trial;
}

}  // namespace

GaitTrial parse_trial(std::string_view trial_text, std::string_view events_text, std::string name) {
    return build_trial(parse_delimited(trial_text, name), parse_delimited(events_text, name + " events"), name);
}

GaitTrial load_trial(const std::filesystem::path& trial_path, const std::filesystem::path& events_path) {
    return build_trial(load_delimited(trial_path), load_delimited(events_path), trial_path.stem().string());
}

std::vector<Cycle> segment_cycles(const GaitTrial& trial, Side side) {
    std::vector<double> strikes, toe_offs;
    for (const auto& e : trial.events) {
        if (e.side != side) continue;
        (e.type == EventType::heel_strike ? strikes : toe_offs).push_back(e.t_s);
    }
    std::sort(strikes.begin(), strikes.end());
    if (strikes.size() < 2)
        throw ModelError(trial.name + ": " + std::string(to_string(side)) + " needs at least two heel strikes");
    std::vector<Cycle> cycles;
    for (std::size_t i = 0; i + 1 < strikes.size(); ++i) {
        const double a = strikes[i];
        const double b = strikes[i + 1];
        const auto inside = std::count_if(toe_offs.begin(), toe_offs.end(), [&](double t) { return t > a && t < b; });
        if (inside != 1)
            throw ModelError(trial.name + ": " + std::string(to_string(side)) + " cycle " + format_fixed(a, 3) + "-" +
                             format_fixed(b, 3) + " s has " + std::to_string(inside) + " toe-offs, expected 1");
        const double to = *std::find_if(toe_offs.begin(), toe_offs.end(), [&](double t) { return t > a && t < b; });
        cycles.push_back({a, to, b});
    }
    return cycles;
}

double stance_percent(std::span<const Cycle> cycles) {
    if (cycles.empty()) throw DomainError("stance_percent: no cycles");
    double sum = 0.0;
    for (const auto& c : cycles) sum += c.stance_pct();
    return sum / static_cast<double>(cycles.size());
}

double stance_asymmetry(double ps_pct, double ss_pct) {
    if (!(ps_pct > 0 && ps_pct < 100 && ss_pct > 0 && ss_pct < 100))
        throw DomainError("stance_asymmetry: percentages must lie in (0, 100)");
    return 100.0 * (ps_pct - ss_pct) / ss_pct;
}

CycleCurve mean_cycle_curve(std::span<const GaitTrial> trials, Joint joint, Side side) {
    std::vector<CycleCurve> curves;
    for (const auto& trial : trials) {
        const Series& s = trial.joint(joint, side);
        for (const auto& c : segment_cycles(trial, side)) {
            auto curve = signals::resample_cycle(s, c.start_s, c.end_s);
            curve.unit = "deg";
            curves.push_back(std::move(curve));
        }
    }
    if (curves.empty()) throw DomainError("mean_cycle_curve: no trials");
    return signals::mean_curve(curves);
}

double pooled_stance_percent(std::span<const GaitTrial> trials, Side side) {
    std::vector<Cycle> all;
    for (const auto& trial : trials) {
        auto c = segment_cycles(trial, side);
        all.insert(all.end(), c.begin(), c.end());
    }
    return stance_percent(all);
}

PercentWindow side_window(std::span<const GaitTrial> trials, Side side, Window window) {
    if (window == Window::full_cycle) return PercentWindow::full();
    // The small epsilon keeps an exact 63.0 from landing on 62 after summation noise.
    const int last = static_cast<int>(std::floor(pooled_stance_percent(trials, side) + 1e-9));
    return {0, std::clamp(last, 1, 100)};
}

PercentWindow shared_window(std::span<const GaitTrial> trials, Window window) {
    const auto ps = side_window(trials, Side::ps, window);
    const auto ss = side_window(trials, Side::ss, window);
    return {0, std::min(ps.last, ss.last)};
}

double rom(std::span<const GaitTrial> trials, Joint joint, Side side, Window window) {
    const auto curve = mean_cycle_curve(trials, joint, side);
    const auto w = side_window(trials, side, window);
    const auto first = curve.values.begin() + w.first;
    const auto last = curve.values.begin() + w.last + 1;
    const auto [lo, hi] = std::minmax_element(first, last);
    return *hi - *lo;
}

double rom(const GaitTrial& trial, Joint joint, Side side, Window window) {
    return rom(std::span(&trial, 1), joint, side, window);
}

double joint_symmetry(std::span<const GaitTrial> trials, Joint joint, Window window) {
    const auto ps = mean_cycle_curve(trials, joint, Side::ps);
    const auto ss = mean_cycle_curve(trials, joint, Side::ss);
    return 100.0 * signals::pearson(ps, ss, shared_window(trials, window));
}

double joint_symmetry(const GaitTrial& trial, Joint joint, Window window) {
    return joint_symmetry(std::span(&trial, 1), joint, window);
}

double com_velocity_metric(std::span<const GaitTrial> trials) {
    if (trials.empty()) throw DomainError("com_velocity_metric: no trials");
    double sum = 0.0;
    for (const auto& trial : trials) {
        const auto& v = trial.pelvis_velocity.v();
        if (v.empty()) throw DomainError(trial.name + ": empty pelvis velocity series");
        sum += *std::max_element(v.begin(), v.end());
    }
    return sum / static_cast<double>(trials.size());
}

double percent_change(double reference, double value) {
    if (reference == 0.0) throw DomainError("percent_change: zero reference");
    return 100.0 * (value - reference) / reference;
}

GaitMetrics analyze(std::span<const GaitTrial> trials, Window window) {
    if (trials.empty()) throw DomainError("analyze: no trials");
    GaitMetrics m;
    m.trials = static_cast<int>(trials.size());
    for (const auto& t : trials) {
        m.cycles_ps += static_cast<int>(segment_cycles(t, Side::ps).size());
        m.cycles_ss += static_cast<int>(segment_cycles(t, Side::ss).size());
    }
    for (const Joint j : all_joints) {
        for (const Side s : all_sides) m.rom_deg[{j, s}] = rom(trials, j, s, window);
        m.correlation_pct[j] = joint_symmetry(trials, j, window);
    }
    for (const Side s : all_sides) m.stance_pct[s] = pooled_stance_percent(trials, s);
    m.stance_asymmetry_pct = stance_asymmetry(m.stance_pct[Side::ps], m.stance_pct[Side::ss]);
    m.com_peak_velocity_mps = com_velocity_metric(trials);
    return m;
}

std::string metrics_to_delimited(const GaitMetrics& m) {
    std::ostringstream out;
    out << "metric,joint,side,value,unit\n";
    for (const auto& [key, v] : m.rom_deg)
        out << "rom," << to_string(key.first) << ',' << to_string(key.second) << ',' << format_fixed(v, 4) << ",deg\n";
    for (const auto& [j, v] : m.correlation_pct)
        out << "correlation," << to_string(j) << ",," << format_fixed(v, 4) << ",%\n";
    for (const auto& [s, v] : m.stance_pct) out << "stance,," << to_string(s) << ',' << format_fixed(v, 4) << ",%\n";
    out << "stance_asymmetry,,," << format_fixed(m.stance_asymmetry_pct, 4) << ",%\n";
    out << "com_peak_velocity,,," << format_fixed(m.com_peak_velocity_mps, 4) << ",m/s\n";
    return out.str();
}

}  // namespace socketbench::gait
