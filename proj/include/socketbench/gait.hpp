#pragma once

// Kinematic metrics over labelled walking trials. Events arrive pre-labelled;
// nothing here detects heel strike or toe-off from raw signals.

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "socketbench/signals.hpp"

namespace socketbench::gait {

enum class Joint { hip, knee, ankle };
enum class Side { ps, ss };  // prosthetic side, sound side
enum class EventType { heel_strike, toe_off };
enum class Window { stance, full_cycle };

inline constexpr Joint all_joints[] = {Joint::hip, Joint::knee, Joint::ankle};
inline constexpr Side all_sides[] = {Side::ps, Side::ss};

std::string_view to_string(Joint j);
std::string_view to_string(Side s);  // "PS" / "SS"
std::string_view to_string(EventType e);
std::string_view to_string(Window w);
Joint parse_joint(std::string_view s);
Side parse_side(std::string_view s);
EventType parse_event_type(std::string_view s);
Window parse_window(std::string_view s);

struct GaitEvent {
    double t_s = 0.0;
    EventType type = EventType::heel_strike;
    Side side = Side::ps;
};

struct GaitTrial {
    std::string name;
    double sampling_rate_hz = 100.0;
    std::map<std::pair<Joint, Side>, signals::Series> joints;  // degrees
    std::vector<GaitEvent> events;
    signals::Series pelvis_velocity;  // forward, m/s

    const signals::Series& joint(Joint j, Side s) const;  // ValidationError when absent
};

// Events time-ordered; per side heel strike and toe-off alternate, starting
// with a heel strike. Joint series share one time base. ValidationError otherwise.
void validate_trial(const GaitTrial& trial);

// Trial columns: t_s,hip_ps_deg,knee_ps_deg,ankle_ps_deg,hip_ss_deg,knee_ss_deg,ankle_ss_deg,pelvis_vx_mps
// Events columns: t_s,type,side
GaitTrial parse_trial(std::string_view trial_text, std::string_view events_text, std::string name = "trial");
GaitTrial load_trial(const std::filesystem::path& trial_path, const std::filesystem::path& events_path);

struct Cycle {
    double start_s = 0.0;
    double toe_off_s = 0.0;
    double end_s = 0.0;

    double stance_pct() const { return 100.0 * (toe_off_s - start_s) / (end_s - start_s); }
};

// Consecutive heel strikes bound each cycle, with the single toe-off strictly
// inside attached. ModelError with fewer than two heel strikes or when a cycle
// has zero or several toe-offs.
std::vector<Cycle> segment_cycles(const GaitTrial& trial, Side side);

// Mean stance percent over cycles. DomainError on an empty list.
double stance_percent(std::span<const Cycle> cycles);

// 100 (ps - ss) / ss. Positive means longer stance on the prosthetic side.
double stance_asymmetry(double ps_pct, double ss_pct);

// Every cycle of every trial, resampled to 0..100 % and averaged.
signals::CycleCurve mean_cycle_curve(std::span<const GaitTrial> trials, Joint joint, Side side);

// Stance percent pooled over all cycles of the trials.
double pooled_stance_percent(std::span<const GaitTrial> trials, Side side);

// 0 .. floor(stance %) for Window::stance, 0..100 otherwise.
signals::PercentWindow side_window(std::span<const GaitTrial> trials, Side side, Window window);

// The correlation window is the shorter of the two sides' windows.
signals::PercentWindow shared_window(std::span<const GaitTrial> trials, Window window);

// max - min of the mean cycle curve inside the window.
double rom(std::span<const GaitTrial> trials, Joint joint, Side side, Window window);
double rom(const GaitTrial& trial, Joint joint, Side side, Window window);

// 100 * pearson(mean PS curve, mean SS curve) over the shared window.
double joint_symmetry(std::span<const GaitTrial> trials, Joint joint, Window window);
double joint_symmetry(const GaitTrial& trial, Joint joint, Window window);

// Mean over trials of each trial's peak forward pelvis velocity.
double com_velocity_metric(std::span<const GaitTrial> trials);

// 100 (value - reference) / reference. DomainError on a zero reference.
double percent_change(double reference, double value);

struct GaitMetrics {
    std::map<std::pair<Joint, Side>, double> rom_deg;
    std::map<Joint, double> correlation_pct;
    std::map<Side, double> stance_pct;
    double stance_asymmetry_pct = 0.0;
    double com_peak_velocity_mps = 0.0;
    int trials = 0;
    int cycles_ps = 0;
    int cycles_ss = 0;
};

GaitMetrics analyze(std::span<const GaitTrial> trials, Window window = Window::stance);

// Structured text, one metric per line: metric,joint,side,value,unit
std::string metrics_to_delimited(const GaitMetrics& m);

}  // namespace socketbench::gait
