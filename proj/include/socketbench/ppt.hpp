#pragma once

// Pressure-pain-threshold acquisition: load-cell calibration, the per-session
// state machine, PPT matrix assembly and the material/thickness selection rule.

#include <compare>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "socketbench/calibration.hpp"
#include "socketbench/catalog.hpp"

namespace socketbench::ppt {

using catalog::Region;

using socketbench::LinearCalibration;

struct CalibrationPair {
    double raw = 0.0;
    double applied_force_n = 0.0;
};

// Least-squares line through the pairs. DomainError with fewer than two
// distinct raw readings or a non-positive slope.
LinearCalibration calibrate(std::span<const CalibrationPair> pairs);

enum class SessionState { idle, resting, ramping, marked, aborted };

std::string_view to_string(SessionState s);

struct Specimen {
    std::string material;
    double thickness_mm = 0.0;

    bool operator==(const Specimen&) const = default;
};

struct ForceSample {
    double t_s = 0.0;
    double force_n = 0.0;
};

inline constexpr double default_max_force_n = 200.0;
inline constexpr double first_rest_s = 900.0;
inline constexpr double between_rest_s = 600.0;

namespace event {
struct StartRest {
    double required_s = first_rest_s;
};
struct RestElapsed {
    double seconds = 0.0;
};
struct StartRamp {
    bool override_rest = false;  // operator skipped the remaining rest; recorded in notes
};
struct Sample {
    double t_s = 0.0;
    double raw = 0.0;
};
struct MarkPain {};
struct Abort {
    std::string reason = "operator abort";
};
}  // namespace event

using SessionEvent = std::variant<event::StartRest, event::RestElapsed, event::StartRamp, event::Sample,
                                  event::MarkPain, event::Abort>;

// One (region, specimen) test.
//
// idle -> resting -> ramping -> marked | aborted; abort is accepted from any
// non-terminal state. Samples are calibrated on arrival; a sample above the
// force limit aborts the session and is not stored.
class PPTSession {
public:
    PPTSession() = default;
    PPTSession(Region region, Specimen specimen, LinearCalibration calibration = LinearCalibration::identity(),
               double max_force_limit_n = default_max_force_n);

    // StateError on an illegal transition, DomainError on a non-increasing timestamp.
    void apply(const SessionEvent& e);

    Region region() const noexcept { return region_; }
    const Specimen& specimen() const noexcept { return specimen_; }
    const LinearCalibration& calibration() const noexcept { return calibration_; }
    SessionState state() const noexcept { return state_; }
    double max_force_limit_n() const noexcept { return max_force_limit_n_; }
    double required_rest_s() const noexcept { return required_rest_s_; }
    double rested_s() const noexcept { return rested_s_; }
    double remaining_rest_s() const noexcept;
    const std::vector<ForceSample>& samples() const noexcept { return samples_; }
    std::optional<std::size_t> pain_mark() const noexcept { return pain_mark_; }
    std::optional<double> pain_force_n() const;
    const std::string& abort_reason() const noexcept { return abort_reason_; }
    const std::vector<std::string>& notes() const noexcept { return notes_; }

    bool terminal() const noexcept { return state_ == SessionState::marked || state_ == SessionState::aborted; }

    bool screening = false;  // healthy-participant screening; never enters a selection matrix

private:
    Region region_ = Region::tibia;
    Specimen specimen_;
    LinearCalibration calibration_;
    double max_force_limit_n_ = default_max_force_n;
    SessionState state_ = SessionState::idle;
    double required_rest_s_ = 0.0;
    double rested_s_ = 0.0;
    std::vector<ForceSample> samples_;
    std::optional<std::size_t> pain_mark_;
    std::string abort_reason_;
    std::vector<std::string> notes_;
};

PPTSession session_step(PPTSession session, const SessionEvent& e);

// Pain force over probe area, in MPa (N/mm^2).
// StateError unless marked; DomainError on a non-positive area.
double ppt_value(const PPTSession& session, double probe_area_mm2);

// 100 |applied - measured| / applied.
double device_error(double applied_n, double measured_n);

struct MatrixKey {
    Region region = Region::tibia;
    std::string material;
    double thickness_mm = 0.0;

    auto operator<=>(const MatrixKey&) const = default;
};

// Per-region PPT measurements over (material, thickness). Repeated
// measurements of one triple are averaged.
class PPTMatrix {
public:
    void record(const MatrixKey& key, double ppt_mpa);
    void set_probe_area(Region region, double area_mm2);

    std::optional<double> value(const MatrixKey& key) const;
    std::map<MatrixKey, double> entries() const;
    const std::map<MatrixKey, std::vector<double>>& measurements() const noexcept { return measurements_; }
    const std::map<Region, double>& probe_area_mm2() const noexcept { return probe_area_; }
    bool has_region(Region region) const;
    bool empty() const noexcept { return measurements_.empty(); }

private:
    std::map<MatrixKey, std::vector<double>> measurements_;
    std::map<Region, double> probe_area_;
};

// Session results file (JSON). Entries carry either `ppt_mpa` or `measurements`.
PPTMatrix parse_matrix(std::string_view text);
PPTMatrix load_matrix(const std::filesystem::path& path);
std::string serialize_matrix(const PPTMatrix& matrix);

struct RegionSelection {
    std::string material;
    double thickness_mm = 0.0;
    double ppt_mpa = 0.0;
};

struct RestOfSocket {
    std::string material = "tough_pla";
    double thickness_mm = 7.5;
};

struct SelectionResult {
    std::map<Region, RegionSelection> regions;
    RestOfSocket rest_of_socket;
};

inline constexpr Region selection_regions[] = {Region::tibia, Region::fibula, Region::calf};

// Per region, the (material, thickness) with the highest PPT. Ties go to the
// lower areal mass (density x thickness) and then the thinner wall.
// ValidationError if a required region has no entry or a material is not in the catalog.
SelectionResult select_materials(const PPTMatrix& matrix, const catalog::Catalog& catalog,
                                 std::span<const Region> required = selection_regions,
                                 RestOfSocket rest = {});

std::string serialize_selection(const SelectionResult& selection, const catalog::Catalog& catalog);

struct PlannedSession {
    Region region = Region::tibia;
    Specimen specimen;
    bool screening = false;
};

struct ScheduledSession {
    PlannedSession session;
    double required_rest_s = 0.0;
};

// 900 s before the first session, 600 s before each later one.
std::vector<ScheduledSession> rest_schedule(std::span<const PlannedSession> plan);

// Recorded force stream. The header declares either `raw` or `force_n`.
struct ForceStream {
    bool raw = false;
    std::vector<double> t_s;
    std::vector<double> value;

    std::size_t size() const noexcept { return t_s.size(); }
};

ForceStream parse_force_stream(std::string_view text, std::string source_name = "force stream");
ForceStream load_force_stream(const std::filesystem::path& path);

// A session plan: the ordered set of tests for one participant, each with its
// recorded stream and (for offline replay) the time the pain mark was given.
struct PlanEntry {
    PlannedSession session;
    std::filesystem::path stream_path;
    ForceStream stream;
    std::optional<double> mark_at_s;
};

struct SessionPlan {
    std::map<Region, double> probe_area_mm2;
    LinearCalibration calibration;  // applied to raw streams
    double max_force_limit_n = default_max_force_n;
    std::vector<PlanEntry> entries;

    double probe_area(Region r) const;  // 100 mm^2 when the plan is silent
    const PlanEntry* find(Region region, const Specimen& specimen) const;
    std::vector<const PlanEntry*> find_all(Region region, const Specimen& specimen) const;  // plan order
};

// Loads every referenced stream; relative paths resolve against the plan's directory.
SessionPlan load_session_plan(const std::filesystem::path& path);

struct ReplayOutcome {
    PPTSession session;
    std::optional<double> ppt_mpa;
};

struct ReplayResult {
    std::vector<ReplayOutcome> sessions;
    PPTMatrix matrix;
};

// Offline replay through the same state machine: rest per schedule, ramp,
// samples up to `mark_at_s`, then mark. Deterministic.
ReplayResult replay_plan(const SessionPlan& plan);

}  // namespace socketbench::ppt
