#pragma once

// Pressure-grid analytics for walking trials and single-point static traces.
// Walking data are in kPa, static data in MPa; conversions happen explicitly
// where the two meet.

#include <compare>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "socketbench/calibration.hpp"
#include "socketbench/catalog.hpp"
#include "socketbench/signals.hpp"

namespace socketbench::pressuremap {

using catalog::Region;

inline constexpr double standard_gravity = 9.81;

struct Cell {
    int row = 0;
    int col = 0;

    auto operator<=>(const Cell&) const = default;
};

// Time-ordered frames over a fixed rows x cols grid (kPa), plus named region masks.
class PressureSequence {
public:
    PressureSequence(int rows, int cols);

    // Row-major values, rows * cols of them, all >= 0. Time must increase.
    void add_frame(double t_s, std::vector<double> kpa);
    // Cells must be inside the grid.
    void set_mask(Region region, std::vector<Cell> cells);

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    std::size_t frame_count() const noexcept { return t_.size(); }
    const std::vector<double>& times() const noexcept { return t_; }
    double at(std::size_t frame, Cell c) const { return frames_[frame][index(c)]; }
    const std::vector<Cell>& mask(Region region) const;  // ValidationError when absent
    const std::map<Region, std::vector<Cell>>& masks() const noexcept { return masks_; }

private:
    std::size_t index(Cell c) const { return static_cast<std::size_t>(c.row * cols_ + c.col); }

    int rows_;
    int cols_;
    std::vector<double> t_;
    std::vector<std::vector<double>> frames_;
    std::map<Region, std::vector<Cell>> masks_;
};

// Frames: `# rows=R cols=C` then t_s,row,col,kpa; cells absent from a frame read 0.
// Masks: region,row,col.
PressureSequence parse_pressure_sequence(std::string_view frames_text, std::string_view mask_text,
                                         std::string source_name = "pressure");
PressureSequence load_pressure_sequence(const std::filesystem::path& frames_path,
                                        const std::filesystem::path& mask_path);

struct CycleBounds {
    double start_s = 0.0;
    double end_s = 0.0;
};

// t_start_s,t_end_s
std::vector<CycleBounds> parse_cycle_bounds(std::string_view text, std::string source_name = "cycles");
std::vector<CycleBounds> load_cycle_bounds(const std::filesystem::path& path);

// Line through (raw1, kg1 g) and (raw2, kg2 g). DomainError on coincident points.
LinearCalibration two_point_calibration(double raw1, double raw2, double kg1, double kg2,
                                        double g = standard_gravity);

enum class Statistic { mean, peak_cell };

std::string_view to_string(Statistic s);
Statistic parse_statistic(std::string_view s);

// Per-frame statistic over the masked cells, resampled to 0..100 %.
signals::CycleCurve region_curve(const PressureSequence& seq, Region region, CycleBounds cycle, Statistic stat);

// region_curve for each cycle, averaged.
signals::CycleCurve region_mean_curve(const PressureSequence& seq, Region region, std::span<const CycleBounds> cycles,
                                      Statistic stat);

double peak_reduction(const signals::CycleCurve& reference, const signals::CycleCurve& candidate);
double mean_reduction(const signals::CycleCurve& reference, const signals::CycleCurve& candidate);
double velocity_normalized_reduction(double ref_peak, double ref_v, double cand_peak, double cand_v);

// MPa per body weight.
double bw_normalize(double pressure_mpa, double body_mass_kg, double g = standard_gravity);

// 100 (literature - ours) / literature
double normalized_comparison(double ours, double literature);

struct StaticTestConfig {
    double body_mass_kg = 60.0;
    double load_fraction = 0.45;
    double safety_factor = 1.5;
    double g = standard_gravity;
};

void validate(const StaticTestConfig& cfg);  // ValidationError

// mass g load_fraction safety_factor, in N
double static_target_force(const StaticTestConfig& cfg);

// Single-point sensor traces from the static compression test.
// Columns t_s plus one `<region>_v` column per sensor (volts). Directives:
// area_mm2, slope, intercept (the force calibration, N per volt).
struct StaticTraces {
    std::map<Region, signals::Series> volts;
    double contact_area_mm2 = 0.0;
    LinearCalibration calibration;
};

StaticTraces parse_static_traces(std::string_view text, std::string source_name = "static traces");
StaticTraces load_static_traces(const std::filesystem::path& path);

inline constexpr double default_smoothing_factor = 0.45;
inline constexpr double default_dwell_fraction = 0.95;

struct StaticResult {
    Region region = Region::tibia;
    double plateau_mpa = 0.0;
    double peak_raw_mpa = 0.0;  // unsmoothed maximum
    std::size_t dwell_samples = 0;
};

// volts -> N -> MPa, moving mean, then the median of smoothed samples at or
// above `dwell_fraction` of the smoothed maximum.
StaticResult analyze_static(const signals::Series& volts, Region region, const LinearCalibration& cal,
                            double contact_area_mm2, double smoothing_factor = default_smoothing_factor,
                            double dwell_fraction = default_dwell_fraction);
std::vector<StaticResult> analyze_static(const StaticTraces& traces, double smoothing_factor = default_smoothing_factor,
                                         double dwell_fraction = default_dwell_fraction);

}  // namespace socketbench::pressuremap
