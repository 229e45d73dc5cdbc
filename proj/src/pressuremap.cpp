#include "socketbench/pressuremap.hpp"

#include <algorithm>
#include <cmath>

#include "socketbench/delimited.hpp"
#include "socketbench/error.hpp"

namespace socketbench::pressuremap {

using signals::CycleCurve;
using signals::Series;

PressureSequence::PressureSequence(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows <= 0 || cols <= 0) throw ValidationError("grid", "rows and cols must be positive");
}

void PressureSequence::add_frame(double t_s, std::vector<double> kpa) {
    if (kpa.size() != static_cast<std::size_t>(rows_ * cols_))
        throw ValidationError("frame", "expected " + std::to_string(rows_ * cols_) + " cells, got " +
                                           std::to_string(kpa.size()));
    if (!t_.empty() && !(t_s > t_.back())) throw ValidationError("frame", "time stamps must increase");
    for (double v : kpa)
        if (!(v >= 0)) throw ValidationError("frame", "pressure must be >= 0 kPa");
    t_.push_back(t_s);
    frames_.push_back(std::move(kpa));
}

void PressureSequence::set_mask(Region region, std::vector<Cell> cells) {
    for (const auto& c : cells)
        if (c.row < 0 || c.row >= rows_ || c.col < 0 || c.col >= cols_)
            throw ValidationError("mask." + std::string(catalog::to_string(region)),
                                  "cell (" + std::to_string(c.row) + "," + std::to_string(c.col) + ") out of bounds");
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    masks_[region] = std::move(cells);
}

const std::vector<Cell>& PressureSequence::mask(Region region) const {
    auto it = masks_.find(region);
    if (it == masks_.end())
        throw ValidationError("mask." + std::string(catalog::to_string(region)), "no mask for region");
    return it->second;
}

namespace {

int integer_cell(const DelimitedTable& t, std::size_t r, std::size_t c) {
    const double v = t.number(r, c);
    if (v != std::floor(v))
        throw ParseError(t.source + ":" + std::to_string(t.line_numbers[r]) + ": '" + t.header[c] +
                         "' must be an integer");
    return static_cast<int>(v);
}

int int_directive(const DelimitedTable& t, std::string_view key) {
    const auto s = t.directive(key);
    try {
        std::size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::logic_error&) {
        throw ParseError(t.source + ": directive " + std::string(key) + " is not an integer");
    }
}

PressureSequence build_sequence(const DelimitedTable& frames, const DelimitedTable& masks) {
    PressureSequence seq(int_directive(frames, "rows"), int_directive(frames, "cols"));
    const auto c_t = frames.column("t_s");
    const auto c_r = frames.column("row");
    const auto c_c = frames.column("col");
    const auto c_k = frames.column("kpa");
    const auto cells = static_cast<std::size_t>(seq.rows() * seq.cols());

    std::vector<double> current;
    std::vector<bool> seen;
    double current_t = 0.0;
    auto flush = [&] {
        if (!current.empty()) seq.add_frame(current_t, std::move(current));
        current.clear();
    };
    for (std::size_t r = 0; r < frames.rows.size(); ++r) {
        const double t = frames.number(r, c_t);
        const auto where = frames.source + ":" + std::to_string(frames.line_numbers[r]);
        if (current.empty() || t != current_t) {
            if (!current.empty() && !(t > current_t)) throw ParseError(where + ": frames must be time-ordered");
            flush();
            current.assign(cells, 0.0);
            seen.assign(cells, false);
            current_t = t;
        }
        const int row = integer_cell(frames, r, c_r);
        const int col = integer_cell(frames, r, c_c);
        if (row < 0 || row >= seq.rows() || col < 0 || col >= seq.cols())
            throw ParseError(where + ": cell out of bounds");
        const auto i = static_cast<std::size_t>(row * seq.cols() + col);
        if (seen[i]) throw ParseError(where + ": duplicate cell in frame");
        seen[i] = true;
        const double kpa = frames.number(r, c_k);
        if (!(kpa >= 0)) throw ParseError(where + ": negative pressure");
        current[i] = kpa;
    }
    flush();
    if (seq.frame_count() == 0) throw ParseError(frames.source + ": no frames");

    const auto m_region = masks.column("region");
    const auto m_r = masks.column("row");
    const auto m_c = masks.column("col");
    std::map<Region, std::vector<Cell>> by_region;
    for (std::size_t r = 0; r < masks.rows.size(); ++r)
        by_region[catalog::parse_region(masks.cell(r, m_region))].push_back(
            {integer_cell(masks, r, m_r), integer_cell(masks, r, m_c)});
    for (auto& [region, list] : by_region) {
        try {
            seq.set_mask(region, std::move(list));
        } catch (const ValidationError& e) {
            throw ParseError(masks.source + ": " + e.what());
        }
    }
    return seq;
}

std::vector<CycleBounds> build_cycles(const DelimitedTable& t) {
    const auto a = t.column("t_start_s");
    const auto b = t.column("t_end_s");
    std::vector<CycleBounds> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        CycleBounds c{t.number(r, a), t.number(r, b)};
        if (!(c.end_s > c.start_s))
            throw ParseError(t.source + ":" + std::to_string(t.line_numbers[r]) + ": cycle end must follow start");
        out.push_back(c);
    }
    if (out.empty()) throw ParseError(t.source + ": no cycles");
    return out;
}

}  // namespace

PressureSequence parse_pressure_sequence(std::string_view frames_text, std::string_view mask_text,
                                         std::string source_name) {
    return build_sequence(parse_delimited(frames_text, source_name), parse_delimited(mask_text, source_name + " mask"));
}

PressureSequence load_pressure_sequence(const std::filesystem::path& frames_path,
                                        const std::filesystem::path& mask_path) {
    return build_sequence(load_delimited(frames_path), load_delimited(mask_path));
}

std::vector<CycleBounds> parse_cycle_bounds(std::string_view text, std::string source_name) {
    return build_cycles(parse_delimited(text, std::move(source_name)));
}

std::vector<CycleBounds> load_cycle_bounds(const std::filesystem::path& path) {
    return build_cycles(load_delimited(path));
}

LinearCalibration two_point_calibration(double raw1, double raw2, double kg1, double kg2, double g) {
    if (raw1 == raw2 || kg1 == kg2) throw DomainError("two_point_calibration: points coincide");
    if (!(g > 0)) throw DomainError("two_point_calibration: g must be > 0");
    const double f1 = kg1 * g;
    const double f2 = kg2 * g;
    const double slope = (f2 - f1) / (raw2 - raw1);
    return {slope, f1 - slope * raw1, 1.0};
}

std::string_view to_string(Statistic s) { return s == Statistic::mean ? "mean" : "peak_cell"; }

Statistic parse_statistic(std::string_view s) {
    if (s == "mean") return Statistic::mean;
    if (s == "peak_cell" || s == "peak") return Statistic::peak_cell;
    throw ParseError("unknown statistic '" + std::string(s) + "'");
}

CycleCurve region_curve(const PressureSequence& seq, Region region, CycleBounds cycle, Statistic stat) {
    const auto& cells = seq.mask(region);
    if (cells.empty()) throw ValidationError("mask." + std::string(catalog::to_string(region)), "mask is empty");
    std::vector<double> values;
    values.reserve(seq.frame_count());
    for (std::size_t f = 0; f < seq.frame_count(); ++f) {
        double acc = stat == Statistic::mean ? 0.0 : seq.at(f, cells.front());
        for (const auto& c : cells) {
            const double v = seq.at(f, c);
            if (stat == Statistic::mean)
                acc += v;
            else
                acc = std::max(acc, v);
        }
        values.push_back(stat == Statistic::mean ? acc / static_cast<double>(cells.size()) : acc);
    }
    auto curve = signals::resample_cycle(Series(seq.times(), std::move(values)), cycle.start_s, cycle.end_s);
    curve.unit = "kPa";
    return curve;
}

CycleCurve region_mean_curve(const PressureSequence& seq, Region region, std::span<const CycleBounds> cycles,
                             Statistic stat) {
    if (cycles.empty()) throw DomainError("region_mean_curve: no cycles");
    std::vector<CycleCurve> curves;
    for (const auto& c : cycles) curves.push_back(region_curve(seq, region, c, stat));
    return signals::mean_curve(curves);
}

namespace {

double reduction(double ref, double cand, const char* what) {
    if (ref == 0.0) throw DomainError(std::string(what) + ": zero reference");
    return 100.0 * (ref - cand) / ref;
}

}  // namespace

double peak_reduction(const CycleCurve& reference, const CycleCurve& candidate) {
    return reduction(signals::peak(reference).value, signals::peak(candidate).value, "peak_reduction");
}

double mean_reduction(const CycleCurve& reference, const CycleCurve& candidate) {
    return reduction(signals::curve_mean(reference), signals::curve_mean(candidate), "mean_reduction");
}

double velocity_normalized_reduction(double ref_peak, double ref_v, double cand_peak, double cand_v) {
    if (!(ref_v > 0 && cand_v > 0)) throw DomainError("velocity_normalized_reduction: velocities must be > 0");
    return reduction(ref_peak / ref_v, cand_peak / cand_v, "velocity_normalized_reduction");
}

double bw_normalize(double pressure_mpa, double body_mass_kg, double g) {
    if (!(body_mass_kg > 0)) throw DomainError("bw_normalize: body mass must be > 0");
    if (!(g > 0)) throw DomainError("bw_normalize: g must be > 0");
    return pressure_mpa / (body_mass_kg * g);
}

double normalized_comparison(double ours, double literature) {
    if (!(literature > 0)) throw DomainError("normalized_comparison: literature value must be > 0");
    return 100.0 * (literature - ours) / literature;
}

void validate(const StaticTestConfig& cfg) {
    if (!(cfg.body_mass_kg > 0)) throw ValidationError("body_mass_kg", "must be > 0");
    if (!(cfg.load_fraction > 0 && cfg.load_fraction <= 1)) throw ValidationError("load_fraction", "must be in (0, 1]");
    if (!(cfg.safety_factor > 0)) throw ValidationError("safety_factor", "must be > 0");
    if (!(cfg.g > 0)) throw ValidationError("g", "must be > 0");
}

double static_target_force(const StaticTestConfig& cfg) {
    validate(cfg);
    return cfg.body_mass_kg * cfg.g * cfg.load_fraction * cfg.safety_factor;
}

namespace {

double double_directive(const DelimitedTable& t, std::string_view key) {
    const auto s = t.directive(key);
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::logic_error&) {
        throw ParseError(t.source + ": directive " + std::string(key) + " is not a number");
    }
}

StaticTraces build_static(const DelimitedTable& t) {
    StaticTraces out;
    out.contact_area_mm2 = double_directive(t, "area_mm2");
    out.calibration.slope = double_directive(t, "slope");
    out.calibration.intercept = double_directive(t, "intercept");
    if (!(out.contact_area_mm2 > 0)) throw ParseError(t.source + ": area_mm2 must be > 0");
    const auto c_t = t.column("t_s");
    std::vector<double> time;
    for (std::size_t r = 0; r < t.rows.size(); ++r) time.push_back(t.number(r, c_t));
    for (std::size_t c = 0; c < t.header.size(); ++c) {
        const auto& h = t.header[c];
        if (c == c_t) continue;
        if (!h.ends_with("_v")) throw ParseError(t.source + ": unexpected column '" + h + "'");
        const Region region = catalog::parse_region(std::string_view(h).substr(0, h.size() - 2));
        std::vector<double> v;
        for (std::size_t r = 0; r < t.rows.size(); ++r) v.push_back(t.number(r, c));
        try {
            out.volts.emplace(region, Series(time, std::move(v)));
        } catch (const DomainError& e) {
            throw ParseError(t.source + ": " + e.what());
        }
    }
    if (out.volts.empty()) throw ParseError(t.source + ": no sensor columns");
    return out;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

StaticTraces parse_static_traces(std::string_view text, std::string source_name) {
    return build_static(parse_delimited(text, std::move(source_name)));
}

StaticTraces load_static_traces(const std::filesystem::path& path) { return build_static(load_delimited(path)); }

StaticResult analyze_static(const Series& volts, Region region, const LinearCalibration& cal, double contact_area_mm2,
                            double smoothing_factor, double dwell_fraction) {
    if (!(contact_area_mm2 > 0)) throw DomainError("analyze_static: contact area must be > 0");
    if (!(dwell_fraction > 0 && dwell_fraction <= 1)) throw DomainError("analyze_static: dwell fraction in (0, 1]");
    std::vector<double> mpa;
    mpa.reserve(volts.size());
    for (double v : volts.v()) mpa.push_back(cal.force(v) / contact_area_mm2);
    const Series raw(volts.t(), mpa);
    const auto smooth = signals::moving_mean(raw, smoothing_factor).v();
    const double top = *std::max_element(smooth.begin(), smooth.end());
    std::vector<double> dwell;
    for (double v : smooth)
        if (v >= dwell_fraction * top) dwell.push_back(v);
    StaticResult r;
    r.region = region;
    r.dwell_samples = dwell.size();
    r.plateau_mpa = median(std::move(dwell));
    r.peak_raw_mpa = *std::max_element(mpa.begin(), mpa.end());
    return r;
}

std::vector<StaticResult> analyze_static(const StaticTraces& traces, double smoothing_factor, double dwell_fraction) {
    std::vector<StaticResult> out;
    for (const auto& [region, series] : traces.volts)
        out.push_back(analyze_static(series, region, traces.calibration, traces.contact_area_mm2, smoothing_factor,
                                     dwell_fraction));
    return out;
}

}  // namespace socketbench::pressuremap
