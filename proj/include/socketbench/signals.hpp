#pragma once

// Shared signal-processing kernel: smoothing, least squares, gait-cycle
// resampling, correlation and peak extraction. Everything here is a pure
// function and safe to call from any thread.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace socketbench::signals {

// A sampled signal. Construction enforces: at least one sample, equal lengths,
// strictly increasing time stamps.
class Series {
public:
    Series() = default;
    Series(std::vector<double> t, std::vector<double> v);

    std::size_t size() const noexcept { return t_.size(); }
    bool empty() const noexcept { return t_.empty(); }
    const std::vector<double>& t() const noexcept { return t_; }
    const std::vector<double>& v() const noexcept { return v_; }

    double front_time() const { return t_.front(); }
    double back_time() const { return t_.back(); }

    // Linear interpolation; DomainError outside [front_time, back_time].
    double at(double time) const;

private:
    std::vector<double> t_;
    std::vector<double> v_;
};

inline constexpr std::size_t cycle_points = 101;

// One gait cycle normalised to 0..100 % in 1 % steps.
struct CycleCurve {
    std::array<double, cycle_points> values{};
    std::string unit;

    double operator[](std::size_t percent) const { return values[percent]; }
    double& operator[](std::size_t percent) { return values[percent]; }
};

// Inclusive range of percent indices.
struct PercentWindow {
    int first = 0;
    int last = 100;

    static PercentWindow full() { return {0, 100}; }
    int size() const { return last - first + 1; }
};

// w = max(3, nearest odd integer to factor * n / 10). Ties round up.
std::size_t moving_mean_window(std::size_t n, double smoothing_factor);

// Centred moving mean of width `window` (odd); windows are truncated at the edges.
std::vector<double> moving_mean(std::span<const double> values, std::size_t window);

// DomainError unless 0 < smoothing_factor <= 1.
Series moving_mean(const Series& series, double smoothing_factor);

CycleCurve resample_cycle(const Series& series, double t_start, double t_end);

// Sample-by-sample mean of several curves (all sharing a unit).
CycleCurve mean_curve(std::span<const CycleCurve> curves);

double curve_mean(const CycleCurve& curve);

// Sample Pearson correlation; DomainError if either input has zero variance.
double pearson(std::span<const double> a, std::span<const double> b);
double pearson(const CycleCurve& a, const CycleCurve& b, PercentWindow window);

struct Peak {
    double value = 0.0;
    int percent = 0;
};

// Maximum and the first percent index at which it occurs.
Peak peak(const CycleCurve& curve);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;

    double operator()(double x) const { return slope * x + intercept; }
};

// Ordinary least squares y = slope * x + intercept.
// DomainError with fewer than two points or when every x is equal.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

}  // namespace socketbench::signals
