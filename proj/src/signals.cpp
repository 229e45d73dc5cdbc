#include "socketbench/signals.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "socketbench/error.hpp"

namespace socketbench::signals {

Series::Series(std::vector<double> t, std::vector<double> v) : t_(std::move(t)), v_(std::move(v)) {
    if (t_.empty()) throw DomainError("series: needs at least one sample");
    if (t_.size() != v_.size()) throw DomainError("series: time and value lengths differ");
    for (std::size_t i = 1; i < t_.size(); ++i)
        if (!(t_[i] > t_[i - 1]))
            throw DomainError("series: time stamps not strictly increasing at index " + std::to_string(i));
}

double Series::at(double time) const {
    if (t_.empty()) throw DomainError("series: empty");
    if (time < t_.front() || time > t_.back())
        throw DomainError("series: time " + std::to_string(time) + " outside span");
    auto it = std::upper_bound(t_.begin(), t_.end(), time);
    if (it == t_.end()) return v_.back();
    const std::size_t hi = static_cast<std::size_t>(it - t_.begin());
    const std::size_t lo = hi - 1;
    const double frac = (time - t_[lo]) / (t_[hi] - t_[lo]);
    return v_[lo] + frac * (v_[hi] - v_[lo]);
}

std::size_t moving_mean_window(std::size_t n, double smoothing_factor) {
    const double target = smoothing_factor * static_cast<double>(n) / 10.0;
    // nearest odd integer: 2k + 1 closest to target
    const double k = std::floor((target - 1.0) / 2.0 + 0.5);
    const double odd = 2.0 * k + 1.0;
    return static_cast<std::size_t>(std::max(3.0, odd));
}

std::vector<double> moving_mean(std::span<const double> values, std::size_t window) {
    if (values.empty()) throw DomainError("moving_mean: empty series");
    if (window % 2 == 0) throw DomainError("moving_mean: window must be odd");
    const std::size_t n = values.size();
    const std::size_t half = window / 2;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= half ? i - half : 0;
        const std::size_t hi = std::min(n - 1, i + half);
        double sum = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) sum += values[j];
        out[i] = sum / static_cast<double>(hi - lo + 1);
    }
    return out;
}

Series moving_mean(const Series& series, double smoothing_factor) {
    if (series.empty()) throw DomainError("moving_mean: empty series");
    if (!(smoothing_factor > 0.0 && smoothing_factor <= 1.0))
        throw DomainError("moving_mean: smoothing factor must lie in (0, 1]");
    const std::size_t w = moving_mean_window(series.size(), smoothing_factor);
    return Series(series.t(), moving_mean(series.v(), w));
}

CycleCurve resample_cycle(const Series& series, double t_start, double t_end) {
    if (!(t_start < t_end)) throw DomainError("resample_cycle: t_start must precede t_end");
    if (series.empty() || t_start < series.front_time() || t_end > series.back_time())
        throw DomainError("resample_cycle: cycle outside series span");
    CycleCurve curve;
    const double span = t_end - t_start;
    for (std::size_t k = 0; k < cycle_points; ++k) {
        const double t = k + 1 == cycle_points ? t_end : t_start + span * static_cast<double>(k) / 100.0;
        curve.values[k] = series.at(t);
    }
    return curve;
}

CycleCurve mean_curve(std::span<const CycleCurve> curves) {
    if (curves.empty()) throw DomainError("mean_curve: no curves");
    CycleCurve out;
    out.unit = curves.front().unit;
    for (const auto& c : curves) {
        if (c.unit != out.unit) throw DomainError("mean_curve: mixed units '" + out.unit + "' and '" + c.unit + "'");
        for (std::size_t k = 0; k < cycle_points; ++k) out.values[k] += c.values[k];
    }
    for (auto& v : out.values) v /= static_cast<double>(curves.size());
    return out;
}

double curve_mean(const CycleCurve& curve) {
    return std::accumulate(curve.values.begin(), curve.values.end(), 0.0) / static_cast<double>(cycle_points);
}

double pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DomainError("pearson: length mismatch");
    if (a.size() < 2) throw DomainError("pearson: needs at least two samples");
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) throw DomainError("pearson: zero variance input");
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double pearson(const CycleCurve& a, const CycleCurve& b, PercentWindow window) {
    if (window.first < 0 || window.last > 100 || window.first > window.last)
        throw DomainError("pearson: empty or out-of-range window");
    const auto first = static_cast<std::size_t>(window.first);
    const auto count = static_cast<std::size_t>(window.size());
    return pearson(std::span<const double>(a.values).subspan(first, count),
                   std::span<const double>(b.values).subspan(first, count));
}

Peak peak(const CycleCurve& curve) {
    Peak p{curve.values[0], 0};
    for (std::size_t k = 1; k < cycle_points; ++k) {
        if (curve.values[k] > p.value) p = {curve.values[k], static_cast<int>(k)};
    }
    return p;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DomainError("linear_fit: length mismatch");
    if (x.size() < 2) throw DomainError("linear_fit: needs at least two points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw DomainError("linear_fit: degenerate input (all x equal)");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - fit(x[i]);
        ss_res += r * r;
    }
    fit.r_squared = syy == 0.0 ? 1.0 : std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
    return fit;
}

}  // namespace socketbench::signals
