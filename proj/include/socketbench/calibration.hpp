#pragma once

namespace socketbench {

// force = slope * raw + intercept
struct LinearCalibration {
    double slope = 1.0;      // N per raw unit
    double intercept = 0.0;  // N
    double r_squared = 1.0;

    double force(double raw) const { return slope * raw + intercept; }
    static LinearCalibration identity() { return {}; }
};

}  // namespace socketbench
