#pragma once

#include <limits>
#include <map>
#include <string>
#include <vector>

#include "tdsmps/spectrum.hpp"

namespace tdsmps {

struct SeriesPoint {
    double x = 0;
    double y = 0;
};

/// Ordered (x, y) samples with strictly increasing x.
struct Series {
    std::vector<SeriesPoint> points;
    std::map<std::string, std::string> metadata;

    void push_back(double x, double y);
    [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
};

struct FitWindow {
    double x_min = -std::numeric_limits<double>::infinity();
    double x_max = std::numeric_limits<double>::infinity();
};

struct ScalingFit {
    double slope = 0;
    double intercept = 0;
    FitWindow window;
    double residual_rms = 0;
    long point_count = 0;
};

/// Ordinary least squares on the points with x inside the (closed) window.
ScalingFit fit_line(const Series& series, FitWindow window = {});

/// Smallest D with sum_{k > D} omega_k <= eps.
long d_epsilon(const BondSpectrum& spectrum, double epsilon);

/// D_eps for each (beta, spectrum) pair, as a series in beta.
Series extract_D_epsilon(const std::vector<std::pair<double, BondSpectrum>>& spectra, double epsilon);

/// Log-log version of a series: (log x, log y). Requires positive entries.
Series log_log(const Series& series);

struct SaturationResult {
    bool saturated = false;
    double plateau = 0;
};

/// Saturated when the total variation over the last max(7, n/3) points is <= tolerance.
SaturationResult detect_saturation(const Series& series, double tolerance);

} // namespace tdsmps
