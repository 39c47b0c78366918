#include "tdsmps/fitting.hpp"

#include <algorithm>
#include <cmath>

#include "tdsmps/errors.hpp"

namespace tdsmps {

void Series::push_back(double x, double y) {
    if (!points.empty() && !(x > points.back().x)) {
        throw DataError("series x values must be strictly increasing");
    }
    points.push_back({x, y});
}

ScalingFit fit_line(const Series& series, FitWindow window) {
    std::vector<SeriesPoint> pts;
    for (const auto& p : series.points) {
        if (p.x >= window.x_min && p.x <= window.x_max) {
            pts.push_back(p);
        }
    }
    if (pts.size() < 4) {
        throw DataError("fit_line needs at least 4 points inside the window, got " + std::to_string(pts.size()));
    }
    const double n = static_cast<double>(pts.size());
    double mx = 0;
    double my = 0;
    for (const auto& p : pts) {
        mx += p.x;
        my += p.y;
    }
    mx /= n;
    my /= n;
    double sxx = 0;
    double sxy = 0;
    for (const auto& p : pts) {
        sxx += (p.x - mx) * (p.x - mx);
        sxy += (p.x - mx) * (p.y - my);
    }
    if (!(sxx > 0)) {
        throw DataError("fit_line needs distinct x values");
    }
    ScalingFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.window = window;
    fit.point_count = static_cast<long>(pts.size());
    double ss = 0;
    for (const auto& p : pts) {
        const double r = p.y - (fit.slope * p.x + fit.intercept);
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / n);
    return fit;
}

long d_epsilon(const BondSpectrum& spectrum, double epsilon) {
    if (!(epsilon > 0) || epsilon >= 1) {
        throw ParameterError("epsilon must lie in (0, 1)");
    }
    // Tail sums from the back keep small weights from being swamped.
    const auto& w = spectrum.weights;
    const long n = static_cast<long>(w.size());
    double tail = 0;
    long rank = n;
    for (long k = n - 1; k >= 1; --k) {
        tail += w[static_cast<std::size_t>(k)];
        if (tail > epsilon) {
            break;
        }
        rank = k;
    }
    return std::max(rank, 1L);
}

Series extract_D_epsilon(const std::vector<std::pair<double, BondSpectrum>>& spectra, double epsilon) {
    Series s;
    for (const auto& [beta, spec] : spectra) {
        s.push_back(beta, static_cast<double>(d_epsilon(spec, epsilon)));
    }
    return s;
}

Series log_log(const Series& series) {
    Series out;
    out.metadata = series.metadata;
    for (const auto& p : series.points) {
        if (!(p.x > 0 && p.y > 0)) {
            throw DataError("log-log transform needs positive values");
        }
        out.push_back(std::log(p.x), std::log(p.y));
    }
    return out;
}

SaturationResult detect_saturation(const Series& series, double tolerance) {
    if (series.size() < 7) {
        throw DataError("detect_saturation needs at least 7 points");
    }
    const std::size_t n = series.size();
    const std::size_t first = n - std::max<std::size_t>(7, n / 3);
    double variation = 0;
    double sum = 0;
    for (std::size_t k = first; k < n; ++k) {
        sum += series.points[k].y;
        if (k > first) {
            variation += std::abs(series.points[k].y - series.points[k - 1].y);
        }
    }
    return {variation <= tolerance, sum / static_cast<double>(n - first)};
}

} // namespace tdsmps
