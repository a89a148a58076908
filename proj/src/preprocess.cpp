#include "skillkit/preprocess.hpp"

#include <algorithm>
#include <cmath>

namespace skillkit {

Series3 Series3::from_hand(const Trajectory& traj, bool left_hand) {
    Series3 s;
    s.dt = 1.0 / traj.sample_rate_hz;
    s.values.reserve(traj.samples.size());
    for (const auto& sample : traj.samples) {
        s.values.push_back(left_hand ? sample.left : sample.right);
    }
    return s;
}

namespace {

double tricube(double u) {
    if (u >= 1.0) {
        return 0.0;
    }
    const double t = 1.0 - u * u * u;
    return t * t * t;
}

}  // namespace

Series3 loess_smooth(const Series3& raw, double span, std::size_t min_window) {
    if (!(span > 0.0) || span > 1.0) {
        throw Error("loess span must be in (0, 1]");
    }
    const std::size_t n = raw.size();
    if (n < 2) {
        throw Error("loess needs at least 2 points");
    }

    std::size_t window = static_cast<std::size_t>(std::ceil(span * static_cast<double>(n)));
    window = std::clamp(window, std::max<std::size_t>(min_window, 2), n);

    Series3 out;
    out.dt = raw.dt;
    out.values.resize(n);

    for (std::size_t i = 0; i < n; ++i) {
        // Centered window, shifted inward near the ends.
        std::size_t start = 0;
        const std::size_t half = (window - 1) / 2;
        if (i > half) {
            start = i - half;
        }
        if (start + window > n) {
            start = n - window;
        }

        double dmax = 0.0;
        for (std::size_t j = start; j < start + window; ++j) {
            dmax = std::max(dmax, std::abs(static_cast<double>(j) - static_cast<double>(i)));
        }

        for (int c = 0; c < 3; ++c) {
            double sw = 0.0, sx = 0.0, sxx = 0.0, sy = 0.0, sxy = 0.0;
            for (std::size_t j = start; j < start + window; ++j) {
                const double x = static_cast<double>(j) - static_cast<double>(i);
                const double w = dmax > 0.0 ? tricube(std::abs(x) / dmax) : 1.0;
                const double y = raw.values[j][c];
                sw += w;
                sx += w * x;
                sxx += w * x * x;
                sy += w * y;
                sxy += w * x * y;
            }
            const double denom = sw * sxx - sx * sx;
            if (std::abs(denom) > 1e-12 * std::max(1.0, sw * sxx)) {
                out.values[i][c] = (sxx * sy - sx * sxy) / denom;
            } else if (sw > 0.0) {
                out.values[i][c] = sy / sw;  // degenerate window: weighted mean
            } else {
                out.values[i][c] = raw.values[i][c];
            }
        }
    }
    return out;
}

Series3 derivative(const Series3& s) {
    const std::size_t n = s.size();
    if (n < 2) {
        throw Error("derivative needs at least 2 points");
    }
    Series3 out;
    out.dt = s.dt;
    out.values.resize(n);
    out.values[0] = (s.values[1] - s.values[0]) / s.dt;
    out.values[n - 1] = (s.values[n - 1] - s.values[n - 2]) / s.dt;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        out.values[i] = (s.values[i + 1] - s.values[i - 1]) / (2.0 * s.dt);
    }
    return out;
}

}  // namespace skillkit
