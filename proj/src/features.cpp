#include "skillkit/features.hpp"

#include "skillkit/util.hpp"

#include <Eigen/Geometry>

#include <cmath>

namespace skillkit {

namespace {
constexpr double kCurvatureSpeedFloor = 1e-9;
}

const std::array<std::string, FeatureVector::kCount>& FeatureVector::names() {
    static const std::array<std::string, kCount> kNames = {
        "ttc_s",
        "pl_left", "dp_left", "speed_mean_left", "speed_std_left",
        "jerk_mean_left", "jerk_std_left", "curv_mean_left", "curv_std_left",
        "pl_right", "dp_right", "speed_mean_right", "speed_std_right",
        "jerk_mean_right", "jerk_std_right", "curv_mean_right", "curv_std_right",
    };
    return kNames;
}

std::string FeatureVector::csv_header() {
    std::string out;
    for (std::size_t i = 0; i < kCount; ++i) {
        if (i > 0) {
            out += ',';
        }
        out += names()[i];
    }
    return out;
}

std::string FeatureVector::csv_row() const {
    std::string out;
    for (std::size_t i = 0; i < kCount; ++i) {
        if (i > 0) {
            out += ',';
        }
        out += format_double(values[i]);
    }
    return out;
}

double time_to_complete(const Trajectory& traj) {
    traj.validate();
    return static_cast<double>(traj.samples.size() - 1) / traj.sample_rate_hz;
}

double path_length(const Series3& points) {
    if (points.size() < 1) {
        throw Error("path_length needs at least 1 point");
    }
    double total = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        total += (points.values[i] - points.values[i - 1]).norm();
    }
    return total;
}

double depth_perception(const Series3& points, const Eigen::Vector3d& axis) {
    if (std::abs(axis.norm() - 1.0) > 1e-9) {
        throw Error("depth axis must be a unit vector");
    }
    double total = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        total += std::abs((points.values[i] - points.values[i - 1]).dot(axis));
    }
    return total;
}

std::vector<double> speed_series(const Series3& points) {
    if (points.size() < 2) {
        throw Error("speed_series needs at least 2 points");
    }
    std::vector<double> s;
    s.reserve(points.size() - 1);
    for (std::size_t i = 1; i < points.size(); ++i) {
        s.push_back((points.values[i] - points.values[i - 1]).norm() / points.dt);
    }
    return s;
}

std::vector<double> jerk_series(const Series3& points) {
    if (points.size() < 4) {
        throw Error("jerk_series needs at least 4 points");
    }
    const Series3 jerk = derivative(derivative(derivative(points)));
    std::vector<double> out;
    out.reserve(jerk.size());
    for (const auto& j : jerk.values) {
        out.push_back(j.norm());
    }
    return out;
}

std::vector<double> curvature_series(const Series3& v, const Series3& a) {
    if (v.size() != a.size()) {
        throw Error("curvature_series: velocity and acceleration lengths differ");
    }
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double speed = v.values[i].norm();
        const double denom = std::max(speed * speed * speed, kCurvatureSpeedFloor);
        out.push_back(v.values[i].cross(a.values[i]).norm() / denom);
    }
    return out;
}

std::pair<double, double> mean_std(const std::vector<double>& xs) {
    if (xs.empty()) {
        return {0.0, 0.0};
    }
    double sum = 0.0;
    for (double x : xs) {
        sum += x;
    }
    const double mean = sum / static_cast<double>(xs.size());
    if (xs.size() < 2) {
        return {mean, 0.0};
    }
    double ss = 0.0;
    for (double x : xs) {
        ss += (x - mean) * (x - mean);
    }
    return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

namespace {

void fill_hand_block(FeatureVector& fv, std::size_t base, const Series3& raw,
                     const FeatureConfig& cfg, const char* hand) {
    try {
        const Series3 pos = loess_smooth(raw, cfg.smoothing_span, cfg.min_smooth_window);
        const Series3 vel = derivative(pos);
        const Series3 acc = derivative(vel);

        fv[base + feat::kPathLength] = path_length(pos);
        fv[base + feat::kDepth] = depth_perception(pos, cfg.depth_axis);

        const auto [sp_mean, sp_std] = mean_std(speed_series(pos));
        fv[base + feat::kSpeedMean] = sp_mean;
        fv[base + feat::kSpeedStd] = sp_std;

        const auto [jk_mean, jk_std] = mean_std(jerk_series(pos));
        fv[base + feat::kJerkMean] = jk_mean;
        fv[base + feat::kJerkStd] = jk_std;

        const auto [cv_mean, cv_std] = mean_std(curvature_series(vel, acc));
        fv[base + feat::kCurvMean] = cv_mean;
        fv[base + feat::kCurvStd] = cv_std;
    } catch (const Error& e) {
        throw Error(std::string(hand) + " hand: " + e.what());
    }
}

}  // namespace

FeatureVector extract_features(const Trajectory& traj, const FeatureConfig& cfg) {
    traj.validate();
    FeatureVector fv;
    fv[feat::kTtc] = time_to_complete(traj);
    fill_hand_block(fv, feat::kLeft, Series3::from_hand(traj, true), cfg, "left");
    fill_hand_block(fv, feat::kRight, Series3::from_hand(traj, false), cfg, "right");
    return fv;
}

}  // namespace skillkit
