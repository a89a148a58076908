#pragma once

#include "skillkit/preprocess.hpp"
#include "skillkit/types.hpp"

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace skillkit {

/// The 17 per-trial movement features, in canonical order: time to complete,
/// then per hand (left first): path length, depth perception, speed mean/std,
/// jerk mean/std, curvature mean/std.
struct FeatureVector {
    static constexpr std::size_t kCount = 17;

    std::array<double, kCount> values{};

    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }

    static const std::array<std::string, kCount>& names();

    /// Comma-joined canonical names.
    static std::string csv_header();

    /// Comma-joined values, shortest-round-trip formatting.
    std::string csv_row() const;
};

/// Canonical indices into FeatureVector::values.
namespace feat {
inline constexpr std::size_t kTtc = 0;
inline constexpr std::size_t kLeft = 1;    // start of the left-hand block
inline constexpr std::size_t kRight = 9;   // start of the right-hand block
// Offsets within a hand block:
inline constexpr std::size_t kPathLength = 0;
inline constexpr std::size_t kDepth = 1;
inline constexpr std::size_t kSpeedMean = 2;
inline constexpr std::size_t kSpeedStd = 3;
inline constexpr std::size_t kJerkMean = 4;
inline constexpr std::size_t kJerkStd = 5;
inline constexpr std::size_t kCurvMean = 6;
inline constexpr std::size_t kCurvStd = 7;
}  // namespace feat

struct FeatureConfig {
    double smoothing_span = 0.05;
    std::size_t min_smooth_window = 5;
    Eigen::Vector3d depth_axis{0.0, 0.0, 1.0};
};

/// (N - 1) / sample_rate_hz, in seconds.
double time_to_complete(const Trajectory& traj);

/// Sum of consecutive-pair Euclidean distances, in cm.
double path_length(const Series3& points);

/// Total distance traveled along the given unit axis: sum of |step . axis|.
/// The axis must have unit norm within 1e-9.
double depth_perception(const Series3& points, const Eigen::Vector3d& axis);

/// Forward-difference speed |p_i - p_{i-1}| / dt for i = 1..N-1 (length N-1).
std::vector<double> speed_series(const Series3& points);

/// Euclidean norm of the third position derivative at every sample.
std::vector<double> jerk_series(const Series3& points);

/// kappa_i = |v_i x a_i| / max(|v_i|^3, 1e-9); never negative, zero on
/// straight segments.
std::vector<double> curvature_series(const Series3& v, const Series3& a);

/// Smooths each hand independently, then assembles the 17 features.
FeatureVector extract_features(const Trajectory& traj, const FeatureConfig& cfg = {});

/// Mean and sample standard deviation (n-1 denominator; zero when n < 2).
std::pair<double, double> mean_std(const std::vector<double>& xs);

}  // namespace skillkit
