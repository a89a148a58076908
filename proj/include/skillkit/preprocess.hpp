#pragma once

#include "skillkit/types.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <vector>

namespace skillkit {

/// Uniformly sampled 3-D time series (positions, velocities, ...).
struct Series3 {
    std::vector<Eigen::Vector3d> values;
    double dt = 1.0 / 30.0;

    std::size_t size() const { return values.size(); }

    static Series3 from_hand(const Trajectory& traj, bool left_hand);
};

/// First-degree local regression with tricube weights, applied per
/// coordinate. The window is ceil(span * N) points, at least min_window,
/// centered on each sample and shifted inward at the boundaries. Output has
/// the same length and dt as the input. Constants and straight lines pass
/// through unchanged.
Series3 loess_smooth(const Series3& raw, double span, std::size_t min_window = 2);

/// Central differences at interior points, first-order one-sided at both
/// ends; same length as the input. Velocity = derivative(position),
/// acceleration = derivative(velocity), jerk = derivative(acceleration).
Series3 derivative(const Series3& s);

}  // namespace skillkit
