#pragma once

#include "skillkit/types.hpp"

#include <Eigen/Core>

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace skillkit::testing {

/// Unique scratch directory removed on destruction.
class TempDir {
  public:
    TempDir() {
        static std::atomic<int> counter{0};
        const auto base = std::filesystem::temp_directory_path();
        path_ = base / ("skillkit_test_" + std::to_string(::getpid()) + "_" +
                        std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

  private:
    std::filesystem::path path_;
};

/// Deterministic doubles for test data; bit-stable across platforms.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double gaussian() {
        const double u1 = std::max(uniform(), 1e-300);
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    Eigen::MatrixXd matrix(Eigen::Index rows, Eigen::Index cols) {
        Eigen::MatrixXd m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = gaussian();
        return m;
    }

  private:
    std::mt19937_64 eng_;
};

/// Dataset of (surgeon, trial) keys with placeholder trajectories, for
/// fold-construction tests that never touch the kinematics.
inline Dataset dummy_dataset(const std::vector<std::pair<std::string, Skill>>& surgeons,
                             const std::vector<int>& trial_counts) {
    Dataset d;
    Trajectory traj;
    for (int i = 0; i < 8; ++i)
        traj.samples.push_back(Sample{Eigen::Vector3d(i, 0, 0), Eigen::Vector3d(0, i, 0)});
    for (std::size_t s = 0; s < surgeons.size(); ++s) {
        for (int t = 1; t <= trial_counts[s]; ++t) {
            TrialMeta meta;
            meta.surgeon_id = surgeons[s].first;
            meta.trial_index = t;
            meta.skill = surgeons[s].second;
            d.trials.emplace_back(meta, traj);
        }
    }
    return d;
}

}  // namespace skillkit::testing
