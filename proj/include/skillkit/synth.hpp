#pragma once

#include "skillkit/types.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace skillkit {

/// Knobs describing how one (simulated) surgeon moves. Experts get low
/// tremor/jerkiness, a steady pace and few pauses; novices the opposite.
struct MotionProfile {
    std::vector<Eigen::Vector3d> base_path;  // waypoints of the task curve
    double tremor_amp = 0.0;                 // cm, slow hand oscillation
    double tremor_freq_hz = 1.2;
    double jerkiness = 0.0;                  // drives bursts and pace wobble
    double pace = 5.0;                       // cm/s along the base path
    double pause_rate = 0.0;                 // pauses per minute
    std::uint64_t seed = 0;
};

/// Waypoints of a suture-like task: n_throws successive loops advancing in
/// x and dipping in z.
std::vector<Eigen::Vector3d> suture_loop_path(int n_throws = 4);

/// Deterministic 30 Hz two-hand trajectory: the right (dominant) hand walks
/// the base path at the profile's pace, the left follows a scaled offset
/// assist path; tremor, acceleration bursts and pauses are layered on top.
Trajectory gen_trajectory(const MotionProfile& profile);

struct PopulationParams {
    int n_experts = 4;
    int n_novices = 4;
    int trials_per_surgeon = 5;
    double separation = 1.0;  // 0 = identical archetypes, 1 = disjoint
    std::uint64_t seed = 0;
};

struct Population {
    Dataset dataset;
    std::string manifest;  // ingest's manifest format, one line per trial
};

/// Per-surgeon profiles drawn around class archetypes; one surgeon's trials
/// share a profile plus small per-trial noise, so surgeons are more
/// self-consistent than their class. Deterministic in (params, seed).
Population gen_population(const PopulationParams& params);

/// Writes the population's trajectory CSVs plus "manifest.csv" under
/// out_dir, ready for load_dataset. Returns the manifest path.
std::filesystem::path write_population(const std::filesystem::path& out_dir,
                                       const PopulationParams& params);

}  // namespace skillkit
