#include "skillkit/synth.hpp"

#include "skillkit/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace skillkit {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDt = 1.0 / 30.0;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// mt19937_64 is bit-exact across platforms; the mapping to doubles below is
/// fixed here so generated files stay byte-identical everywhere.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Symmetric bounded noise factor in [1 - spread, 1 + spread].
    double jitter(double spread) { return 1.0 + spread * uniform(-1.0, 1.0); }

    Eigen::Vector3d unit_vector() {
        const double z = uniform(-1.0, 1.0);
        const double phi = uniform(0.0, 2.0 * kPi);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        return {r * std::cos(phi), r * std::sin(phi), z};
    }

    /// Event times on [0, horizon) with exponential inter-arrival gaps.
    std::vector<double> poisson_times(double rate_per_s, double horizon) {
        std::vector<double> times;
        if (rate_per_s <= 0.0) return times;
        double t = 0.0;
        while (true) {
            const double u = std::max(uniform(), 1e-300);
            t += -std::log(u) / rate_per_s;
            if (t >= horizon) break;
            times.push_back(t);
        }
        return times;
    }

  private:
    std::mt19937_64 eng_;
};

/// Centripetal-free (uniform) Catmull-Rom point on segment [p1, p2].
Eigen::Vector3d catmull_rom(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1,
                            const Eigen::Vector3d& p2, const Eigen::Vector3d& p3,
                            double t) {
    const double t2 = t * t;
    const double t3 = t2 * t;
    return 0.5 * ((2.0 * p1) + (-p0 + p2) * t +
                  (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t2 +
                  (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * t3);
}

/// Arc-length lookup table over a densely sampled spline through waypoints.
class ArcPath {
  public:
    explicit ArcPath(const std::vector<Eigen::Vector3d>& waypoints) {
        if (waypoints.size() < 2) throw Error("base path needs at least 2 waypoints");
        const auto& w = waypoints;
        const int n_seg = static_cast<int>(w.size()) - 1;
        constexpr int kSteps = 64;
        points_.reserve(static_cast<std::size_t>(n_seg) * kSteps + 1);
        points_.push_back(w.front());
        for (int s = 0; s < n_seg; ++s) {
            const auto& p0 = w[static_cast<std::size_t>(std::max(s - 1, 0))];
            const auto& p1 = w[static_cast<std::size_t>(s)];
            const auto& p2 = w[static_cast<std::size_t>(s + 1)];
            const auto& p3 = w[std::min(static_cast<std::size_t>(s) + 2, w.size() - 1)];
            for (int i = 1; i <= kSteps; ++i)
                points_.push_back(catmull_rom(p0, p1, p2, p3, static_cast<double>(i) / kSteps));
        }
        cumlen_.resize(points_.size(), 0.0);
        for (std::size_t i = 1; i < points_.size(); ++i)
            cumlen_[i] = cumlen_[i - 1] + (points_[i] - points_[i - 1]).norm();
    }

    double length() const { return cumlen_.back(); }

    Eigen::Vector3d at(double s) const {
        s = std::clamp(s, 0.0, length());
        const auto it = std::lower_bound(cumlen_.begin(), cumlen_.end(), s);
        const std::size_t hi = std::min(static_cast<std::size_t>(it - cumlen_.begin()),
                                        points_.size() - 1);
        if (hi == 0) return points_.front();
        const std::size_t lo = hi - 1;
        const double seg = cumlen_[hi] - cumlen_[lo];
        const double f = seg > 0.0 ? (s - cumlen_[lo]) / seg : 0.0;
        return points_[lo] + f * (points_[hi] - points_[lo]);
    }

  private:
    std::vector<Eigen::Vector3d> points_;
    std::vector<double> cumlen_;
};

struct PauseSchedule {
    std::vector<double> starts;
    std::vector<double> durations;

    /// Speed multiplier: cosine dip to 5% of pace inside each pause.
    double factor(double t) const {
        for (std::size_t i = 0; i < starts.size(); ++i) {
            const double dt = t - starts[i];
            if (dt >= 0.0 && dt < durations[i]) {
                const double dip = 0.5 - 0.5 * std::cos(2.0 * kPi * dt / durations[i]);
                return 1.0 - 0.95 * dip;
            }
        }
        return 1.0;
    }
};

struct BurstSet {
    std::vector<double> centers;
    std::vector<double> widths;
    std::vector<Eigen::Vector3d> offsets;

    Eigen::Vector3d at(double t) const {
        Eigen::Vector3d sum = Eigen::Vector3d::Zero();
        for (std::size_t i = 0; i < centers.size(); ++i) {
            const double u = (t - centers[i]) / widths[i];
            sum += offsets[i] * std::exp(-0.5 * u * u);
        }
        return sum;
    }
};

struct Tremor {
    double amp = 0.0;
    double base_freq = 1.2;
    double phase[3][3] = {};  // [harmonic][axis]

    Eigen::Vector3d at(double t) const {
        static constexpr double kFreqScale[3] = {1.0, 1.7, 2.6};
        static constexpr double kWeight[3] = {0.6, 0.3, 0.1};
        Eigen::Vector3d v = Eigen::Vector3d::Zero();
        for (int h = 0; h < 3; ++h) {
            const double w = 2.0 * kPi * base_freq * kFreqScale[h];
            for (int a = 0; a < 3; ++a)
                v[a] += amp * kWeight[h] * std::sin(w * t + phase[h][a]);
        }
        return v;
    }
};

/// Slow drift away from the task path — the corrective detours of an
/// unsure hand. Low-frequency on purpose: it survives feature smoothing
/// and so shows up as extra path length and curvature.
struct Wander {
    double amp = 0.0;
    double phase[2][3] = {};  // [component][axis]

    Eigen::Vector3d at(double t) const {
        static constexpr double kFreq[2] = {0.25, 0.45};
        Eigen::Vector3d v = Eigen::Vector3d::Zero();
        for (int k = 0; k < 2; ++k) {
            const double w = 2.0 * kPi * kFreq[k];
            for (int a = 0; a < 3; ++a) v[a] += amp * std::sin(w * t + phase[k][a]);
        }
        return v;
    }
};

/// One hand's additive disturbances, drawn up-front for a fixed horizon.
struct HandNoise {
    Tremor tremor;
    BurstSet bursts;
    Wander wander;

    HandNoise(const MotionProfile& p, double horizon, double amp_scale, Rng& rng) {
        tremor.amp = p.tremor_amp * amp_scale;
        tremor.base_freq = p.tremor_freq_hz;
        for (auto& harmonic : tremor.phase)
            for (double& ph : harmonic) ph = rng.uniform(0.0, 2.0 * kPi);
        bursts.centers = rng.poisson_times(0.5 * p.jerkiness, horizon);
        for (double c : bursts.centers) {
            (void)c;
            bursts.widths.push_back(rng.uniform(0.25, 0.7));
            bursts.offsets.push_back(0.22 * p.jerkiness * amp_scale * rng.unit_vector());
        }
        wander.amp = 0.3 * p.jerkiness * amp_scale;
        for (auto& component : wander.phase)
            for (double& ph : component) ph = rng.uniform(0.0, 2.0 * kPi);
    }

    Eigen::Vector3d at(double t) const { return tremor.at(t) + bursts.at(t) + wander.at(t); }
};

}  // namespace

std::vector<Eigen::Vector3d> suture_loop_path(int n_throws) {
    if (n_throws < 1) throw Error("n_throws must be >= 1");
    std::vector<Eigen::Vector3d> w;
    w.emplace_back(0.0, 0.0, 0.0);
    for (int k = 0; k < n_throws; ++k) {
        const double cx = 2.0 + 4.0 * k;  // loop center along the wound line
        for (int i = 1; i <= 8; ++i) {
            const double a = 2.0 * kPi * i / 8.0;
            w.emplace_back(cx + 1.8 * std::sin(a), 1.6 * std::sin(2.0 * a) * 0.5,
                           -1.4 * (1.0 - std::cos(a)) * 0.5 - 0.2 * k);
        }
    }
    return w;
}

Trajectory gen_trajectory(const MotionProfile& profile) {
    if (profile.pace <= 0.0) throw Error("pace must be positive");
    const ArcPath path(profile.base_path);

    // Assist path: the dominant-hand curve shrunk about its centroid and
    // shifted, mimicking a steadying second instrument.
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (const auto& p : profile.base_path) centroid += p;
    centroid /= static_cast<double>(profile.base_path.size());
    std::vector<Eigen::Vector3d> assist_pts;
    assist_pts.reserve(profile.base_path.size());
    const Eigen::Vector3d assist_offset(-3.0, 1.5, 0.3);
    for (const auto& p : profile.base_path)
        assist_pts.push_back(centroid + 0.5 * (p - centroid) + assist_offset);
    const ArcPath assist(assist_pts);

    Rng rng(splitmix64(profile.seed));
    // Horizon with slack: pauses and wobble stretch the nominal duration.
    const double horizon = 3.0 * path.length() / profile.pace + 10.0;

    PauseSchedule pauses;
    pauses.starts = rng.poisson_times(profile.pause_rate / 60.0, horizon);
    for (double s : pauses.starts) {
        (void)s;
        pauses.durations.push_back(rng.uniform(0.4, 1.0));
    }
    const double wobble_phase = rng.uniform(0.0, 2.0 * kPi);
    const HandNoise right_noise(profile, horizon, 1.0, rng);
    const HandNoise left_noise(profile, horizon, 0.8, rng);

    Trajectory traj;
    traj.sample_rate_hz = 30.0;
    double s = 0.0;
    const double total = path.length();
    const double assist_scale = assist.length() / total;
    for (int i = 0;; ++i) {
        const double t = i * kDt;
        traj.samples.push_back(Sample{assist.at(s * assist_scale) + left_noise.at(t),
                                      path.at(s) + right_noise.at(t)});
        if (s >= total && traj.samples.size() >= 8) break;
        if (t > horizon) break;  // safety net; pauses cannot stall forever
        const double wobble =
            1.0 + 0.02 * profile.jerkiness * std::sin(2.0 * kPi * 0.8 * t + wobble_phase);
        s += profile.pace * wobble * pauses.factor(t) * kDt;
    }
    traj.validate();
    return traj;
}

namespace {

struct Archetype {
    double tremor;
    double jerkiness;
    double pace;
    double pause_rate;
};

Archetype lerp(const Archetype& a, const Archetype& b, double f) {
    return {a.tremor + f * (b.tremor - a.tremor),
            a.jerkiness + f * (b.jerkiness - a.jerkiness),
            a.pace + f * (b.pace - a.pace),
            a.pause_rate + f * (b.pause_rate - a.pause_rate)};
}

}  // namespace

Population gen_population(const PopulationParams& params) {
    if (params.n_experts < 0 || params.n_novices < 0 ||
        params.n_experts + params.n_novices < 1)
        throw Error("population needs at least one surgeon");
    if (params.trials_per_surgeon < 1) throw Error("trials_per_surgeon must be >= 1");
    if (params.separation < 0.0 || params.separation > 1.0)
        throw Error("separation must be in [0, 1]");

    const Archetype expert{0.02, 0.2, 5.0, 0.3};
    const Archetype novice_full{0.30, 3.0, 3.0, 6.0};
    const auto waypoints = suture_loop_path(4);

    Population pop;
    const int total_surgeons = params.n_experts + params.n_novices;
    for (int si = 0; si < total_surgeons; ++si) {
        const bool is_expert = si < params.n_experts;
        const Skill skill = is_expert ? Skill::Expert : Skill::Novice;
        const Archetype arch =
            is_expert ? expert : lerp(expert, novice_full, params.separation);
        const int class_ordinal = is_expert ? si + 1 : si - params.n_experts + 1;
        char id[16];
        std::snprintf(id, sizeof(id), "%c%d", is_expert ? 'E' : 'N', class_ordinal);

        const std::uint64_t surgeon_seed =
            splitmix64(params.seed ^ splitmix64(static_cast<std::uint64_t>(si) + 1));
        Rng srng(surgeon_seed);
        Archetype who{arch.tremor * srng.jitter(0.10), arch.jerkiness * srng.jitter(0.10),
                      arch.pace * srng.jitter(0.05), arch.pause_rate * srng.jitter(0.20)};

        for (int ti = 1; ti <= params.trials_per_surgeon; ++ti) {
            const std::uint64_t trial_seed =
                splitmix64(surgeon_seed ^ splitmix64(static_cast<std::uint64_t>(ti)));
            Rng trng(trial_seed);
            MotionProfile prof;
            prof.base_path = waypoints;
            prof.tremor_amp = who.tremor * trng.jitter(0.08);
            prof.jerkiness = who.jerkiness * trng.jitter(0.08);
            prof.pace = who.pace * trng.jitter(0.04);
            prof.pause_rate = who.pause_rate * trng.jitter(0.12);
            prof.seed = trial_seed;

            TrialMeta meta;
            meta.surgeon_id = id;
            meta.trial_index = ti;
            meta.skill = skill;
            meta.source_path = std::string(id) + "_T" + std::to_string(ti) + ".csv";
            pop.dataset.trials.emplace_back(meta, gen_trajectory(prof));
            pop.manifest += meta.surgeon_id + "," + std::to_string(ti) + "," +
                            to_string(skill) + "," + meta.source_path + "\n";
        }
    }
    return pop;
}

std::filesystem::path write_population(const std::filesystem::path& out_dir,
                                       const PopulationParams& params) {
    const Population pop = gen_population(params);
    std::filesystem::create_directories(out_dir);
    for (const auto& [meta, traj] : pop.dataset.trials)
        write_text_file(out_dir / meta.source_path, trajectory_to_csv(traj));
    const auto manifest_path = out_dir / "manifest.csv";
    write_text_file(manifest_path, pop.manifest);
    return manifest_path;
}

}  // namespace skillkit
