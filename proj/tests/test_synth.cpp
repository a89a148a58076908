#include "skillkit/synth.hpp"

#include "skillkit/features.hpp"
#include "skillkit/ingest.hpp"
#include "skillkit/util.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

using namespace skillkit;

namespace {

MotionProfile clean_profile(std::uint64_t seed = 0) {
    MotionProfile p;
    p.base_path = {{0, 0, 0}, {10, 0, 0}, {20, 0, 0}};
    p.tremor_amp = 0.0;
    p.jerkiness = 0.0;
    p.pause_rate = 0.0;
    p.pace = 5.0;
    p.seed = seed;
    return p;
}

}  // namespace

TEST_CASE("same profile and seed give byte-identical trajectories") {
    MotionProfile p = clean_profile(123);
    p.tremor_amp = 0.1;
    p.jerkiness = 1.0;
    p.pause_rate = 3.0;
    const Trajectory a = gen_trajectory(p);
    const Trajectory b = gen_trajectory(p);
    CHECK(trajectory_to_csv(a) == trajectory_to_csv(b));

    p.seed = 124;
    const Trajectory c = gen_trajectory(p);
    CHECK(trajectory_to_csv(a) != trajectory_to_csv(c));
}

TEST_CASE("trajectories run at 30 Hz with two distinct hands") {
    const Trajectory t = gen_trajectory(clean_profile());
    CHECK(t.sample_rate_hz == doctest::Approx(30.0));
    CHECK(t.samples.size() >= 8);

    bool hands_differ = false;
    for (const auto& s : t.samples) {
        if ((s.left - s.right).norm() > 1e-6) hands_differ = true;
    }
    CHECK(hands_differ);
}

TEST_CASE("a clean profile on a straight path moves smoothly") {
    const Trajectory t = gen_trajectory(clean_profile());
    const FeatureVector fv = extract_features(t);

    // No tremor, no bursts, no pauses: near-constant velocity along a line.
    CHECK(fv[feat::kRight + feat::kJerkMean] < 1e-6);
    CHECK(fv[feat::kRight + feat::kCurvMean] < 1e-6);
    CHECK(fv[feat::kRight + feat::kSpeedStd] < 1e-3);
    CHECK(fv[feat::kRight + feat::kSpeedMean] == doctest::Approx(5.0).epsilon(0.02));

    // Path length approximates the 20 cm base path.
    CHECK(fv[feat::kRight + feat::kPathLength] == doctest::Approx(20.0).epsilon(0.05));
}

TEST_CASE("pace controls duration on a fixed path") {
    MotionProfile slow = clean_profile();
    slow.pace = 2.5;
    MotionProfile fast = clean_profile();
    fast.pace = 10.0;
    const auto n_slow = gen_trajectory(slow).samples.size();
    const auto n_fast = gen_trajectory(fast).samples.size();
    CHECK(n_slow > 2 * n_fast);
}

TEST_CASE("shaky profiles travel farther and jerk more on the same path") {
    // Identical task and pace; only hand quality differs.
    const auto path = suture_loop_path(4);
    int pl_wins = 0, jerk_wins = 0;
    const int reps = 30;
    for (int i = 0; i < reps; ++i) {
        MotionProfile steady;
        steady.base_path = path;
        steady.tremor_amp = 0.02;
        steady.jerkiness = 0.2;
        steady.seed = 100 + static_cast<std::uint64_t>(i);

        MotionProfile shaky;
        shaky.base_path = path;
        shaky.tremor_amp = 0.2;
        shaky.jerkiness = 2.0;
        shaky.seed = 300 + static_cast<std::uint64_t>(i);

        const FeatureVector fs = extract_features(gen_trajectory(steady));
        const FeatureVector fn = extract_features(gen_trajectory(shaky));
        if (fn[feat::kRight + feat::kPathLength] > fs[feat::kRight + feat::kPathLength]) ++pl_wins;
        if (fn[feat::kRight + feat::kJerkMean] > fs[feat::kRight + feat::kJerkMean]) ++jerk_wins;
    }
    CHECK(pl_wins == reps);
    CHECK(jerk_wins == reps);
}

TEST_CASE("more jerkiness means more measured jerk, usually") {
    const auto path = suture_loop_path(3);
    int wins = 0;
    const int reps = 30;
    for (int i = 0; i < reps; ++i) {
        MotionProfile lo;
        lo.base_path = path;
        lo.jerkiness = 0.5;
        lo.seed = 500 + static_cast<std::uint64_t>(i);
        MotionProfile hi = lo;
        hi.jerkiness = 1.5;
        hi.seed = 900 + static_cast<std::uint64_t>(i);

        const double jl = extract_features(gen_trajectory(lo))[feat::kRight + feat::kJerkMean];
        const double jh = extract_features(gen_trajectory(hi))[feat::kRight + feat::kJerkMean];
        if (jh > jl) ++wins;
    }
    CHECK(wins >= 24);  // random bursts overlap occasionally
}

TEST_CASE("suture path spans several throws") {
    const auto p3 = suture_loop_path(3);
    const auto p5 = suture_loop_path(5);
    CHECK(p3.size() >= 6);
    CHECK(p5.size() > p3.size());
    CHECK_THROWS_AS(suture_loop_path(0), Error);
}

TEST_CASE("population has the requested shape and manifest") {
    PopulationParams params;
    params.n_experts = 4;
    params.n_novices = 4;
    params.trials_per_surgeon = 5;
    params.separation = 1.0;
    params.seed = 3;
    const Population pop = gen_population(params);

    REQUIRE(pop.dataset.trials.size() == 40);
    const auto lines = split_lines(pop.manifest);
    REQUIRE(lines.size() == 40);

    std::map<std::string, std::vector<int>> trials_by_surgeon;
    std::map<std::string, Skill> skill_by_surgeon;
    for (const auto& [meta, traj] : pop.dataset.trials) {
        trials_by_surgeon[meta.surgeon_id].push_back(meta.trial_index);
        skill_by_surgeon[meta.surgeon_id] = meta.skill;
        CHECK(traj.samples.size() >= 8);
    }
    REQUIRE(trials_by_surgeon.size() == 8);
    int experts = 0, novices = 0;
    for (const auto& [id, skill] : skill_by_surgeon) {
        if (skill == Skill::Expert) {
            ++experts;
            CHECK(id.front() == 'E');
        } else {
            ++novices;
            CHECK(id.front() == 'N');
        }
    }
    CHECK(experts == 4);
    CHECK(novices == 4);
    for (const auto& [id, ordinals] : trials_by_surgeon) {
        CHECK(ordinals == std::vector<int>{1, 2, 3, 4, 5});
    }

    // The manifest parses back to the same metadata.
    const auto metas = parse_manifest(pop.manifest);
    REQUIRE(metas.size() == 40);
    for (std::size_t i = 0; i < metas.size(); ++i) {
        CHECK(metas[i].surgeon_id == pop.dataset.trials[i].first.surgeon_id);
        CHECK(metas[i].trial_index == pop.dataset.trials[i].first.trial_index);
        CHECK(metas[i].skill == pop.dataset.trials[i].first.skill);
        CHECK(metas[i].source_path == pop.dataset.trials[i].first.source_path);
    }
}

TEST_CASE("surgeons are more self-consistent than their class") {
    PopulationParams params;
    params.n_experts = 0;
    params.n_novices = 6;
    params.trials_per_surgeon = 4;
    params.separation = 1.0;
    params.seed = 11;
    const Population pop = gen_population(params);

    // Compare spread of a scale feature within surgeons vs across the class.
    std::map<std::string, std::vector<double>> by_surgeon;
    std::vector<double> all;
    for (const auto& [meta, traj] : pop.dataset.trials) {
        const double pl = extract_features(traj)[feat::kRight + feat::kPathLength];
        by_surgeon[meta.surgeon_id].push_back(pl);
        all.push_back(pl);
    }
    auto stddev = [](const std::vector<double>& v) {
        double m = 0;
        for (double x : v) m += x;
        m /= static_cast<double>(v.size());
        double s = 0;
        for (double x : v) s += (x - m) * (x - m);
        return std::sqrt(s / static_cast<double>(v.size()));
    };
    double within = 0;
    for (const auto& [id, vals] : by_surgeon) within += stddev(vals);
    within /= static_cast<double>(by_surgeon.size());
    CHECK(within < stddev(all));
}

TEST_CASE("separation zero collapses the class archetypes") {
    PopulationParams params;
    params.n_experts = 1;
    params.n_novices = 1;
    params.trials_per_surgeon = 1;
    params.separation = 0.0;
    params.seed = 4;
    const Population pop = gen_population(params);
    REQUIRE(pop.dataset.trials.size() == 2);

    // With identical archetypes the two classes differ only by seeded jitter,
    // so their features sit in the same ballpark (well under the 10x gap a
    // fully separated novice shows in path length).
    const double ple = extract_features(pop.dataset.trials[0].second)[feat::kRight + feat::kPathLength];
    const double pln = extract_features(pop.dataset.trials[1].second)[feat::kRight + feat::kPathLength];
    CHECK(pln < 1.5 * ple);
    CHECK(ple < 1.5 * pln);
}

TEST_CASE("write_population round-trips through the loader byte-exactly") {
    testing::TempDir dir;
    PopulationParams params;
    params.n_experts = 2;
    params.n_novices = 2;
    params.trials_per_surgeon = 2;
    params.separation = 0.7;
    params.seed = 8;

    const auto manifest_path = write_population(dir.path(), params);
    CHECK(manifest_path.filename() == "manifest.csv");
    REQUIRE(std::filesystem::exists(manifest_path));

    // 8 trajectory files + the manifest.
    std::size_t files = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir.path())) {
        if (e.is_regular_file()) ++files;
    }
    CHECK(files == 9);

    const Dataset loaded = load_dataset(dir.path(), manifest_path);
    const Population pop = gen_population(params);
    REQUIRE(loaded.trials.size() == pop.dataset.trials.size());
    for (std::size_t i = 0; i < loaded.trials.size(); ++i) {
        CHECK(loaded.trials[i].first.surgeon_id == pop.dataset.trials[i].first.surgeon_id);
        CHECK(trajectory_to_csv(loaded.trials[i].second) ==
              trajectory_to_csv(pop.dataset.trials[i].second));
    }
}

TEST_CASE("writing the same population twice produces identical files") {
    testing::TempDir a, b;
    PopulationParams params;
    params.n_experts = 1;
    params.n_novices = 1;
    params.trials_per_surgeon = 2;
    params.seed = 19;
    write_population(a.path(), params);
    write_population(b.path(), params);

    for (const auto& e : std::filesystem::directory_iterator(a.path())) {
        const auto name = e.path().filename();
        CHECK(read_text_file(a / name.string()) == read_text_file(b / name.string()));
    }
}

TEST_CASE("generator inputs are validated") {
    MotionProfile p = clean_profile();
    p.base_path = {{0, 0, 0}};
    CHECK_THROWS_AS(gen_trajectory(p), Error);

    p = clean_profile();
    p.pace = 0.0;
    CHECK_THROWS_AS(gen_trajectory(p), Error);
    p.pace = -1.0;
    CHECK_THROWS_AS(gen_trajectory(p), Error);

    PopulationParams params;
    params.separation = 1.5;
    CHECK_THROWS_AS(gen_population(params), Error);
    params.separation = -0.1;
    CHECK_THROWS_AS(gen_population(params), Error);

    params = PopulationParams{};
    params.trials_per_surgeon = 0;
    CHECK_THROWS_AS(gen_population(params), Error);

    params = PopulationParams{};
    params.n_experts = 0;
    params.n_novices = 0;
    CHECK_THROWS_AS(gen_population(params), Error);
}
