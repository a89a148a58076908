#include "skillkit/validate.hpp"

#include "skillkit/features.hpp"
#include "skillkit/pipeline.hpp"
#include "skillkit/synth.hpp"
#include "skillkit/util.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <vector>

using namespace skillkit;

namespace {

Dataset eight_by_five() {
    std::vector<std::pair<std::string, Skill>> surgeons;
    for (int i = 1; i <= 4; ++i) surgeons.emplace_back("E" + std::to_string(i), Skill::Expert);
    for (int i = 1; i <= 4; ++i) surgeons.emplace_back("N" + std::to_string(i), Skill::Novice);
    return testing::dummy_dataset(surgeons, std::vector<int>(8, 5));
}

// Every fold must split the dataset exactly in two: no index lost, none
// duplicated, and never on both sides at once.
void check_partition(const FoldPlan& plan, std::size_t n_trials) {
    for (const Fold& fold : plan.folds) {
        std::vector<std::size_t> all = fold.train;
        all.insert(all.end(), fold.test.begin(), fold.test.end());
        std::sort(all.begin(), all.end());
        REQUIRE(all.size() == n_trials);
        for (std::size_t i = 0; i < n_trials; ++i) CHECK(all[i] == i);

        std::set<std::size_t> train_set(fold.train.begin(), fold.train.end());
        for (std::size_t i : fold.test) CHECK(train_set.count(i) == 0);
    }
}

}  // namespace

TEST_CASE("LOSO on a full 8x5 dataset gives five balanced folds") {
    const Dataset d = eight_by_five();
    const FoldPlan plan = make_folds(d, Scheme::LOSO);

    CHECK(plan.scheme == Scheme::LOSO);
    REQUIRE(plan.folds.size() == 5);
    for (std::size_t t = 0; t < 5; ++t) {
        const Fold& fold = plan.folds[t];
        CHECK(fold.label == "trial " + std::to_string(t + 1));
        CHECK(fold.test.size() == 8);
        CHECK(fold.train.size() == 32);
        CHECK_FALSE(fold.degenerate);
        // Each fold tests the t-th trial of every surgeon.
        for (std::size_t i : fold.test) {
            CHECK(d.trials[i].first.trial_index == static_cast<int>(t + 1));
        }
    }
    check_partition(plan, d.trials.size());

    // Each trial index lands in the test side of exactly one fold.
    std::vector<int> seen(d.trials.size(), 0);
    for (const Fold& fold : plan.folds) {
        for (std::size_t i : fold.test) ++seen[i];
    }
    for (int c : seen) CHECK(c == 1);
}

TEST_CASE("LOSO with unequal trial counts shrinks later folds") {
    const Dataset d = testing::dummy_dataset(
        {{"A", Skill::Expert}, {"B", Skill::Novice}, {"C", Skill::Novice}}, {5, 5, 4});
    const FoldPlan plan = make_folds(d, Scheme::LOSO);

    REQUIRE(plan.folds.size() == 5);
    for (std::size_t t = 0; t < 4; ++t) CHECK(plan.folds[t].test.size() == 3);
    CHECK(plan.folds[4].test.size() == 2);  // C has no fifth trial
    CHECK(plan.folds[4].train.size() == 12);
    check_partition(plan, d.trials.size());

    // The short surgeon is absent from the last fold's test side.
    for (std::size_t i : plan.folds[4].test) {
        CHECK(d.trials[i].first.surgeon_id != "C");
    }
}

TEST_CASE("LOUO gives one fold per surgeon holding out all their trials") {
    const Dataset d = eight_by_five();
    const FoldPlan plan = make_folds(d, Scheme::LOUO);

    REQUIRE(plan.folds.size() == 8);
    const std::vector<std::string> ids = {"E1", "E2", "E3", "E4", "N1", "N2", "N3", "N4"};
    for (std::size_t s = 0; s < 8; ++s) {
        const Fold& fold = plan.folds[s];
        CHECK(fold.label == "surgeon " + ids[s]);
        CHECK(fold.test.size() == 5);
        CHECK(fold.train.size() == 35);
        CHECK_FALSE(fold.degenerate);
        for (std::size_t i : fold.test) CHECK(d.trials[i].first.surgeon_id == ids[s]);
        for (std::size_t i : fold.train) CHECK(d.trials[i].first.surgeon_id != ids[s]);
    }
    check_partition(plan, d.trials.size());
}

TEST_CASE("fold construction rejects unusable datasets") {
    const Dataset single = testing::dummy_dataset({{"A", Skill::Expert}}, {5});
    CHECK_THROWS_AS(make_folds(single, Scheme::LOUO), Error);

    const Dataset singles = testing::dummy_dataset(
        {{"A", Skill::Expert}, {"B", Skill::Novice}}, {1, 1});
    CHECK_THROWS_AS(make_folds(singles, Scheme::LOSO), Error);

    CHECK_THROWS_AS(make_folds(Dataset{}, Scheme::LOSO), Error);
    CHECK_THROWS_AS(make_folds(Dataset{}, Scheme::LOUO), Error);
}

TEST_CASE("LOUO with one surgeon per class marks every fold degenerate") {
    const Dataset d = testing::dummy_dataset(
        {{"A", Skill::Expert}, {"B", Skill::Novice}}, {3, 3});
    const FoldPlan plan = make_folds(d, Scheme::LOUO);

    REQUIRE(plan.folds.size() == 2);
    // Holding out either surgeon leaves a single-class training set.
    CHECK(plan.folds[0].degenerate);
    CHECK(plan.folds[1].degenerate);

    PipelineConfig cfg;
    const EvalReport report = run_eval(d, Scheme::LOUO, cfg);
    REQUIRE(report.folds.size() == 2);
    CHECK(report.folds[0].degenerate);
    CHECK(report.folds[1].degenerate);
    REQUIRE(report.warnings.size() == 2);
    for (const auto& w : report.warnings) {
        CHECK(w.find("degenerate") != std::string::npos);
    }
    // Degenerate folds contribute no predictions.
    CHECK(report.confusion.novice_total == 0);
    CHECK(report.confusion.expert_total == 0);

    const std::string table = render_report(report, ReportFormat::Table);
    CHECK(table.find("degenerate (excluded)") != std::string::npos);
    CHECK(table.find("Warnings:") != std::string::npos);
}

TEST_CASE("run_eval separates a strongly split synthetic population") {
    PopulationParams params;
    params.n_experts = 4;
    params.n_novices = 4;
    params.trials_per_surgeon = 5;
    params.separation = 1.0;
    params.seed = 42;
    const Dataset d = gen_population(params).dataset;

    PipelineConfig cfg;
    const EvalReport report = run_eval(d, Scheme::LOSO, cfg);

    CHECK(report.scheme == Scheme::LOSO);
    CHECK(report.classifier == ClassifierKind::Lr);
    REQUIRE(report.folds.size() == 5);
    CHECK(report.confusion.novice_total == 20);
    CHECK(report.confusion.expert_total == 20);
    CHECK(report.overall_acc() == doctest::Approx(1.0));
    CHECK(report.novice_acc() == doctest::Approx(1.0));
    CHECK(report.expert_acc() == doctest::Approx(1.0));
    CHECK(report.warnings.empty());

    // The echoed config reflects the scheme actually evaluated.
    CHECK(report.config_echo.at("scheme").get<std::string>() == "loso");
}

TEST_CASE("each fold's result is reproducible from its training rows alone") {
    PopulationParams params;
    params.n_experts = 3;
    params.n_novices = 3;
    params.trials_per_surgeon = 4;
    params.separation = 0.6;
    params.seed = 9;
    const Dataset d = gen_population(params).dataset;

    PipelineConfig cfg;
    const EvalReport report = run_eval(d, Scheme::LOUO, cfg);
    const FoldPlan plan = make_folds(d, Scheme::LOUO);
    REQUIRE(report.folds.size() == plan.folds.size());

    std::vector<FeatureVector> features;
    for (const auto& [meta, traj] : d.trials) {
        features.push_back(extract_features(traj, cfg.features));
    }

    for (std::size_t f = 0; f < plan.folds.size(); ++f) {
        const Fold& fold = plan.folds[f];
        REQUIRE_FALSE(fold.degenerate);

        // Refit independently on exactly the training indices; the fold's
        // correct-count must match, proving no test trial leaked into the fit.
        Eigen::MatrixXd X(static_cast<Eigen::Index>(fold.train.size()), FeatureVector::kCount);
        std::vector<Skill> y;
        for (std::size_t r = 0; r < fold.train.size(); ++r) {
            for (std::size_t c = 0; c < FeatureVector::kCount; ++c) {
                X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    features[fold.train[r]][c];
            }
            y.push_back(d.trials[fold.train[r]].first.skill);
        }
        const PipelineModel model = fit_pipeline(X, y, cfg);

        std::size_t correct = 0;
        for (std::size_t i : fold.test) {
            if (predict(model, features[i]) == d.trials[i].first.skill) ++correct;
        }
        CHECK(report.folds[f].correct == correct);
        CHECK(report.folds[f].test_size == fold.test.size());
    }

    // Pooled confusion counts are the sum over non-degenerate folds.
    std::size_t fold_correct = 0, fold_total = 0;
    for (const auto& fr : report.folds) {
        fold_correct += fr.correct;
        fold_total += fr.test_size;
    }
    CHECK(report.confusion.novice_correct + report.confusion.expert_correct == fold_correct);
    CHECK(report.confusion.novice_total + report.confusion.expert_total == fold_total);
}

TEST_CASE("permuting the labels drops accuracy to chance") {
    PopulationParams params;
    params.n_experts = 4;
    params.n_novices = 4;
    params.trials_per_surgeon = 5;
    params.separation = 1.0;
    params.seed = 5;
    Dataset d = gen_population(params).dataset;

    std::vector<Skill> labels;
    for (const auto& [meta, traj] : d.trials) labels.push_back(meta.skill);

    std::mt19937_64 eng(12345);
    double total = 0.0;
    const int reps = 20;
    for (int rep = 0; rep < reps; ++rep) {
        std::shuffle(labels.begin(), labels.end(), eng);
        for (std::size_t i = 0; i < d.trials.size(); ++i) {
            d.trials[i].first.skill = labels[i];
        }
        PipelineConfig cfg;
        total += run_eval(d, Scheme::LOSO, cfg).overall_acc();
    }
    const double mean = total / reps;
    CHECK(mean > 0.3);
    CHECK(mean < 0.7);
}

TEST_CASE("accuracy arithmetic follows the confusion counts") {
    EvalReport r;
    r.confusion.novice_total = 7;
    r.confusion.novice_correct = 6;
    r.confusion.expert_total = 7;
    r.confusion.expert_correct = 7;
    CHECK(r.novice_acc() == doctest::Approx(6.0 / 7.0));
    CHECK(r.expert_acc() == doctest::Approx(1.0));
    CHECK(r.overall_acc() == doctest::Approx(13.0 / 14.0));

    FoldResult fr;
    fr.test_size = 8;
    fr.correct = 6;
    CHECK(fr.accuracy() == doctest::Approx(0.75));
    CHECK(FoldResult{}.accuracy() == 0.0);
}

TEST_CASE("table rendering shows rounded percentages and counts") {
    EvalReport r;
    r.scheme = Scheme::LOUO;
    r.classifier = ClassifierKind::Svm;
    r.confusion = {7, 6, 7, 7};
    FoldResult fr;
    fr.label = "surgeon X";
    fr.test_size = 7;
    fr.correct = 6;
    r.folds.push_back(fr);
    r.config_echo = PipelineConfig{}.to_json();

    const std::string table = render_report(r, ReportFormat::Table);
    CHECK(table.find("scheme louo") != std::string::npos);
    CHECK(table.find("classifier svm") != std::string::npos);
    CHECK(table.find("Novices  85.7%  (6/7)") != std::string::npos);
    CHECK(table.find("Experts  100.0%  (7/7)") != std::string::npos);
    CHECK(table.find("Overall  92.9%  (13/14)") != std::string::npos);
    CHECK(table.find("surgeon X  85.7%  (6/7)") != std::string::npos);
    CHECK(table.find("Warnings:") == std::string::npos);
}

TEST_CASE("CSV rendering has one row per fold plus three aggregates") {
    EvalReport r;
    r.confusion = {4, 3, 4, 4};
    FoldResult ok;
    ok.label = "trial 1";
    ok.test_size = 8;
    ok.correct = 7;
    r.folds.push_back(ok);
    FoldResult bad;
    bad.label = "trial 2";
    bad.degenerate = true;
    r.folds.push_back(bad);
    r.config_echo = PipelineConfig{}.to_json();

    const std::string csv = render_report(r, ReportFormat::Csv);
    const auto lines = split_lines(csv);
    REQUIRE(lines.size() == 6);
    CHECK(lines[0] == "row_type,label,n,correct,accuracy");
    CHECK(lines[1] == "fold,trial 1,8,7,0.875");
    CHECK(lines[2] == "fold,trial 2,0,0,degenerate");
    CHECK(lines[3] == "aggregate,novices,4,3,0.75");
    CHECK(lines[4] == "aggregate,experts,4,4,1");
    CHECK(lines[5] == "aggregate,overall,8,7,0.875");
}

TEST_CASE("JSON report round-trips to an equal in-memory report") {
    PopulationParams params;
    params.n_experts = 3;
    params.n_novices = 3;
    params.trials_per_surgeon = 3;
    params.separation = 0.8;
    params.seed = 21;
    const Dataset d = gen_population(params).dataset;

    PipelineConfig cfg;
    cfg.classifier = ClassifierKind::Svm;
    const EvalReport report = run_eval(d, Scheme::LOSO, cfg);

    const std::string text = render_report(report, ReportFormat::Json);
    const EvalReport back = report_from_json(text);
    CHECK(back == report);

    // Structured fields present with the documented names.
    const auto j = nlohmann::json::parse(text);
    CHECK(j.at("schema_version").get<int>() == 1);
    CHECK(j.at("accuracy").contains("overall"));
    CHECK(j.at("confusion").contains("novice_correct"));
    CHECK(j.at("folds").is_array());
    CHECK(j.at("config").at("classifier").get<std::string>() == "svm");
}

TEST_CASE("reports from unsupported schema versions are rejected") {
    nlohmann::json j;
    j["schema_version"] = 999;
    CHECK_THROWS_AS(report_from_json(j.dump()), Error);
}

TEST_CASE("repeated evaluation renders byte-identical reports") {
    PopulationParams params;
    params.n_experts = 3;
    params.n_novices = 3;
    params.trials_per_surgeon = 3;
    params.separation = 0.5;
    params.seed = 77;
    const Dataset d = gen_population(params).dataset;

    PipelineConfig cfg;
    const std::string a = render_report(run_eval(d, Scheme::LOUO, cfg), ReportFormat::Json);
    const std::string b = render_report(run_eval(d, Scheme::LOUO, cfg), ReportFormat::Json);
    CHECK(a == b);

    const std::string ta = render_report(run_eval(d, Scheme::LOSO, cfg), ReportFormat::Table);
    const std::string tb = render_report(run_eval(d, Scheme::LOSO, cfg), ReportFormat::Table);
    CHECK(ta == tb);
}
