#include "skillkit/validate.hpp"

#include "skillkit/util.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

namespace skillkit {

namespace {

double ratio(std::size_t correct, std::size_t total) {
    return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

std::string percent(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f%%", v * 100.0);
    return buf;
}

void mark_degenerate(Fold& fold, const Dataset& dataset) {
    bool has_novice = false, has_expert = false;
    for (std::size_t i : fold.train) {
        (dataset.trials[i].first.skill == Skill::Novice ? has_novice : has_expert) = true;
    }
    fold.degenerate = fold.train.empty() || !has_novice || !has_expert;
}

}  // namespace

FoldPlan make_folds(const Dataset& dataset, Scheme scheme) {
    if (dataset.trials.empty()) {
        throw Error("cannot build folds for an empty dataset");
    }

    // Surgeons in first-appearance order, each with their trial indices.
    std::vector<std::string> surgeon_order;
    std::map<std::string, std::vector<std::size_t>> by_surgeon;
    for (std::size_t i = 0; i < dataset.trials.size(); ++i) {
        const auto& id = dataset.trials[i].first.surgeon_id;
        auto [it, inserted] = by_surgeon.try_emplace(id);
        if (inserted) {
            surgeon_order.push_back(id);
        }
        it->second.push_back(i);
    }

    FoldPlan plan;
    plan.scheme = scheme;

    if (scheme == Scheme::LOUO) {
        if (surgeon_order.size() < 2) {
            throw Error("LOUO needs at least 2 surgeons, got " +
                        std::to_string(surgeon_order.size()));
        }
        for (const auto& id : surgeon_order) {
            Fold fold;
            fold.label = "surgeon " + id;
            fold.test = by_surgeon[id];
            for (std::size_t i = 0; i < dataset.trials.size(); ++i) {
                if (dataset.trials[i].first.surgeon_id != id) {
                    fold.train.push_back(i);
                }
            }
            mark_degenerate(fold, dataset);
            plan.folds.push_back(std::move(fold));
        }
        return plan;
    }

    std::size_t max_trials = 0;
    for (const auto& id : surgeon_order) {
        max_trials = std::max(max_trials, by_surgeon[id].size());
    }
    if (max_trials < 2) {
        throw Error("LOSO needs at least one surgeon with 2 or more trials");
    }
    for (std::size_t t = 0; t < max_trials; ++t) {
        Fold fold;
        fold.label = "trial " + std::to_string(t + 1);
        for (const auto& id : surgeon_order) {
            const auto& trials = by_surgeon[id];
            if (t < trials.size()) {
                fold.test.push_back(trials[t]);
            }
        }
        std::sort(fold.test.begin(), fold.test.end());
        for (std::size_t i = 0; i < dataset.trials.size(); ++i) {
            if (!std::binary_search(fold.test.begin(), fold.test.end(), i)) {
                fold.train.push_back(i);
            }
        }
        mark_degenerate(fold, dataset);
        plan.folds.push_back(std::move(fold));
    }
    return plan;
}

double EvalReport::novice_acc() const {
    return ratio(confusion.novice_correct, confusion.novice_total);
}

double EvalReport::expert_acc() const {
    return ratio(confusion.expert_correct, confusion.expert_total);
}

double EvalReport::overall_acc() const {
    return ratio(confusion.novice_correct + confusion.expert_correct,
                 confusion.novice_total + confusion.expert_total);
}

EvalReport run_eval(const Dataset& dataset, Scheme scheme, const PipelineConfig& cfg) {
    dataset.require_trainable();
    const FoldPlan plan = make_folds(dataset, scheme);

    std::vector<FeatureVector> features;
    features.reserve(dataset.trials.size());
    for (const auto& [meta, traj] : dataset.trials) {
        try {
            features.push_back(extract_features(traj, cfg.features));
        } catch (const Error& e) {
            throw Error("trial " + meta.surgeon_id + "/" + std::to_string(meta.trial_index) +
                        ": " + e.what());
        }
    }

    EvalReport report;
    report.scheme = scheme;
    report.classifier = cfg.classifier;
    PipelineConfig echoed = cfg;
    echoed.scheme = scheme;
    report.config_echo = echoed.to_json();

    for (const Fold& fold : plan.folds) {
        FoldResult result;
        result.label = fold.label;
        result.test_size = fold.test.size();
        result.degenerate = fold.degenerate;
        if (fold.degenerate) {
            report.warnings.push_back("fold '" + fold.label +
                                      "' is degenerate (training side lacks a class); excluded");
            report.folds.push_back(std::move(result));
            continue;
        }

        Eigen::MatrixXd X(static_cast<Eigen::Index>(fold.train.size()), FeatureVector::kCount);
        std::vector<Skill> y;
        y.reserve(fold.train.size());
        for (std::size_t r = 0; r < fold.train.size(); ++r) {
            for (std::size_t c = 0; c < FeatureVector::kCount; ++c) {
                X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    features[fold.train[r]][c];
            }
            y.push_back(dataset.trials[fold.train[r]].first.skill);
        }
        const PipelineModel model = fit_pipeline(X, y, echoed);

        for (std::size_t i : fold.test) {
            const Skill truth = dataset.trials[i].first.skill;
            const Skill guess = predict(model, features[i]);
            const bool ok = guess == truth;
            if (truth == Skill::Novice) {
                ++report.confusion.novice_total;
                report.confusion.novice_correct += ok ? 1 : 0;
            } else {
                ++report.confusion.expert_total;
                report.confusion.expert_correct += ok ? 1 : 0;
            }
            result.correct += ok ? 1 : 0;
        }
        report.folds.push_back(std::move(result));
    }
    return report;
}

namespace {

std::string render_table(const EvalReport& r) {
    std::string out;
    out += "Skill classification accuracy (scheme " + to_string(r.scheme) + ", classifier " +
           to_string(r.classifier) + ")\n";
    out += "----------------------------------------------\n";
    const auto& c = r.confusion;
    out += "  Novices  " + percent(r.novice_acc()) + "  (" + std::to_string(c.novice_correct) +
           "/" + std::to_string(c.novice_total) + ")\n";
    out += "  Experts  " + percent(r.expert_acc()) + "  (" + std::to_string(c.expert_correct) +
           "/" + std::to_string(c.expert_total) + ")\n";
    out += "  Overall  " + percent(r.overall_acc()) + "  (" +
           std::to_string(c.novice_correct + c.expert_correct) + "/" +
           std::to_string(c.novice_total + c.expert_total) + ")\n";
    out += "Folds:\n";
    for (const auto& f : r.folds) {
        if (f.degenerate) {
            out += "  " + f.label + "  degenerate (excluded)\n";
        } else {
            out += "  " + f.label + "  " + percent(f.accuracy()) + "  (" +
                   std::to_string(f.correct) + "/" + std::to_string(f.test_size) + ")\n";
        }
    }
    if (!r.warnings.empty()) {
        out += "Warnings:\n";
        for (const auto& w : r.warnings) {
            out += "  " + w + "\n";
        }
    }
    return out;
}

constexpr int kReportSchemaVersion = 1;

nlohmann::json report_to_json(const EvalReport& r) {
    nlohmann::json j;
    j["schema_version"] = kReportSchemaVersion;
    j["scheme"] = to_string(r.scheme);
    j["classifier"] = to_string(r.classifier);
    j["config"] = r.config_echo;
    nlohmann::json folds = nlohmann::json::array();
    for (const auto& f : r.folds) {
        folds.push_back({{"label", f.label},
                         {"test_size", f.test_size},
                         {"correct", f.correct},
                         {"degenerate", f.degenerate},
                         {"accuracy", f.accuracy()}});
    }
    j["folds"] = folds;
    j["confusion"] = {{"novice_total", r.confusion.novice_total},
                      {"novice_correct", r.confusion.novice_correct},
                      {"expert_total", r.confusion.expert_total},
                      {"expert_correct", r.confusion.expert_correct}};
    j["accuracy"] = {{"novice", r.novice_acc()},
                     {"expert", r.expert_acc()},
                     {"overall", r.overall_acc()}};
    j["warnings"] = r.warnings;
    return j;
}

std::string render_csv(const EvalReport& r) {
    std::string out = "row_type,label,n,correct,accuracy\n";
    for (const auto& f : r.folds) {
        out += "fold," + f.label + "," + std::to_string(f.test_size) + "," +
               std::to_string(f.correct) + "," +
               (f.degenerate ? "degenerate" : format_double(f.accuracy())) + "\n";
    }
    const auto& c = r.confusion;
    out += "aggregate,novices," + std::to_string(c.novice_total) + "," +
           std::to_string(c.novice_correct) + "," + format_double(r.novice_acc()) + "\n";
    out += "aggregate,experts," + std::to_string(c.expert_total) + "," +
           std::to_string(c.expert_correct) + "," + format_double(r.expert_acc()) + "\n";
    out += "aggregate,overall," + std::to_string(c.novice_total + c.expert_total) + "," +
           std::to_string(c.novice_correct + c.expert_correct) + "," +
           format_double(r.overall_acc()) + "\n";
    return out;
}

}  // namespace

std::string render_report(const EvalReport& report, ReportFormat format) {
    switch (format) {
        case ReportFormat::Table: return render_table(report);
        case ReportFormat::Json: return report_to_json(report).dump(2) + "\n";
        case ReportFormat::Csv: return render_csv(report);
    }
    throw Error("unknown report format");
}

EvalReport report_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    const int version = j.at("schema_version").get<int>();
    if (version != kReportSchemaVersion) {
        throw Error("unsupported report schema_version " + std::to_string(version));
    }
    EvalReport r;
    r.scheme = parse_scheme(j.at("scheme").get<std::string>());
    r.classifier = parse_classifier(j.at("classifier").get<std::string>());
    r.config_echo = j.at("config");
    for (const auto& f : j.at("folds")) {
        FoldResult fr;
        fr.label = f.at("label").get<std::string>();
        fr.test_size = f.at("test_size").get<std::size_t>();
        fr.correct = f.at("correct").get<std::size_t>();
        fr.degenerate = f.at("degenerate").get<bool>();
        r.folds.push_back(std::move(fr));
    }
    const auto& c = j.at("confusion");
    r.confusion.novice_total = c.at("novice_total").get<std::size_t>();
    r.confusion.novice_correct = c.at("novice_correct").get<std::size_t>();
    r.confusion.expert_total = c.at("expert_total").get<std::size_t>();
    r.confusion.expert_correct = c.at("expert_correct").get<std::size_t>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    return r;
}

}  // namespace skillkit
