#pragma once

#include "skillkit/pipeline.hpp"
#include "skillkit/types.hpp"

#include <json.hpp>

#include <cstddef>
#include <string>
#include <vector>

namespace skillkit {

/// One cross-validation fold, as indices into Dataset::trials. A fold whose
/// training side lacks one of the classes is marked degenerate; it is
/// reported but never trained on.
struct Fold {
    std::string label;
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    bool degenerate = false;
};

struct FoldPlan {
    Scheme scheme = Scheme::LOSO;
    std::vector<Fold> folds;
};

/// LOUO: one fold per surgeon, testing all of that surgeon's trials.
/// LOSO: fold t (1-based) tests the t-th trial of every surgeon that has
/// one, where ordinals follow manifest order; surgeons with fewer trials
/// contribute nothing to later folds.
FoldPlan make_folds(const Dataset& dataset, Scheme scheme);

struct FoldResult {
    std::string label;
    std::size_t test_size = 0;
    std::size_t correct = 0;
    bool degenerate = false;

    double accuracy() const {
        return test_size == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(test_size);
    }
    bool operator==(const FoldResult&) const = default;
};

/// Pooled prediction counts over all non-degenerate folds. Per-class
/// accuracy is recall: correct / total within that true class.
struct ConfusionCounts {
    std::size_t novice_total = 0;
    std::size_t novice_correct = 0;
    std::size_t expert_total = 0;
    std::size_t expert_correct = 0;

    bool operator==(const ConfusionCounts&) const = default;
};

struct EvalReport {
    Scheme scheme = Scheme::LOSO;
    ClassifierKind classifier = ClassifierKind::Lr;
    std::vector<FoldResult> folds;
    ConfusionCounts confusion;
    std::vector<std::string> warnings;  // degenerate folds, one entry each
    nlohmann::json config_echo;

    double novice_acc() const;
    double expert_acc() const;
    double overall_acc() const;

    bool operator==(const EvalReport&) const = default;
};

/// Runs the full per-fold pipeline: features once per trial, then per fold
/// scaler + PCA + classifier fitted on the training rows only.
EvalReport run_eval(const Dataset& dataset, Scheme scheme, const PipelineConfig& cfg);

/// Renders as a plain-text accuracy table (Novices / Experts / Overall),
/// a schema-versioned JSON document, or CSV with one row per fold plus
/// aggregate rows.
std::string render_report(const EvalReport& report, ReportFormat format);

/// Parses the JSON produced by render_report back into an equal report.
EvalReport report_from_json(const std::string& text);

}  // namespace skillkit
