#pragma once

#include "skillkit/classify.hpp"
#include "skillkit/features.hpp"
#include "skillkit/reduce.hpp"
#include "skillkit/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

namespace skillkit {

enum class Scheme { LOSO, LOUO };
enum class ReportFormat { Table, Json, Csv };
enum class ClassifierKind { Lr, Svm };

std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& text);
std::string to_string(ReportFormat f);
ReportFormat parse_format(const std::string& text);
std::string to_string(ClassifierKind k);
ClassifierKind parse_classifier(const std::string& text);

/// How the RBF width is chosen at fit time: 1/k from the projected feature
/// count, the median pairwise squared distance heuristic, or a fixed value.
struct GammaSetting {
    enum class Mode { Auto, Median, Fixed };
    Mode mode = Mode::Auto;
    double value = 1.0;
};

/// Every knob of the experiment, serializable and echoed into reports.
struct PipelineConfig {
    FeatureConfig features;
    bool pca_enabled = true;
    double pca_variance_target = 0.95;
    ClassifierKind classifier = ClassifierKind::Lr;
    LrOptions lr;
    SvmOptions svm;  // svm.gamma is resolved from `gamma` at fit time
    GammaSetting gamma;
    Scheme scheme = Scheme::LOSO;
    std::uint64_t seed = 0;
    ReportFormat format = ReportFormat::Table;

    nlohmann::json to_json() const;
    static PipelineConfig from_json(const nlohmann::json& j);
};

/// Fitted scaler + optional PCA + classifier; everything predict() needs.
struct PipelineModel {
    Scaler scaler;
    std::optional<PcaModel> pca;
    std::variant<LrModel, SvmModel> classifier;
    PipelineConfig config;

    nlohmann::json to_json() const;
    static PipelineModel from_json(const nlohmann::json& j);
};

/// Fits scaler, PCA (when enabled) and the configured classifier on the
/// given training rows only.
PipelineModel fit_pipeline(const Eigen::MatrixXd& X, const std::vector<Skill>& y,
                           const PipelineConfig& cfg);

/// Projects a raw 17-feature vector through the fitted scaler/PCA.
Eigen::VectorXd project(const PipelineModel& model, const FeatureVector& fv);

Skill predict(const PipelineModel& model, const FeatureVector& fv);

/// Signed score behind the prediction: LR probability of expert in (0,1),
/// or the SVM decision value.
double decision_value(const PipelineModel& model, const FeatureVector& fv);

/// gamma actually used given the setting and the projected training rows.
double resolve_gamma(const GammaSetting& setting, const Eigen::MatrixXd& projected_rows);

}  // namespace skillkit
