#include "skillkit/pipeline.hpp"

#include <algorithm>
#include <cmath>

namespace skillkit {

namespace {
constexpr int kModelFormatVersion = 1;

nlohmann::json vec_to_json(const Eigen::VectorXd& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        arr.push_back(v[i]);
    }
    return arr;
}

Eigen::VectorXd vec_from_json(const nlohmann::json& j) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    }
    return v;
}

nlohmann::json mat_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        rows.push_back(vec_to_json(m.row(i).transpose()));
    }
    return rows;
}

Eigen::MatrixXd mat_from_json(const nlohmann::json& j) {
    const auto r = static_cast<Eigen::Index>(j.size());
    if (r == 0) {
        return Eigen::MatrixXd(0, 0);
    }
    const auto c = static_cast<Eigen::Index>(j[0].size());
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        m.row(i) = vec_from_json(j[static_cast<std::size_t>(i)]).transpose();
    }
    return m;
}

}  // namespace

std::string to_string(Scheme s) {
    return s == Scheme::LOSO ? "loso" : "louo";
}

Scheme parse_scheme(const std::string& text) {
    if (text == "loso") {
        return Scheme::LOSO;
    }
    if (text == "louo") {
        return Scheme::LOUO;
    }
    throw Error("unknown scheme '" + text + "' (expected loso or louo)");
}

std::string to_string(ReportFormat f) {
    switch (f) {
        case ReportFormat::Table: return "table";
        case ReportFormat::Json: return "json";
        case ReportFormat::Csv: return "csv";
    }
    return "table";
}

ReportFormat parse_format(const std::string& text) {
    if (text == "table") {
        return ReportFormat::Table;
    }
    if (text == "json") {
        return ReportFormat::Json;
    }
    if (text == "csv") {
        return ReportFormat::Csv;
    }
    throw Error("unknown format '" + text + "' (expected table, json or csv)");
}

std::string to_string(ClassifierKind k) {
    return k == ClassifierKind::Lr ? "lr" : "svm";
}

ClassifierKind parse_classifier(const std::string& text) {
    if (text == "lr") {
        return ClassifierKind::Lr;
    }
    if (text == "svm") {
        return ClassifierKind::Svm;
    }
    throw Error("unknown classifier '" + text + "' (expected lr or svm)");
}

nlohmann::json PipelineConfig::to_json() const {
    nlohmann::json j;
    j["smoothing_span"] = features.smoothing_span;
    j["min_smooth_window"] = features.min_smooth_window;
    j["depth_axis"] = {features.depth_axis[0], features.depth_axis[1], features.depth_axis[2]};
    j["pca"] = {{"enabled", pca_enabled}, {"variance_target", pca_variance_target}};
    j["classifier"] = to_string(classifier);
    j["lr"] = {{"l2", lr.l2}, {"max_iter", lr.max_iter}, {"tol", lr.tol}};
    nlohmann::json gamma_json;
    switch (gamma.mode) {
        case GammaSetting::Mode::Auto: gamma_json = "auto"; break;
        case GammaSetting::Mode::Median: gamma_json = "median"; break;
        case GammaSetting::Mode::Fixed: gamma_json = gamma.value; break;
    }
    j["svm"] = {{"C", svm.C},
                {"gamma", gamma_json},
                {"tol", svm.tol},
                {"max_passes", svm.max_passes}};
    j["scheme"] = to_string(scheme);
    j["seed"] = seed;
    j["format"] = to_string(format);
    return j;
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j) {
    PipelineConfig cfg;
    cfg.features.smoothing_span = j.value("smoothing_span", cfg.features.smoothing_span);
    cfg.features.min_smooth_window = j.value("min_smooth_window", cfg.features.min_smooth_window);
    if (j.contains("depth_axis")) {
        const auto& a = j.at("depth_axis");
        if (a.size() != 3) {
            throw Error("depth_axis must have 3 components");
        }
        cfg.features.depth_axis =
            Eigen::Vector3d(a[0].get<double>(), a[1].get<double>(), a[2].get<double>());
    }
    if (j.contains("pca")) {
        cfg.pca_enabled = j.at("pca").value("enabled", cfg.pca_enabled);
        cfg.pca_variance_target = j.at("pca").value("variance_target", cfg.pca_variance_target);
    }
    if (j.contains("classifier")) {
        cfg.classifier = parse_classifier(j.at("classifier").get<std::string>());
    }
    if (j.contains("lr")) {
        const auto& l = j.at("lr");
        cfg.lr.l2 = l.value("l2", cfg.lr.l2);
        cfg.lr.max_iter = l.value("max_iter", cfg.lr.max_iter);
        cfg.lr.tol = l.value("tol", cfg.lr.tol);
    }
    if (j.contains("svm")) {
        const auto& s = j.at("svm");
        cfg.svm.C = s.value("C", cfg.svm.C);
        cfg.svm.tol = s.value("tol", cfg.svm.tol);
        cfg.svm.max_passes = s.value("max_passes", cfg.svm.max_passes);
        if (s.contains("gamma")) {
            const auto& g = s.at("gamma");
            if (g.is_string()) {
                const auto mode = g.get<std::string>();
                if (mode == "auto") {
                    cfg.gamma.mode = GammaSetting::Mode::Auto;
                } else if (mode == "median") {
                    cfg.gamma.mode = GammaSetting::Mode::Median;
                } else {
                    throw Error("svm.gamma must be 'auto', 'median' or a positive number");
                }
            } else {
                cfg.gamma.mode = GammaSetting::Mode::Fixed;
                cfg.gamma.value = g.get<double>();
                if (!(cfg.gamma.value > 0.0)) {
                    throw Error("svm.gamma must be positive");
                }
            }
        }
    }
    if (j.contains("scheme")) {
        cfg.scheme = parse_scheme(j.at("scheme").get<std::string>());
    }
    if (j.contains("seed")) {
        cfg.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("format")) {
        cfg.format = parse_format(j.at("format").get<std::string>());
    }
    return cfg;
}

double resolve_gamma(const GammaSetting& setting, const Eigen::MatrixXd& projected_rows) {
    switch (setting.mode) {
        case GammaSetting::Mode::Fixed:
            return setting.value;
        case GammaSetting::Mode::Auto:
            return 1.0 / static_cast<double>(std::max<Eigen::Index>(projected_rows.cols(), 1));
        case GammaSetting::Mode::Median: {
            std::vector<double> d2;
            for (Eigen::Index i = 0; i < projected_rows.rows(); ++i) {
                for (Eigen::Index j = i + 1; j < projected_rows.rows(); ++j) {
                    d2.push_back((projected_rows.row(i) - projected_rows.row(j)).squaredNorm());
                }
            }
            if (d2.empty()) {
                return 1.0 / static_cast<double>(std::max<Eigen::Index>(projected_rows.cols(), 1));
            }
            std::nth_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(d2.size() / 2),
                             d2.end());
            const double med = d2[d2.size() / 2];
            if (!(med > 0.0)) {
                return 1.0 / static_cast<double>(std::max<Eigen::Index>(projected_rows.cols(), 1));
            }
            return 1.0 / med;
        }
    }
    throw Error("unreachable gamma mode");
}

PipelineModel fit_pipeline(const Eigen::MatrixXd& X, const std::vector<Skill>& y,
                           const PipelineConfig& cfg) {
    if (X.rows() != static_cast<Eigen::Index>(y.size())) {
        throw Error("fit_pipeline: row/label count mismatch");
    }
    PipelineModel model;
    model.config = cfg;
    model.scaler = fit_scaler(X);
    Eigen::MatrixXd Z = model.scaler.apply_rows(X);
    if (cfg.pca_enabled) {
        model.pca = fit_pca(Z, cfg.pca_variance_target);
        Z = (model.pca->basis * Z.transpose()).transpose();
    }

    LabeledSet train{Z, y};
    if (cfg.classifier == ClassifierKind::Lr) {
        model.classifier = lr_fit(train, cfg.lr);
    } else {
        SvmOptions opts = cfg.svm;
        opts.gamma = resolve_gamma(cfg.gamma, Z);
        model.classifier = svm_fit(train, opts);
    }
    return model;
}

Eigen::VectorXd project(const PipelineModel& model, const FeatureVector& fv) {
    Eigen::VectorXd x(FeatureVector::kCount);
    for (std::size_t i = 0; i < FeatureVector::kCount; ++i) {
        x[static_cast<Eigen::Index>(i)] = fv[i];
    }
    if (model.pca.has_value()) {
        return transform(*model.pca, model.scaler, x);
    }
    return model.scaler.apply(x);
}

Skill predict(const PipelineModel& model, const FeatureVector& fv) {
    const Eigen::VectorXd z = project(model, fv);
    if (std::holds_alternative<LrModel>(model.classifier)) {
        return lr_predict(std::get<LrModel>(model.classifier), z);
    }
    return svm_predict(std::get<SvmModel>(model.classifier), z);
}

double decision_value(const PipelineModel& model, const FeatureVector& fv) {
    const Eigen::VectorXd z = project(model, fv);
    if (std::holds_alternative<LrModel>(model.classifier)) {
        return lr_predict_proba(std::get<LrModel>(model.classifier), z);
    }
    return svm_decision(std::get<SvmModel>(model.classifier), z);
}

nlohmann::json PipelineModel::to_json() const {
    nlohmann::json j;
    j["format_version"] = kModelFormatVersion;
    j["config"] = config.to_json();
    nlohmann::json sc;
    sc["means"] = vec_to_json(scaler.means);
    sc["stds"] = vec_to_json(scaler.stds);
    sc["constant"] = scaler.constant;
    j["scaler"] = sc;
    if (pca.has_value()) {
        nlohmann::json p;
        p["k"] = pca->k;
        p["basis"] = mat_to_json(pca->basis);
        p["explained_variance"] = vec_to_json(pca->explained_variance);
        p["total_variance"] = pca->total_variance;
        j["pca"] = p;
    } else {
        j["pca"] = nullptr;
    }
    if (std::holds_alternative<LrModel>(classifier)) {
        const auto& lr = std::get<LrModel>(classifier);
        j["classifier"] = {{"kind", "lr"}, {"beta0", lr.beta0}, {"beta", vec_to_json(lr.beta)}};
    } else {
        const auto& svm = std::get<SvmModel>(classifier);
        j["classifier"] = {{"kind", "svm"},
                           {"support_vectors", mat_to_json(svm.support_vectors)},
                           {"alphas", vec_to_json(svm.alphas)},
                           {"labels", vec_to_json(svm.labels)},
                           {"bias", svm.bias},
                           {"gamma", svm.gamma},
                           {"C", svm.C}};
    }
    return j;
}

PipelineModel PipelineModel::from_json(const nlohmann::json& j) {
    const int version = j.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
        throw Error("unsupported model format_version " + std::to_string(version));
    }
    PipelineModel m;
    m.config = PipelineConfig::from_json(j.at("config"));
    const auto& sc = j.at("scaler");
    m.scaler.means = vec_from_json(sc.at("means"));
    m.scaler.stds = vec_from_json(sc.at("stds"));
    m.scaler.constant = sc.at("constant").get<std::vector<bool>>();
    if (!j.at("pca").is_null()) {
        PcaModel p;
        p.k = j.at("pca").at("k").get<Eigen::Index>();
        p.basis = mat_from_json(j.at("pca").at("basis"));
        p.explained_variance = vec_from_json(j.at("pca").at("explained_variance"));
        p.total_variance = j.at("pca").at("total_variance").get<double>();
        m.pca = std::move(p);
    }
    const auto& cl = j.at("classifier");
    const auto kind = cl.at("kind").get<std::string>();
    if (kind == "lr") {
        LrModel lr;
        lr.beta0 = cl.at("beta0").get<double>();
        lr.beta = vec_from_json(cl.at("beta"));
        m.classifier = std::move(lr);
    } else if (kind == "svm") {
        SvmModel svm;
        svm.support_vectors = mat_from_json(cl.at("support_vectors"));
        svm.alphas = vec_from_json(cl.at("alphas"));
        svm.labels = vec_from_json(cl.at("labels"));
        svm.bias = cl.at("bias").get<double>();
        svm.gamma = cl.at("gamma").get<double>();
        svm.C = cl.at("C").get<double>();
        m.classifier = std::move(svm);
    } else {
        throw Error("unknown classifier kind '" + kind + "'");
    }
    return m;
}

}  // namespace skillkit
