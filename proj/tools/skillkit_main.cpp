#include "skillkit/features.hpp"
#include "skillkit/ingest.hpp"
#include "skillkit/pipeline.hpp"
#include "skillkit/synth.hpp"
#include "skillkit/util.hpp"
#include "skillkit/validate.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace skillkit;

struct CommonArgs {
    std::string data_dir;
    std::string manifest;
    std::string config_path;
    std::string schema = "standard";
    std::string scheme;
    std::string classifier;
    std::string format;
    bool pca = true;
    std::int64_t seed = 0;
    CLI::Option* pca_opt = nullptr;
    CLI::Option* scheme_opt = nullptr;
    CLI::Option* classifier_opt = nullptr;
    CLI::Option* format_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
};

void add_config_flags(CLI::App* sub, CommonArgs& a) {
    sub->add_option("--config", a.config_path, "JSON config file; flags override its values")
        ->check(CLI::ExistingFile);
    a.scheme_opt = sub->add_option("--scheme", a.scheme, "Cross-validation scheme")
                       ->check(CLI::IsMember({"loso", "louo"}));
    a.classifier_opt = sub->add_option("--classifier", a.classifier, "Classifier")
                           ->check(CLI::IsMember({"lr", "svm"}));
    a.pca_opt = sub->add_flag("--pca,!--no-pca", a.pca, "Enable/disable PCA reduction");
    a.format_opt = sub->add_option("--format", a.format, "Report format")
                       ->check(CLI::IsMember({"table", "json", "csv"}));
    a.seed_opt = sub->add_option("--seed", a.seed, "Seed echoed into reports");
}

void add_data_flags(CLI::App* sub, CommonArgs& a) {
    sub->add_option("--data", a.data_dir, "Directory containing trajectory files")
        ->required();
    sub->add_option("--manifest", a.manifest,
                    "Trial manifest (surgeon_id,trial_index,skill,path per line)")
        ->required();
    sub->add_option("--schema", a.schema, "Input column layout")
        ->check(CLI::IsMember({"standard", "jigsaws"}));
}

PipelineConfig resolve_config(const CommonArgs& a) {
    PipelineConfig cfg;
    if (!a.config_path.empty())
        cfg = PipelineConfig::from_json(nlohmann::json::parse(read_text_file(a.config_path)));
    if (a.scheme_opt && *a.scheme_opt) cfg.scheme = parse_scheme(a.scheme);
    if (a.classifier_opt && *a.classifier_opt) cfg.classifier = parse_classifier(a.classifier);
    if (a.pca_opt && *a.pca_opt) cfg.pca_enabled = a.pca;
    if (a.format_opt && *a.format_opt) cfg.format = parse_format(a.format);
    if (a.seed_opt && *a.seed_opt) cfg.seed = static_cast<std::uint64_t>(a.seed);
    return cfg;
}

ColumnSchema resolve_schema(const CommonArgs& a) {
    return a.schema == "jigsaws" ? ColumnSchema::jigsaws() : ColumnSchema::standard();
}

Dataset load(const CommonArgs& a) {
    const auto metas = parse_manifest(read_text_file(a.manifest));
    if (metas.empty()) throw Error("manifest contains no trials: " + a.manifest);
    return load_dataset(a.data_dir, metas, resolve_schema(a));
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::cout << text;
    else
        write_text_file(out_path, text);
}

int cmd_extract(const CommonArgs& a, const std::string& out_path) {
    const PipelineConfig cfg = resolve_config(a);
    const Dataset data = load(a);
    std::string csv = "surgeon_id,trial_index,skill," + FeatureVector::csv_header() + "\n";
    for (const auto& [meta, traj] : data.trials) {
        FeatureVector fv;
        try {
            fv = extract_features(traj, cfg.features);
        } catch (const Error& e) {
            throw Error("trial " + meta.surgeon_id + "/" +
                        std::to_string(meta.trial_index) + ": " + e.what());
        }
        csv += meta.surgeon_id + "," + std::to_string(meta.trial_index) + "," +
               to_string(meta.skill) + "," + fv.csv_row() + "\n";
    }
    emit(csv, out_path);
    return 0;
}

int cmd_evaluate(const CommonArgs& a, const std::string& out_path) {
    const PipelineConfig cfg = resolve_config(a);
    const EvalReport report = run_eval(load(a), cfg.scheme, cfg);
    emit(render_report(report, cfg.format), out_path);
    return 0;
}

int cmd_synth(const PopulationParams& params, const std::string& out_dir) {
    const auto manifest = write_population(out_dir, params);
    std::cout << "wrote " << params.trials_per_surgeon *
                                 (params.n_experts + params.n_novices)
              << " trajectories + " << manifest.filename().string() << " to " << out_dir
              << "\n";
    return 0;
}

int cmd_train(const CommonArgs& a, const std::string& model_path) {
    const PipelineConfig cfg = resolve_config(a);
    const Dataset data = load(a);
    data.require_trainable();
    Eigen::MatrixXd X(data.size(), FeatureVector::kCount);
    std::vector<Skill> y;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& [meta, traj] = data.trials[i];
        try {
            const FeatureVector fv = extract_features(traj, cfg.features);
            for (int j = 0; j < FeatureVector::kCount; ++j)
                X(static_cast<Eigen::Index>(i), j) = fv.values[static_cast<std::size_t>(j)];
        } catch (const Error& e) {
            throw Error("trial " + meta.surgeon_id + "/" +
                        std::to_string(meta.trial_index) + ": " + e.what());
        }
        y.push_back(meta.skill);
    }
    const PipelineModel model = fit_pipeline(X, y, cfg);
    write_text_file(model_path, model.to_json().dump(2) + "\n");
    std::cout << "trained " << to_string(cfg.classifier) << " on " << data.size()
              << " trials -> " << model_path << "\n";
    return 0;
}

int cmd_predict(const CommonArgs& a, const std::string& model_path,
                const std::string& input_path, const std::string& out_path) {
    const PipelineModel model =
        PipelineModel::from_json(nlohmann::json::parse(read_text_file(model_path)));
    const Trajectory traj =
        parse_kinematics(read_text_file(input_path), resolve_schema(a));
    const FeatureVector fv = extract_features(traj, model.config.features);
    const Skill skill = predict(model, fv);
    const double score = decision_value(model, fv);

    ReportFormat fmt = model.config.format;
    if (a.format_opt && *a.format_opt) fmt = parse_format(a.format);
    std::string text;
    switch (fmt) {
        case ReportFormat::Json: {
            nlohmann::json j{{"skill", to_string(skill)}, {"decision_value", score}};
            text = j.dump(2) + "\n";
            break;
        }
        case ReportFormat::Csv:
            text = "skill,decision_value\n" + to_string(skill) + "," +
                   format_double(score) + "\n";
            break;
        case ReportFormat::Table:
            text = "predicted skill: " + to_string(skill) + " (decision value " +
                   format_double(score) + ")\n";
            break;
    }
    emit(text, out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"skillkit: classify surgeon skill from robot tool-tip trajectories"};
    app.require_subcommand(1);

    CommonArgs ex_args, ev_args, tr_args, pr_args;
    std::string ex_out, ev_out, tr_model, pr_model, pr_input, pr_out, synth_dir;
    PopulationParams pop;
    std::int64_t synth_seed = 0;

    auto* extract = app.add_subcommand("extract", "Write one 17-feature row per trial");
    add_data_flags(extract, ex_args);
    add_config_flags(extract, ex_args);
    extract->add_option("--out", ex_out, "Output CSV path (default: stdout)");

    auto* evaluate =
        app.add_subcommand("evaluate", "Cross-validated skill classification report");
    add_data_flags(evaluate, ev_args);
    add_config_flags(evaluate, ev_args);
    evaluate->add_option("--out", ev_out, "Output path (default: stdout)");

    auto* synth = app.add_subcommand("synth", "Generate a synthetic population");
    synth->add_option("--out", synth_dir, "Output directory")->required();
    synth->add_option("--experts", pop.n_experts, "Expert surgeon count");
    synth->add_option("--novices", pop.n_novices, "Novice surgeon count");
    synth->add_option("--trials", pop.trials_per_surgeon, "Trials per surgeon");
    synth->add_option("--separation", pop.separation, "Class separation in [0,1]");
    synth->add_option("--seed", synth_seed, "Generator seed");

    auto* train = app.add_subcommand("train", "Fit the pipeline and save the model");
    add_data_flags(train, tr_args);
    add_config_flags(train, tr_args);
    train->add_option("--model", tr_model, "Output model JSON path")->required();

    auto* predict =
        app.add_subcommand("predict", "Apply a saved model to one trajectory file");
    predict->add_option("--model", pr_model, "Model JSON path")
        ->required()
        ->check(CLI::ExistingFile);
    predict->add_option("--input", pr_input, "Trajectory file")
        ->required()
        ->check(CLI::ExistingFile);
    predict->add_option("--schema", pr_args.schema, "Input column layout")
        ->check(CLI::IsMember({"standard", "jigsaws"}));
    add_config_flags(predict, pr_args);
    predict->add_option("--out", pr_out, "Output path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*extract) return cmd_extract(ex_args, ex_out);
        if (*evaluate) return cmd_evaluate(ev_args, ev_out);
        if (*synth) {
            pop.seed = static_cast<std::uint64_t>(synth_seed);
            return cmd_synth(pop, synth_dir);
        }
        if (*train) return cmd_train(tr_args, tr_model);
        if (*predict) return cmd_predict(pr_args, pr_model, pr_input, pr_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
