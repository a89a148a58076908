#pragma once

#include "skillkit/types.hpp"

#include <Eigen/Core>

#include <vector>

namespace skillkit {

/// Training rows with their skill labels. Classifiers encode Novice as 0/-1
/// and Expert as 1/+1.
struct LabeledSet {
    Eigen::MatrixXd X;
    std::vector<Skill> y;

    Eigen::Index rows() const { return X.rows(); }
    Eigen::Index cols() const { return X.cols(); }

    void require_both_classes() const;
};

struct LrModel {
    double beta0 = 0.0;
    Eigen::VectorXd beta;
};

struct LrOptions {
    double l2 = 1e-4;
    int max_iter = 100;
    double tol = 1e-8;
};

/// Maximizes the L2-penalized log-likelihood by Newton steps (IRLS) with
/// step halving, starting from zero. The intercept is not penalized.
/// Throws on non-convergence, and on perfectly separated data when l2 == 0
/// (detected via coefficient blow-up) with a message advising l2 > 0.
LrModel lr_fit(const LabeledSet& data, const LrOptions& opts = {});

/// p(expert | x) = 1 / (1 + exp(-(beta0 + beta . x))), numerically stable.
double lr_predict_proba(const LrModel& model, const Eigen::VectorXd& x);

/// Expert iff the linear predictor is strictly positive; ties go to Novice.
Skill lr_predict(const LrModel& model, const Eigen::VectorXd& x);

/// Penalized log-likelihood and its gradient (intercept component last);
/// exposed so the optimum can be verified against finite differences.
double lr_objective(const LabeledSet& data, double beta0, const Eigen::VectorXd& beta, double l2);
Eigen::VectorXd lr_gradient(const LabeledSet& data, double beta0, const Eigen::VectorXd& beta,
                            double l2);

/// exp(-gamma * |xi - xj|^2); equal-dimension inputs, gamma > 0.
double rbf_kernel(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj, double gamma);

struct SvmModel {
    Eigen::MatrixXd support_vectors;  // m x k
    Eigen::VectorXd alphas;           // m, each in (0, C]
    Eigen::VectorXd labels;           // m, each -1 or +1
    double bias = 0.0;
    double gamma = 0.0;
    double C = 0.0;
};

struct SvmOptions {
    double C = 1.0;
    double gamma = 1.0;
    double tol = 1e-6;
    int max_passes = 50000;  // cap on pair-optimization steps
};

/// Soft-margin RBF SVM trained by sequential pairwise optimization: the
/// maximal KKT violator is paired with the point of largest |E_i - E_j|,
/// with a fixed scan order as fallback, so training is deterministic.
/// Converges when every KKT violation is within opts.tol. The bias comes
/// from averaging over unbounded support vectors when possible.
SvmModel svm_fit(const LabeledSet& data, const SvmOptions& opts = {});

/// Kernel expansion sum_i alpha_i y_i K(sv_i, x) + bias.
double svm_decision(const SvmModel& model, const Eigen::VectorXd& x);

/// sign(decision); an exact zero counts as Novice.
Skill svm_predict(const SvmModel& model, const Eigen::VectorXd& x);

/// Largest KKT violation of the model over a training set; the fit
/// guarantees this is <= opts.tol on its own training data.
double svm_kkt_residual(const SvmModel& model, const LabeledSet& data);

}  // namespace skillkit
