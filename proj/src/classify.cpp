#include "skillkit/classify.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace skillkit {

namespace {

constexpr double kStepEps = 1e-12;       // minimal SMO multiplier change
constexpr double kBoundSnap = 1e-10;     // snap alphas this close to bounds
constexpr double kSeparationMargin = 15.0;
constexpr double kCoefficientBlowup = 1e8;

double stable_sigmoid(double eta) {
    if (eta >= 0.0) {
        return 1.0 / (1.0 + std::exp(-eta));
    }
    const double e = std::exp(eta);
    return e / (1.0 + e);
}

// log(1 + exp(eta)) without overflow.
double log1p_exp(double eta) {
    return std::max(eta, 0.0) + std::log1p(std::exp(-std::abs(eta)));
}

}  // namespace

void LabeledSet::require_both_classes() const {
    if (X.rows() != static_cast<Eigen::Index>(y.size())) {
        throw Error("labeled set: row/label count mismatch");
    }
    bool has_novice = false, has_expert = false;
    for (Skill s : y) {
        (s == Skill::Novice ? has_novice : has_expert) = true;
    }
    if (!has_novice || !has_expert) {
        throw Error("training set must contain both classes");
    }
}

double lr_objective(const LabeledSet& data, double beta0, const Eigen::VectorXd& beta, double l2) {
    double ll = 0.0;
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        const double eta = beta0 + data.X.row(i).dot(beta);
        const double yi = data.y[static_cast<std::size_t>(i)] == Skill::Expert ? 1.0 : 0.0;
        ll += yi * eta - log1p_exp(eta);
    }
    return ll - 0.5 * l2 * beta.squaredNorm();
}

Eigen::VectorXd lr_gradient(const LabeledSet& data, double beta0, const Eigen::VectorXd& beta,
                            double l2) {
    const Eigen::Index k = beta.size();
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(k + 1);
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        const double eta = beta0 + data.X.row(i).dot(beta);
        const double yi = data.y[static_cast<std::size_t>(i)] == Skill::Expert ? 1.0 : 0.0;
        const double r = yi - stable_sigmoid(eta);
        grad.head(k) += r * data.X.row(i).transpose();
        grad[k] += r;
    }
    grad.head(k) -= l2 * beta;
    return grad;
}

LrModel lr_fit(const LabeledSet& data, const LrOptions& opts) {
    data.require_both_classes();
    if (opts.l2 < 0.0) {
        throw Error("l2 penalty must be non-negative");
    }
    const Eigen::Index n = data.rows();
    const Eigen::Index k = data.cols();

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
    double beta0 = 0.0;
    double obj = lr_objective(data, beta0, beta, opts.l2);
    int stalled = 0;

    for (int iter = 0; iter < opts.max_iter; ++iter) {
        const Eigen::VectorXd grad = lr_gradient(data, beta0, beta, opts.l2);
        if (grad.norm() <= opts.tol) {
            LrModel model;
            model.beta0 = beta0;
            model.beta = beta;
            return model;
        }

        if (opts.l2 == 0.0) {
            // Unpenalized likelihood has no finite optimum on separated data;
            // the iterates drift off to infinity with vanishing gradient.
            bool all_saturated_correct = true;
            for (Eigen::Index i = 0; i < n && all_saturated_correct; ++i) {
                const double eta = beta0 + data.X.row(i).dot(beta);
                const double sign = data.y[static_cast<std::size_t>(i)] == Skill::Expert ? 1.0 : -1.0;
                all_saturated_correct = sign * eta > kSeparationMargin;
            }
            if (all_saturated_correct ||
                std::max(beta.cwiseAbs().maxCoeff(), std::abs(beta0)) > kCoefficientBlowup) {
                throw Error(
                    "logistic regression: data is perfectly separated and l2 == 0, "
                    "coefficients diverge; refit with l2 > 0");
            }
        }

        // Newton system on (beta, beta0).
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(k + 1, k + 1);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double eta = beta0 + data.X.row(i).dot(beta);
            const double p = stable_sigmoid(eta);
            const double w = p * (1.0 - p);
            const Eigen::VectorXd xi = data.X.row(i).transpose();
            H.topLeftCorner(k, k) += w * xi * xi.transpose();
            H.block(0, k, k, 1) += w * xi;
            H.block(k, 0, 1, k) += w * xi.transpose();
            H(k, k) += w;
        }
        H.topLeftCorner(k, k).diagonal().array() += opts.l2;

        Eigen::VectorXd step;
        double jitter = 0.0;
        while (true) {
            Eigen::MatrixXd Hj = H;
            if (jitter > 0.0) {
                Hj.diagonal().array() += jitter;
            }
            Eigen::LDLT<Eigen::MatrixXd> ldlt(Hj);
            step = ldlt.solve(grad);
            if (ldlt.info() == Eigen::Success && step.allFinite() && step.dot(grad) > 0.0) {
                break;
            }
            jitter = jitter == 0.0 ? 1e-10 : jitter * 10.0;
            if (jitter > 1e6) {
                throw Error("logistic regression: Newton system is unsolvable");
            }
        }

        // Halve until the penalized log-likelihood does not decrease.
        double t = 1.0;
        bool moved = false;
        double gained = 0.0;
        for (int h = 0; h < 60; ++h) {
            const Eigen::VectorXd beta_try = beta + t * step.head(k);
            const double beta0_try = beta0 + t * step[k];
            const double obj_try = lr_objective(data, beta0_try, beta_try, opts.l2);
            if (obj_try >= obj) {
                gained = obj_try - obj;
                beta = beta_try;
                beta0 = beta0_try;
                obj = obj_try;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        // On nearly separated folds the weights underflow and the objective
        // reaches its floating-point ceiling while the gradient norm plateaus
        // slightly above tol. Two consecutive zero-gain iterations (or a dead
        // line search) mean no representable iterate is better: accept the
        // optimum if the gradient is sane, otherwise report the stall.
        stalled = (!moved || gained <= 1e-15 * (1.0 + std::abs(obj))) ? stalled + 1 : 0;
        if (stalled >= 2) {
            const double gnorm = lr_gradient(data, beta0, beta, opts.l2).norm();
            if (gnorm <= 1e-4) {
                break;
            }
            throw Error("logistic regression: line search stalled (gradient norm " +
                        std::to_string(gnorm) + ")");
        }
    }

    const double gnorm = lr_gradient(data, beta0, beta, opts.l2).norm();
    if (gnorm <= opts.tol || stalled >= 2) {
        LrModel model;
        model.beta0 = beta0;
        model.beta = beta;
        return model;
    }
    throw Error("logistic regression did not converge in " + std::to_string(opts.max_iter) +
                " iterations (gradient norm " + std::to_string(gnorm) + ")");
}

double lr_predict_proba(const LrModel& model, const Eigen::VectorXd& x) {
    if (x.size() != model.beta.size()) {
        throw Error("lr_predict_proba: dimension mismatch");
    }
    return stable_sigmoid(model.beta0 + model.beta.dot(x));
}

Skill lr_predict(const LrModel& model, const Eigen::VectorXd& x) {
    if (x.size() != model.beta.size()) {
        throw Error("lr_predict: dimension mismatch");
    }
    return model.beta0 + model.beta.dot(x) > 0.0 ? Skill::Expert : Skill::Novice;
}

double rbf_kernel(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj, double gamma) {
    if (xi.size() != xj.size()) {
        throw Error("rbf_kernel: dimension mismatch");
    }
    if (!(gamma > 0.0)) {
        throw Error("rbf_kernel: gamma must be positive");
    }
    return std::exp(-gamma * (xi - xj).squaredNorm());
}

namespace {

struct SmoState {
    const Eigen::MatrixXd& K;
    const Eigen::VectorXd& y;
    double C;
    Eigen::VectorXd alpha;
    Eigen::VectorXd g;  // g_i = sum_j alpha_j y_j K_ij (no bias)

    double violation(Eigen::Index i, double bias) const {
        const double yf = y[i] * (g[i] + bias);
        double v = 0.0;
        if (alpha[i] < C && yf < 1.0) {
            v = std::max(v, 1.0 - yf);
        }
        if (alpha[i] > 0.0 && yf > 1.0) {
            v = std::max(v, yf - 1.0);
        }
        return v;
    }

    double max_violation(double bias) const {
        double vmax = 0.0;
        for (Eigen::Index i = 0; i < alpha.size(); ++i) {
            vmax = std::max(vmax, violation(i, bias));
        }
        return vmax;
    }

    // Feasible-bias interval from the KKT conditions, via c_i = y_i - g_i.
    // The midpoint minimizes the worst violation, which equals
    // max(0, (lo - hi) / 2).
    std::pair<double, double> bias_interval() const {
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < alpha.size(); ++i) {
            const double c = y[i] - g[i];
            const bool interior = alpha[i] > 0.0 && alpha[i] < C;
            const bool lower = interior || (alpha[i] == 0.0 && y[i] > 0.0) ||
                               (alpha[i] == C && y[i] < 0.0);
            const bool upper = interior || (alpha[i] == 0.0 && y[i] < 0.0) ||
                               (alpha[i] == C && y[i] > 0.0);
            if (lower) {
                lo = std::max(lo, c);
            }
            if (upper) {
                hi = std::min(hi, c);
            }
        }
        if (!std::isfinite(lo)) {
            lo = std::isfinite(hi) ? hi : 0.0;
        }
        if (!std::isfinite(hi)) {
            hi = lo;
        }
        return {lo, hi};
    }

    double best_bias() const {
        const auto [lo, hi] = bias_interval();
        return 0.5 * (lo + hi);
    }
};

// Pair dual objective (minimization form) restricted to (i1, i2), used when
// the second derivative along the constraint line is not positive.
double pair_objective(const SmoState& s, Eigen::Index i1, Eigen::Index i2, double a2) {
    const double y1 = s.y[i1], y2 = s.y[i2];
    const double sgn = y1 * y2;
    const double gamma_sum = s.alpha[i1] + sgn * s.alpha[i2];
    const double a1 = gamma_sum - sgn * a2;
    const double k11 = s.K(i1, i1), k22 = s.K(i2, i2), k12 = s.K(i1, i2);
    const double v1 = s.g[i1] - s.y[i1] * s.alpha[i1] * k11 - s.y[i2] * s.alpha[i2] * k12;
    const double v2 = s.g[i2] - s.y[i1] * s.alpha[i1] * k12 - s.y[i2] * s.alpha[i2] * k22;
    return 0.5 * k11 * a1 * a1 + 0.5 * k22 * a2 * a2 + sgn * k12 * a1 * a2 + y1 * a1 * v1 +
           y2 * a2 * v2 - a1 - a2;
}

bool smo_take_step(SmoState& s, Eigen::Index i1, Eigen::Index i2) {
    if (i1 == i2) {
        return false;
    }
    const double y1 = s.y[i1], y2 = s.y[i2];
    const double a1_old = s.alpha[i1], a2_old = s.alpha[i2];
    // The bias cancels in E1 - E2, so errors are computed bias-free.
    const double E1 = s.g[i1] - y1;
    const double E2 = s.g[i2] - y2;
    const double sgn = y1 * y2;

    double L, H;
    if (sgn < 0.0) {
        L = std::max(0.0, a2_old - a1_old);
        H = std::min(s.C, s.C + a2_old - a1_old);
    } else {
        L = std::max(0.0, a1_old + a2_old - s.C);
        H = std::min(s.C, a1_old + a2_old);
    }
    if (H - L < kStepEps) {
        return false;
    }

    const double eta = s.K(i1, i1) + s.K(i2, i2) - 2.0 * s.K(i1, i2);
    double a2_new;
    if (eta > 1e-12) {
        a2_new = std::clamp(a2_old + y2 * (E1 - E2) / eta, L, H);
    } else {
        const double lo = pair_objective(s, i1, i2, L);
        const double hi = pair_objective(s, i1, i2, H);
        if (lo < hi - kStepEps) {
            a2_new = L;
        } else if (hi < lo - kStepEps) {
            a2_new = H;
        } else {
            return false;
        }
    }

    if (std::abs(a2_new - a2_old) < kStepEps * (a2_new + a2_old + kStepEps)) {
        return false;
    }

    double a1_new = a1_old + sgn * (a2_old - a2_new);
    // a1_new is inside [0, C] by construction of L/H; snap rounding dust.
    if (a1_new < kBoundSnap) {
        a1_new = 0.0;
    } else if (a1_new > s.C - kBoundSnap) {
        a1_new = s.C;
    }
    double a2_snapped = a2_new;
    if (a2_snapped < kBoundSnap) {
        a2_snapped = 0.0;
    } else if (a2_snapped > s.C - kBoundSnap) {
        a2_snapped = s.C;
    }

    const double d1 = a1_new - a1_old;
    const double d2 = a2_snapped - a2_old;
    s.alpha[i1] = a1_new;
    s.alpha[i2] = a2_snapped;
    s.g += y1 * d1 * s.K.col(i1) + y2 * d2 * s.K.col(i2);
    return true;
}

}  // namespace

SvmModel svm_fit(const LabeledSet& data, const SvmOptions& opts) {
    data.require_both_classes();
    if (!(opts.C > 0.0)) {
        throw Error("svm_fit: C must be positive");
    }
    if (!(opts.gamma > 0.0)) {
        throw Error("svm_fit: gamma must be positive");
    }
    const Eigen::Index n = data.rows();

    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        y[i] = data.y[static_cast<std::size_t>(i)] == Skill::Expert ? 1.0 : -1.0;
    }

    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        K(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double kij =
                std::exp(-opts.gamma * (data.X.row(i) - data.X.row(j)).squaredNorm());
            K(i, j) = kij;
            K(j, i) = kij;
        }
    }

    SmoState s{K, y, opts.C, Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::vector<Eigen::Index> second(static_cast<std::size_t>(n));
    int steps = 0;
    bool converged = false;
    while (steps < opts.max_passes) {
        const double b_mid = s.best_bias();
        if (s.max_violation(b_mid) <= opts.tol) {
            converged = true;
            break;
        }

        // Most-violating points first; ties keep index order.
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
            return s.violation(a, b_mid) > s.violation(b, b_mid);
        });

        bool progressed = false;
        for (Eigen::Index i1 : order) {
            if (s.violation(i1, b_mid) <= opts.tol) {
                break;
            }
            // Second choice: largest |E_i1 - E_j| first, then scan order.
            std::iota(second.begin(), second.end(), 0);
            const double e1 = s.g[i1] - y[i1];
            std::stable_sort(second.begin(), second.end(), [&](Eigen::Index a, Eigen::Index b) {
                const double ea = std::abs(e1 - (s.g[a] - y[a]));
                const double eb = std::abs(e1 - (s.g[b] - y[b]));
                return ea > eb;
            });
            for (Eigen::Index i2 : second) {
                if (smo_take_step(s, i1, i2)) {
                    progressed = true;
                    ++steps;
                    break;
                }
            }
            if (progressed) {
                break;
            }
        }
        if (!progressed) {
            break;
        }
    }

    if (!converged && s.max_violation(s.best_bias()) > opts.tol) {
        throw Error("svm_fit did not converge: residual KKT violation " +
                    std::to_string(s.max_violation(s.best_bias())) + " after " +
                    std::to_string(steps) + " steps");
    }

    // Bias from averaged unbounded support vectors, kept only if it does not
    // worsen the KKT residual.
    double b_avg = 0.0;
    int unbounded = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (s.alpha[i] > 0.0 && s.alpha[i] < opts.C) {
            b_avg += y[i] - s.g[i];
            ++unbounded;
        }
    }
    double bias = s.best_bias();
    if (unbounded > 0) {
        b_avg /= static_cast<double>(unbounded);
        if (s.max_violation(b_avg) <= std::max(s.max_violation(bias), opts.tol)) {
            bias = b_avg;
        }
    }

    std::vector<Eigen::Index> sv;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (s.alpha[i] > 0.0) {
            sv.push_back(i);
        }
    }
    if (sv.empty()) {
        throw Error("svm_fit produced no support vectors");
    }

    SvmModel model;
    model.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), data.cols());
    model.alphas.resize(static_cast<Eigen::Index>(sv.size()));
    model.labels.resize(static_cast<Eigen::Index>(sv.size()));
    for (std::size_t r = 0; r < sv.size(); ++r) {
        model.support_vectors.row(static_cast<Eigen::Index>(r)) = data.X.row(sv[r]);
        model.alphas[static_cast<Eigen::Index>(r)] = s.alpha[sv[r]];
        model.labels[static_cast<Eigen::Index>(r)] = y[sv[r]];
    }
    model.bias = bias;
    model.gamma = opts.gamma;
    model.C = opts.C;
    return model;
}

double svm_decision(const SvmModel& model, const Eigen::VectorXd& x) {
    if (x.size() != model.support_vectors.cols()) {
        throw Error("svm_decision: dimension mismatch");
    }
    double f = model.bias;
    for (Eigen::Index i = 0; i < model.alphas.size(); ++i) {
        const double k =
            std::exp(-model.gamma * (model.support_vectors.row(i).transpose() - x).squaredNorm());
        f += model.alphas[i] * model.labels[i] * k;
    }
    return f;
}

Skill svm_predict(const SvmModel& model, const Eigen::VectorXd& x) {
    return svm_decision(model, x) > 0.0 ? Skill::Expert : Skill::Novice;
}

double svm_kkt_residual(const SvmModel& model, const LabeledSet& data) {
    // Match each training row to its multiplier (non-SVs have alpha = 0).
    const Eigen::Index n = data.rows();
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
    std::vector<bool> used(static_cast<std::size_t>(model.alphas.size()), false);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index r = 0; r < model.alphas.size(); ++r) {
            if (!used[static_cast<std::size_t>(r)] &&
                model.support_vectors.row(r) == data.X.row(i)) {
                alpha[i] = model.alphas[r];
                used[static_cast<std::size_t>(r)] = true;
                break;
            }
        }
    }
    double vmax = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double yi = data.y[static_cast<std::size_t>(i)] == Skill::Expert ? 1.0 : -1.0;
        const double yf = yi * svm_decision(model, data.X.row(i).transpose());
        if (alpha[i] < model.C && yf < 1.0) {
            vmax = std::max(vmax, 1.0 - yf);
        }
        if (alpha[i] > 0.0 && yf > 1.0) {
            vmax = std::max(vmax, yf - 1.0);
        }
    }
    return vmax;
}

}  // namespace skillkit
