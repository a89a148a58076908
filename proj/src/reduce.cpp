#include "skillkit/reduce.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace skillkit {

namespace {
constexpr double kConstantColumnEps = 1e-12;
}

Eigen::VectorXd Scaler::apply(const Eigen::VectorXd& x) const {
    if (x.size() != dim()) {
        throw Error("scaler dimension mismatch: expected " + std::to_string(dim()) + ", got " +
                    std::to_string(x.size()));
    }
    Eigen::VectorXd out(dim());
    for (Eigen::Index j = 0; j < dim(); ++j) {
        out[j] = constant[static_cast<std::size_t>(j)] ? 0.0 : (x[j] - means[j]) / stds[j];
    }
    return out;
}

Eigen::MatrixXd Scaler::apply_rows(const Eigen::MatrixXd& X) const {
    Eigen::MatrixXd out(X.rows(), X.cols());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        out.row(i) = apply(X.row(i).transpose()).transpose();
    }
    return out;
}

Scaler fit_scaler(const Eigen::MatrixXd& X) {
    if (X.rows() < 2) {
        throw Error("fit_scaler needs at least 2 rows");
    }
    const auto n = static_cast<double>(X.rows());
    Scaler s;
    s.means = X.colwise().mean();
    s.stds.resize(X.cols());
    s.constant.resize(static_cast<std::size_t>(X.cols()), false);
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double ss = (X.col(j).array() - s.means[j]).square().sum();
        const double sd = std::sqrt(ss / (n - 1.0));
        if (sd <= kConstantColumnEps * (1.0 + std::abs(s.means[j]))) {
            s.stds[j] = 0.0;
            s.constant[static_cast<std::size_t>(j)] = true;
        } else {
            s.stds[j] = sd;
        }
    }
    return s;
}

PcaModel fit_pca(const Eigen::MatrixXd& X_std, double variance_target) {
    if (!(variance_target > 0.0) || variance_target > 1.0) {
        throw Error("variance_target must be in (0, 1]");
    }
    if (X_std.rows() < 2) {
        throw Error("fit_pca needs at least 2 rows");
    }
    const Eigen::Index d = X_std.cols();
    const auto n = static_cast<double>(X_std.rows());

    const Eigen::RowVectorXd mean = X_std.colwise().mean();
    const Eigen::MatrixXd centered = X_std.rowwise() - mean;
    const Eigen::MatrixXd cov = centered.transpose() * centered / (n - 1.0);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) {
        throw Error("eigendecomposition failed");
    }

    // Eigen returns ascending order; flip to descending.
    Eigen::VectorXd evals(d);
    Eigen::MatrixXd evecs(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        evals[j] = std::max(solver.eigenvalues()[d - 1 - j], 0.0);
        evecs.col(j) = solver.eigenvectors().col(d - 1 - j);
    }

    const double total = evals.sum();
    if (!(total > 0.0)) {
        throw Error("fit_pca: input has zero variance in every direction");
    }

    Eigen::Index k = d;
    double cum = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
        cum += evals[j];
        if (cum >= variance_target * total) {
            k = j + 1;
            break;
        }
    }

    PcaModel model;
    model.k = k;
    model.total_variance = total;
    model.explained_variance = evals.head(k);
    model.basis.resize(k, d);
    for (Eigen::Index j = 0; j < k; ++j) {
        Eigen::VectorXd v = evecs.col(j);
        Eigen::Index imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        if (v[imax] < 0.0) {
            v = -v;
        }
        model.basis.row(j) = v.transpose();
    }
    return model;
}

Eigen::VectorXd transform(const PcaModel& model, const Scaler& scaler, const Eigen::VectorXd& x) {
    if (model.basis.cols() != scaler.dim()) {
        throw Error("pca/scaler dimension mismatch");
    }
    return model.basis * scaler.apply(x);
}

}  // namespace skillkit
