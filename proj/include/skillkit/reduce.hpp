#pragma once

#include "skillkit/types.hpp"

#include <Eigen/Core>

#include <vector>

namespace skillkit {

/// Per-column standardization fitted on training rows. Columns whose sample
/// standard deviation is (numerically) zero are flagged constant and map to
/// zero instead of dividing by zero.
struct Scaler {
    Eigen::VectorXd means;
    Eigen::VectorXd stds;
    std::vector<bool> constant;

    Eigen::Index dim() const { return means.size(); }

    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd apply_rows(const Eigen::MatrixXd& X) const;
};

/// Principal component basis fitted on standardized training rows.
/// Rows of `basis` are orthonormal; explained_variance holds the retained
/// eigenvalues in descending order; total_variance is the sum over all
/// eigenvalues, so ratios are explained_variance / total_variance.
struct PcaModel {
    Eigen::MatrixXd basis;               // k x d, orthonormal rows
    Eigen::VectorXd explained_variance;  // k, descending
    double total_variance = 0.0;
    Eigen::Index k = 0;
};

/// Column means and sample standard deviations (n-1). Requires n >= 2 rows.
Scaler fit_scaler(const Eigen::MatrixXd& X);

/// Eigendecomposition of the sample covariance of X_std. Retains the
/// smallest k whose cumulative explained variance reaches variance_target.
/// Each basis row's largest-magnitude entry is made positive so identical
/// inputs serialize identically.
PcaModel fit_pca(const Eigen::MatrixXd& X_std, double variance_target);

/// basis * scaler(x). Dimension mismatches are errors.
Eigen::VectorXd transform(const PcaModel& model, const Scaler& scaler, const Eigen::VectorXd& x);

}  // namespace skillkit
