#pragma once

#include <functional>

#include <Eigen/Dense>

namespace ionlogic::detail {

/// Residuals r(x) and their Jacobian ∂r/∂x; residuals are expected to be
/// already divided by the per-point uncertainty.
using ResidualFn = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd& jac)>;

struct LmOptions {
    int max_iterations = 500;
    double gradient_tol = 1e-10;    // scaled gradient (cosine) for early exit
    double converged_tol = 1e-5;    // scaled gradient required for `converged`
    double step_tol = 1e-14;
};

struct LmResult {
    Eigen::VectorXd x;
    Eigen::MatrixXd jtj;  // JᵀJ at the solution
    double cost = 0.0;    // Σ r²
    double gradient_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Levenberg–Marquardt with Marquardt's diagonal scaling.
LmResult levenberg_marquardt(const ResidualFn& fn, Eigen::VectorXd x0, const LmOptions& opts = {});

}  // namespace ionlogic::detail
