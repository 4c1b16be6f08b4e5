#include "least_squares.hpp"

#include <algorithm>
#include <cmath>

namespace ionlogic::detail {

namespace {

// Largest cosine between the residual vector and a Jacobian column.
double scaled_gradient(const Eigen::MatrixXd& jac, const Eigen::VectorXd& r) {
    const double rnorm = r.norm();
    if (rnorm == 0.0) return 0.0;
    double worst = 0.0;
    for (Eigen::Index j = 0; j < jac.cols(); ++j) {
        const double cnorm = jac.col(j).norm();
        if (cnorm == 0.0) continue;
        worst = std::max(worst, std::abs(jac.col(j).dot(r)) / (cnorm * rnorm));
    }
    return worst;
}

}  // namespace

LmResult levenberg_marquardt(const ResidualFn& fn, Eigen::VectorXd x0, const LmOptions& opts) {
    Eigen::VectorXd x = std::move(x0);
    Eigen::VectorXd r;
    Eigen::MatrixXd jac;
    fn(x, r, jac);
    double cost = r.squaredNorm();
    double lambda = 1e-3;

    LmResult res;
    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        if (cost <= 1e-28 * static_cast<double>(r.size()) || scaled_gradient(jac, r) <= opts.gradient_tol) break;
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd g = jac.transpose() * r;
        const Eigen::VectorXd diag = jtj.diagonal().cwiseMax(1e-300);

        bool improved = false;
        Eigen::VectorXd step;
        for (int tries = 0; tries < 40; ++tries) {
            Eigen::MatrixXd a = jtj;
            a.diagonal() += lambda * diag;
            step = a.ldlt().solve(-g);
            Eigen::VectorXd x_new = x + step;
            Eigen::VectorXd r_new;
            Eigen::MatrixXd jac_new;
            fn(x_new, r_new, jac_new);
            const double cost_new = r_new.squaredNorm();
            if (std::isfinite(cost_new) && cost_new <= cost) {
                x = std::move(x_new);
                r = std::move(r_new);
                jac = std::move(jac_new);
                cost = cost_new;
                lambda = std::max(lambda / 3.0, 1e-15);
                improved = true;
                break;
            }
            lambda *= 4.0;
        }
        if (!improved) break;
        if (step.norm() <= opts.step_tol * (x.norm() + opts.step_tol)) {
            ++it;
            break;
        }
    }

    res.x = x;
    res.jtj = jac.transpose() * jac;
    res.cost = cost;
    res.gradient_norm = scaled_gradient(jac, r);
    res.iterations = it;
    // Residuals at rounding level count as an exact fit.
    const bool exact = cost <= 1e-24 * static_cast<double>(r.size());
    res.converged = exact || res.gradient_norm <= opts.converged_tol;
    return res;
}

}  // namespace ionlogic::detail
