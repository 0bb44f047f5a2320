#pragma once

// Euclidean low-rank representation with a squared-Frobenius noise term:
//
//   min_{Z,E} |Z|_* + lambda/2 |E|_F^2   s.t.  X = X Z + E
//
// solved by linearized ADM with adaptive penalty, sharing svt() with the
// curve solver. Columns of X are data points.

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "curvelrr/error.hpp"
#include "curvelrr/solver.hpp"

namespace curvelrr {

struct LrrConfig {
    double lambda = 0.1;  ///< weight of the fit term
    double mu0 = 0.1;     ///< initial penalty
    double mu_max = 1e6;
    double rho0 = 1.5;
    double eps1 = 1e-4;   ///< relative constraint tolerance
    double eps2 = 1e-4;   ///< relative step tolerance
    int max_iters = 500;

    void validate() const {
        detail::require(lambda > 0.0 && std::isfinite(lambda), "LrrConfig: lambda must be positive");
        detail::require(mu0 > 0.0 && mu0 <= mu_max, "LrrConfig: need 0 < mu0 <= mu_max");
        detail::require(rho0 > 1.0, "LrrConfig: rho0 must exceed 1");
        detail::require(eps1 > 0.0 && eps2 > 0.0, "LrrConfig: tolerances must be positive");
        detail::require(max_iters >= 1, "LrrConfig: max_iters must be >= 1");
    }
};

struct LrrResult {
    MatrixXd Z;
    int iters = 0;
    bool converged = false;
    double fit_residual = 0.0;         ///< |X - XZ|_F
    double constraint_residual = 0.0;  ///< |X - XZ - E|_F / |X|_F
};

inline LrrResult euclidean_lrr(const MatrixXd& X, const LrrConfig& cfg = {}) {
    cfg.validate();
    detail::require(X.cols() >= 2, "euclidean_lrr: need at least 2 columns");
    detail::require(X.allFinite(), "euclidean_lrr: non-finite input");
    const Index N = X.cols();
    const double xnorm = X.norm();
    LrrResult out;
    if (xnorm == 0.0) {
        out.Z = MatrixXd::Zero(N, N);
        out.converged = true;
        return out;
    }
    Eigen::BDCSVD<MatrixXd> top(X);
    const double eta = 1.02 * top.singularValues()(0) * top.singularValues()(0);

    MatrixXd Z = MatrixXd::Zero(N, N);
    MatrixXd E = MatrixXd::Zero(X.rows(), N);
    MatrixXd Y = MatrixXd::Zero(X.rows(), N);
    double mu = cfg.mu0;
    for (int k = 0; k < cfg.max_iters; ++k) {
        const MatrixXd XZ = X * Z;
        const MatrixXd Enew = (mu / (cfg.lambda + mu)) * (X - XZ + Y / mu);
        const MatrixXd G = X.transpose() * (X - XZ - Enew + Y / mu);
        const MatrixXd Znew = svt(Z + G / eta, 1.0 / (mu * eta));
        const MatrixXd R = X - X * Znew - Enew;
        const double change = mu * std::max(std::sqrt(eta) * (Znew - Z).norm(), (Enew - E).norm()) / xnorm;
        Z = Znew;
        E = Enew;
        Y += mu * R;
        out.constraint_residual = R.norm() / xnorm;
        out.iters = k + 1;
        if (!std::isfinite(change) || !std::isfinite(out.constraint_residual)) {
            std::ostringstream msg;
            msg << "euclidean_lrr: non-finite iterate at iteration " << k;
            throw SolverError(msg.str());
        }
        if (out.constraint_residual < cfg.eps1 && change < cfg.eps2) {
            out.converged = true;
            break;
        }
        if (change < cfg.eps2) mu = std::min(cfg.mu_max, cfg.rho0 * mu);
    }
    out.Z = std::move(Z);
    out.fit_residual = (X - X * out.Z).norm();
    return out;
}

} // namespace curvelrr
