#pragma once

// Low-rank coefficient learning over per-anchor tangent-space Gram matrices:
//
//   min_W  lambda |W|_* + 1/2 sum_i w_i B^i w_i^T   s.t.  W 1 = 1
//
// solved by a linearized alternating direction method with adaptive penalty.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "curvelrr/error.hpp"
#include "curvelrr/manifold.hpp"

namespace curvelrr {

struct SolverConfig {
    double lambda = 0.1;    ///< nuclear-norm weight
    double beta0 = 0.1;     ///< initial penalty
    double beta_max = 10.0;
    double rho0 = 1.1;      ///< penalty growth factor
    double eps1 = 1e-4;     ///< tolerance on beta |W_{k+1} - W_k|_F
    double eps2 = 1e-4;     ///< tolerance on |W 1 - 1|
    int max_iters = 500;

    void validate() const {
        detail::require(lambda >= 0.0 && std::isfinite(lambda), "SolverConfig: lambda must be >= 0");
        detail::require(beta0 > 0.0 && beta_max > 0.0 && beta0 <= beta_max,
                        "SolverConfig: need 0 < beta0 <= beta_max");
        detail::require(rho0 > 1.0, "SolverConfig: rho0 must exceed 1");
        detail::require(eps1 > 0.0 && eps2 > 0.0, "SolverConfig: tolerances must be positive");
        detail::require(max_iters >= 1, "SolverConfig: max_iters must be >= 1");
    }
};

struct SolverState {
    MatrixXd W;
    VectorXd y;   ///< multiplier of W 1 = 1
    double beta = 0.1;
    double eta = 1.0;  ///< linearization constant
    int iter = 0;
};

struct SolveReport {
    MatrixXd W;
    int iters = 0;
    double primal_residual = 0.0;  ///< |W 1 - 1|
    bool converged = false;
    std::vector<double> objective_trace;
    std::vector<double> beta_trace;  ///< penalty used in each iteration
};

/// Linearization constant: the larger of max_i |B^i|_F and max_i |B^i|_2^2,
/// plus N + 1.
inline double linearization_constant(const GramTensor& gram) {
    double frob = 0.0, spec_sq = 0.0;
    for (const auto& b : gram.blocks()) {
        frob = std::max(frob, b.norm());
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(b, Eigen::EigenvaluesOnly);
        const double s = es.eigenvalues().cwiseAbs().maxCoeff();
        spec_sq = std::max(spec_sq, s * s);
    }
    return std::max(frob, spec_sq) + static_cast<double>(gram.size()) + 1.0;
}

inline SolverState initial_state(const GramTensor& gram, const SolverConfig& cfg) {
    const Index N = gram.size();
    SolverState s;
    s.W = MatrixXd::Zero(N, N);
    s.y = VectorXd::Zero(N);
    s.beta = cfg.beta0;
    s.eta = linearization_constant(gram);
    return s;
}

/// Smooth part F(W) = 1/2 sum_i w_i B^i w_i^T + <y, W1 - 1> + beta/2 |W1 - 1|^2.
inline double smooth_objective(const MatrixXd& W, const VectorXd& y, double beta, const GramTensor& gram) {
    double f = 0.0;
    for (Index i = 0; i < W.rows(); ++i) f += 0.5 * W.row(i).dot(W.row(i) * gram.block(i));
    const VectorXd r = W.rowwise().sum() - VectorXd::Ones(W.rows());
    return f + y.dot(r) + 0.5 * beta * r.squaredNorm();
}

/// lambda |W|_* + 1/2 sum_i w_i B^i w_i^T.
inline double clrr_objective(const MatrixXd& W, const GramTensor& gram, double lambda) {
    double f = 0.0;
    for (Index i = 0; i < W.rows(); ++i) f += 0.5 * W.row(i).dot(W.row(i) * gram.block(i));
    Eigen::BDCSVD<MatrixXd> svd(W);
    return lambda * svd.singularValues().sum() + f;
}

/// Gradient of F at the state: row i is w_i B^i + y_i 1^T + beta (w_i 1 - 1) 1^T.
inline MatrixXd gradient_F(const SolverState& state, const GramTensor& gram) {
    const Index N = gram.size();
    detail::require(state.W.rows() == N && state.W.cols() == N && state.y.size() == N,
                    "gradient_F: W must be N x N and y length N");
    MatrixXd g(N, N);
    const VectorXd r = state.W.rowwise().sum() - VectorXd::Ones(N);
    for (Index i = 0; i < N; ++i)
        g.row(i) = state.W.row(i) * gram.block(i) +
                   Eigen::RowVectorXd::Constant(N, state.y(i) + state.beta * r(i));
    return g;
}

/// Singular value thresholding, the proximal map of tau |.|_*. If shrunk is
/// given it receives the thresholded singular values.
inline MatrixXd svt(const MatrixXd& M, double tau, VectorXd* shrunk = nullptr) {
    detail::require(tau >= 0.0, "svt: tau must be non-negative");
    if (!M.allFinite()) throw SolverError("svt: non-finite input");
    Eigen::BDCSVD<MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) throw SolverError("svt: SVD failed");
    const VectorXd s = (svd.singularValues().array() - tau).cwiseMax(0.0).matrix();
    if (shrunk) *shrunk = s;
    MatrixXd out = svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
    if (!out.allFinite()) throw SolverError("svt: non-finite result");
    return out;
}

/// One linearized proximal step: svt(W - dF/(eta beta), lambda/(eta beta)).
inline MatrixXd update_W(const SolverState& state, const GramTensor& gram, const SolverConfig& cfg,
                         VectorXd* shrunk = nullptr) {
    const double step = state.eta * state.beta;
    return svt(state.W - gradient_F(state, gram) / step, cfg.lambda / step, shrunk);
}

namespace detail {

inline void check_gram(const GramTensor& gram) {
    require(gram.size() >= 1, "solve: empty Gram tensor");
    for (const auto& b : gram.blocks())
        if (!b.allFinite()) throw InvalidArgument("solve: Gram tensor has non-finite entries");
}

} // namespace detail

inline SolveReport solve(const GramTensor& gram, const SolverConfig& cfg = {}) {
    cfg.validate();
    detail::check_gram(gram);
    const Index N = gram.size();
    SolverState state = initial_state(gram, cfg);
    SolveReport report;
    VectorXd sv;
    double residual = std::sqrt(static_cast<double>(N));
    for (int k = 0; k < cfg.max_iters; ++k) {
        state.iter = k;
        MatrixXd next = update_W(state, gram, cfg, &sv);
        const double change = state.beta * (next - state.W).norm();
        state.W = std::move(next);
        const VectorXd r = state.W.rowwise().sum() - VectorXd::Ones(N);
        residual = r.norm();
        if (!std::isfinite(change) || !std::isfinite(residual)) {
            std::ostringstream msg;
            msg << "solve: non-finite iterate at iteration " << k << " (change " << change << ", residual "
                << residual << ")";
            throw SolverError(msg.str());
        }
        double fit = 0.0;
        for (Index i = 0; i < N; ++i) fit += 0.5 * state.W.row(i).dot(state.W.row(i) * gram.block(i));
        report.objective_trace.push_back(cfg.lambda * sv.sum() + fit);
        report.beta_trace.push_back(state.beta);

        state.y += state.beta * r;
        const bool small_step = change <= cfg.eps1;
        report.iters = k + 1;
        if (small_step && residual <= cfg.eps2) {
            report.converged = true;
            break;
        }
        state.beta = std::min(cfg.beta_max, (small_step ? cfg.rho0 : 1.0) * state.beta);
    }
    report.W = std::move(state.W);
    report.primal_residual = residual;
    return report;
}

} // namespace curvelrr
