#pragma once

// Discretized curves on the uniform grid of [0,1], their square-root velocity
// functions (SRVFs), and trapezoidal L2 arithmetic.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "curvelrr/error.hpp"

namespace curvelrr {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Default floor under the square root of the speed in to_srvf.
inline constexpr double kSrvfSpeedFloor = 1e-8;

inline VectorXd uniform_grid(Index T) {
    return VectorXd::LinSpaced(T, 0.0, 1.0);
}

/// Trapezoidal weights for a uniform grid of T points on [0,1]; they sum to 1.
inline VectorXd trapezoid_weights(Index T) {
    detail::require(T >= 2, "trapezoid_weights: need at least 2 points");
    const double h = 1.0 / static_cast<double>(T - 1);
    VectorXd w = VectorXd::Constant(T, h);
    w(0) = w(T - 1) = 0.5 * h;
    return w;
}

namespace detail {

inline void check_samples(const MatrixXd& m, const char* what) {
    if (m.rows() < 3 || m.cols() < 1)
        throw InvalidArgument(std::string(what) + ": need T >= 3 samples and n >= 1 dimensions, got " +
                              std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    if (!m.allFinite()) throw InvalidArgument(std::string(what) + ": non-finite sample value");
}

/// Second-order finite differences along rows: central in the interior,
/// one-sided three-point at both ends. Rows are samples spaced by h.
inline MatrixXd differentiate_rows(const MatrixXd& f, double h) {
    const Index T = f.rows();
    MatrixXd d(T, f.cols());
    if (T == 2) {
        d.row(0) = d.row(1) = (f.row(1) - f.row(0)) / h;
        return d;
    }
    for (Index k = 1; k + 1 < T; ++k) d.row(k) = (f.row(k + 1) - f.row(k - 1)) / (2.0 * h);
    d.row(0) = (-3.0 * f.row(0) + 4.0 * f.row(1) - f.row(2)) / (2.0 * h);
    d.row(T - 1) = (3.0 * f.row(T - 1) - 4.0 * f.row(T - 2) + f.row(T - 3)) / (2.0 * h);
    return d;
}

/// Linear interpolation of uniformly sampled rows (parameter range [0,1]) at
/// arbitrary positions, clamped to the domain.
inline MatrixXd interp_rows(const MatrixXd& f, const VectorXd& positions) {
    const Index T = f.rows();
    const double scale = static_cast<double>(T - 1);
    MatrixXd out(positions.size(), f.cols());
    for (Index k = 0; k < positions.size(); ++k) {
        const double s = std::clamp(positions(k), 0.0, 1.0) * scale;
        const Index i = std::min<Index>(static_cast<Index>(s), T - 2);
        const double a = s - static_cast<double>(i);
        out.row(k) = (1.0 - a) * f.row(i) + a * f.row(i + 1);
    }
    return out;
}

inline double trapezoid_sq_norm(const MatrixXd& f) {
    return trapezoid_weights(f.rows()).dot(f.rowwise().squaredNorm());
}

} // namespace detail

/// Uniformly sampled curve beta: [0,1] -> R^n. Row k holds beta(t_k), t_k = k/(T-1).
class Curve {
public:
    explicit Curve(MatrixXd samples) : samples_(std::move(samples)) {
        detail::check_samples(samples_, "Curve");
    }

    const MatrixXd& samples() const noexcept { return samples_; }
    Index length() const noexcept { return samples_.rows(); }
    Index dim() const noexcept { return samples_.cols(); }
    double spacing() const noexcept { return 1.0 / static_cast<double>(length() - 1); }
    VectorXd grid() const { return uniform_grid(length()); }

    friend bool operator==(const Curve& a, const Curve& b) {
        return a.samples_.rows() == b.samples_.rows() && a.samples_.cols() == b.samples_.cols() &&
               a.samples_ == b.samples_;
    }

private:
    MatrixXd samples_;
};

/// Discretized SRVF q on the same uniform grid layout as Curve. Not necessarily
/// unit norm; normalize_srvf projects onto the unit hypersphere.
class Srvf {
public:
    explicit Srvf(MatrixXd values) : values_(std::move(values)) {
        detail::check_samples(values_, "Srvf");
    }

    const MatrixXd& values() const noexcept { return values_; }
    Index length() const noexcept { return values_.rows(); }
    Index dim() const noexcept { return values_.cols(); }
    VectorXd grid() const { return uniform_grid(length()); }

private:
    MatrixXd values_;
};

inline Curve resample(const Curve& curve, Index T_new) {
    detail::require(T_new >= 3, "resample: T_new must be >= 3, got " + std::to_string(T_new));
    if (T_new == curve.length()) return curve;
    MatrixXd out = detail::interp_rows(curve.samples(), uniform_grid(T_new));
    out.row(0) = curve.samples().row(0);
    out.row(T_new - 1) = curve.samples().row(curve.length() - 1);
    return Curve(std::move(out));
}

/// Velocity estimate of the curve on its own grid.
inline MatrixXd derivative(const Curve& curve) {
    return detail::differentiate_rows(curve.samples(), curve.spacing());
}

inline double l2_inner(const Srvf& q1, const Srvf& q2) {
    detail::require(q1.length() == q2.length() && q1.dim() == q2.dim(),
                    "l2_inner: grids or dimensions differ");
    const VectorXd w = trapezoid_weights(q1.length());
    return w.dot((q1.values().array() * q2.values().array()).matrix().rowwise().sum());
}

inline double l2_norm(const Srvf& q) {
    return std::sqrt(detail::trapezoid_sq_norm(q.values()));
}

inline double l2_distance(const Srvf& q1, const Srvf& q2) {
    detail::require(q1.length() == q2.length() && q1.dim() == q2.dim(),
                    "l2_distance: grids or dimensions differ");
    return std::sqrt(detail::trapezoid_sq_norm(q1.values() - q2.values()));
}

inline Srvf normalize_srvf(const Srvf& q) {
    const double norm = l2_norm(q);
    if (!(norm > 0.0) || !std::isfinite(norm))
        throw InvalidArgument("normalize_srvf: zero-norm SRVF");
    return Srvf(q.values() / norm);
}

/// q(t) = beta'(t) / sqrt(max(|beta'(t)|, eps)), projected to unit L2 norm.
inline Srvf to_srvf(const Curve& curve, double eps = kSrvfSpeedFloor) {
    detail::require(eps > 0.0, "to_srvf: eps must be positive");
    const MatrixXd velocity = derivative(curve);
    const VectorXd speed = velocity.rowwise().norm();
    if (!(speed.maxCoeff() > 0.0))
        throw InvalidArgument("to_srvf: constant curve has no SRVF");
    MatrixXd q(velocity.rows(), velocity.cols());
    for (Index k = 0; k < velocity.rows(); ++k)
        q.row(k) = velocity.row(k) / std::sqrt(std::max(speed(k), eps));
    return normalize_srvf(Srvf(std::move(q)));
}

} // namespace curvelrr
