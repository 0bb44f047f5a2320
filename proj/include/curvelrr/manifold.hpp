#pragma once

// Geometry of the SRVF unit hypersphere and of its quotient by rotations and
// reparameterizations: geodesics, log maps, alignment, and the per-anchor Gram
// tensor of tangent-space inner products.

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <numbers>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "curvelrr/curve.hpp"
#include "curvelrr/error.hpp"

namespace curvelrr {

/// Angles below this collapse to a zero tangent vector.
inline constexpr double kZeroAngle = 1e-9;
/// Angles within this of pi are treated as antipodal.
inline constexpr double kAntipodalGuard = 1e-6;

/// Discretized reparameterization gamma of [0,1], sampled on the uniform grid.
class Warp {
public:
    explicit Warp(VectorXd gamma) : gamma_(std::move(gamma)) {
        const Index T = gamma_.size();
        detail::require(T >= 2, "Warp: need at least 2 samples");
        detail::require(gamma_.allFinite(), "Warp: non-finite value");
        detail::require(std::abs(gamma_(0)) <= 1e-9 && std::abs(gamma_(T - 1) - 1.0) <= 1e-9,
                        "Warp: endpoints must be gamma(0)=0, gamma(1)=1");
        for (Index k = 1; k < T; ++k)
            detail::require(gamma_(k) >= gamma_(k - 1) - 1e-12, "Warp: gamma must be non-decreasing");
        gamma_(0) = 0.0;
        gamma_(T - 1) = 1.0;
        for (Index k = 1; k < T; ++k) gamma_(k) = std::clamp(gamma_(k), gamma_(k - 1), 1.0);
    }

    static Warp identity(Index T) { return Warp(uniform_grid(T)); }

    const VectorXd& values() const noexcept { return gamma_; }
    Index length() const noexcept { return gamma_.size(); }

    /// gamma'(t_k) by finite differences, clamped at zero.
    VectorXd slope() const {
        const double h = 1.0 / static_cast<double>(length() - 1);
        return detail::differentiate_rows(gamma_, h).col(0).cwiseMax(0.0);
    }

    /// (this o inner)(t) = this(inner(t)).
    Warp compose(const Warp& inner) const {
        detail::require(inner.length() == length(), "Warp::compose: length mismatch");
        return Warp(detail::interp_rows(gamma_, inner.gamma_).col(0));
    }

private:
    VectorXd gamma_;
};

/// beta o gamma, the reparameterized curve. The identity warp returns an exact copy.
inline Curve warp_curve(const Curve& curve, const Warp& warp) {
    detail::require(curve.length() == warp.length(), "warp_curve: length mismatch");
    if (warp.values() == uniform_grid(warp.length())) return curve;
    MatrixXd out = detail::interp_rows(curve.samples(), warp.values());
    out.row(0) = curve.samples().row(0);
    out.row(out.rows() - 1) = curve.samples().row(curve.length() - 1);
    return Curve(std::move(out));
}

/// Group action (q o gamma) sqrt(gamma'). Not renormalized.
inline Srvf warp_action(const Srvf& q, const Warp& warp) {
    detail::require(q.length() == warp.length(), "warp_action: length mismatch");
    MatrixXd out = detail::interp_rows(q.values(), warp.values());
    out.array().colwise() *= warp.slope().array().sqrt();
    return Srvf(std::move(out));
}

/// Element of SO(n).
class Rotation {
public:
    explicit Rotation(MatrixXd matrix) : matrix_(std::move(matrix)) {
        detail::require(matrix_.rows() == matrix_.cols() && matrix_.rows() >= 1, "Rotation: must be square");
        const Index n = matrix_.rows();
        detail::require((matrix_.transpose() * matrix_ - MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-8,
                        "Rotation: matrix is not orthogonal");
        detail::require(std::abs(matrix_.determinant() - 1.0) <= 1e-8, "Rotation: determinant must be +1");
    }

    static Rotation identity(Index n) { return Rotation(MatrixXd::Identity(n, n)); }

    const MatrixXd& matrix() const noexcept { return matrix_; }

    /// Applies O pointwise: rows q(t_k) -> O q(t_k).
    Srvf apply(const Srvf& q) const {
        detail::require(q.dim() == matrix_.rows(), "Rotation::apply: dimension mismatch");
        return Srvf(q.values() * matrix_.transpose());
    }

private:
    MatrixXd matrix_;
};

/// Tangent vector to the unit hypersphere at its anchor.
struct TangentVector {
    MatrixXd values;
    Srvf anchor;

    double norm() const { return std::sqrt(detail::trapezoid_sq_norm(values)); }
};

namespace detail {

inline void require_same_grid(const Srvf& a, const Srvf& b, const char* what) {
    if (a.length() != b.length() || a.dim() != b.dim())
        throw InvalidArgument(std::string(what) + ": SRVFs must share grid and dimension");
}

/// Log map on the sphere as a raw matrix. Uses the angle
/// atan2(|q1 - <q0,q1> q0|, <q0,q1>), which equals arccos<q0,q1> on the unit
/// sphere and stays accurate for nearly coincident inputs.
inline MatrixXd log_sphere_values(const Srvf& q0, const Srvf& q1) {
    const double c = l2_inner(q0, q1);
    MatrixXd u = q1.values() - c * q0.values();
    const double s = std::sqrt(trapezoid_sq_norm(u));
    const double theta = std::atan2(s, c);
    if (theta < kZeroAngle) return MatrixXd::Zero(q0.length(), q0.dim());
    if (theta > std::numbers::pi - kAntipodalGuard)
        throw InvalidArgument("log map undefined for antipodal SRVFs (theta = " + std::to_string(theta) + ")");
    u *= theta / s;
    return u;
}

} // namespace detail

/// Point at parameter tau on the great circle from q0 to q1.
inline Srvf geodesic(const Srvf& q0, const Srvf& q1, double tau) {
    detail::require_same_grid(q0, q1, "geodesic");
    const double c = std::clamp(l2_inner(q0, q1), -1.0, 1.0);
    const double theta = std::acos(c);
    if (theta < kZeroAngle) return q0;
    if (theta > std::numbers::pi - kAntipodalGuard)
        throw InvalidArgument("geodesic: antipodal SRVFs");
    const double s = std::sin(theta);
    return Srvf((std::sin(theta * (1.0 - tau)) * q0.values() + std::sin(theta * tau) * q1.values()) / s);
}

/// Inverse exponential map at q0; the result has norm equal to the geodesic angle.
inline TangentVector log_sphere(const Srvf& q0, const Srvf& q1) {
    detail::require_same_grid(q0, q1, "log_sphere");
    return TangentVector{detail::log_sphere_values(q0, q1), q0};
}

/// Best rotation of q1 onto q0 (orthogonal Procrustes with the reflection removed).
inline std::pair<Rotation, Srvf> align_rotation(const Srvf& q0, const Srvf& q1) {
    detail::require_same_grid(q0, q1, "align_rotation");
    const Index n = q0.dim();
    if (n == 1) return {Rotation::identity(1), q1};
    const VectorXd w = trapezoid_weights(q0.length());
    const MatrixXd m = q0.values().transpose() * w.asDiagonal() * q1.values();
    Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    VectorXd d = VectorXd::Ones(n);
    d(n - 1) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
    Rotation rot(svd.matrixU() * d.asDiagonal() * svd.matrixV().transpose());
    Srvf rotated = rot.apply(q1);
    return {std::move(rot), std::move(rotated)};
}

namespace detail {

/// One pass of the [1 2 1]/4 filter on interior samples; keeps endpoints and monotonicity.
inline VectorXd smooth_warp(const VectorXd& g) {
    VectorXd out = g;
    for (Index k = 1; k + 1 < g.size(); ++k) out(k) = 0.25 * (g(k - 1) + 2.0 * g(k) + g(k + 1));
    return out;
}

} // namespace detail

/// Smoothing passes tried on the lattice-optimal warp before acting on q1.
inline constexpr int kWarpSmoothingPasses = 32;

namespace detail {

/// Lattice steps (di, dj) with gcd 1 and max(di, dj) <= neighborhood.
inline std::vector<std::pair<Index, Index>> warp_steps(int neighborhood) {
    std::vector<std::pair<Index, Index>> steps;
    for (Index di = 1; di <= neighborhood; ++di)
        for (Index dj = 1; dj <= neighborhood; ++dj)
            if (std::gcd(di, dj) == 1) steps.emplace_back(di, dj);
    return steps;
}

} // namespace detail

/// Dynamic-programming reparameterization of q1 onto q0.
///
/// Minimizes |q0 - (q1 o gamma) sqrt(gamma')|^2 over piecewise-linear gamma on
/// a grid_size x grid_size lattice (0 = T). Admissible steps are (di, dj) with
/// gcd 1 and max(di, dj) <= neighborhood, so gamma' stays in
/// [1/neighborhood, neighborhood]; neighborhood 2 gives the steps (1,1), (1,2)
/// and (2,1), the default 4 adds (1,3), (3,1), (2,3), (3,2), (1,4) and so on. The lattice optimum is then polished by light smoothing. The
/// returned SRVF is unit norm and never farther from q0 than q1 itself; if no
/// candidate beats the identity, the identity warp is returned.
inline std::pair<Warp, Srvf> align_reparam(const Srvf& q0, const Srvf& q1, Index grid_size = 0,
                                           int neighborhood = 4) {
    detail::require_same_grid(q0, q1, "align_reparam");
    detail::require(neighborhood >= 1, "align_reparam: neighborhood must be >= 1");
    const Index T = q0.length();
    const Index G = grid_size == 0 ? T : grid_size;
    detail::require(G >= 3 && G <= T, "align_reparam: grid_size must lie in [3, T]");

    const VectorXd lattice = uniform_grid(G);
    const MatrixXd a = G == T ? q0.values() : detail::interp_rows(q0.values(), lattice);
    const MatrixXd b = G == T ? q1.values() : detail::interp_rows(q1.values(), lattice);
    const double h = 1.0 / static_cast<double>(G - 1);
    const auto steps = detail::warp_steps(neighborhood);

    // Row-major copies keep the inner loop on contiguous memory.
    const Index n = q0.dim();
    std::vector<double> ra(static_cast<size_t>(G * n)), rb(static_cast<size_t>(G * n));
    for (Index r = 0; r < G; ++r)
        for (Index d = 0; d < n; ++d) {
            ra[static_cast<size_t>(r * n + d)] = a(r, d);
            rb[static_cast<size_t>(r * n + d)] = b(r, d);
        }

    // Edge cost of the linear piece from (i-di, j-dj) to (i, j): trapezoid over the
    // q0 lattice points it spans, with q1 interpolated along the piece.
    auto edge = [&](Index i, Index j, Index di, Index dj) {
        const double m = static_cast<double>(dj) / static_cast<double>(di);
        const double r = std::sqrt(m);
        double acc = 0.0;
        for (Index p = 0; p <= di; ++p) {
            const double x = static_cast<double>(j - dj) + m * static_cast<double>(p);
            const Index lo = std::min<Index>(static_cast<Index>(x), G - 2);
            const double f = x - static_cast<double>(lo);
            const double* pa = &ra[static_cast<size_t>((i - di + p) * n)];
            const double* pb = &rb[static_cast<size_t>(lo * n)];
            double e = 0.0;
            for (Index d = 0; d < n; ++d) {
                const double diff = pa[d] - r * ((1.0 - f) * pb[d] + f * pb[d + n]);
                e += diff * diff;
            }
            acc += (p == 0 || p == di) ? 0.5 * e : e;
        }
        return h * acc;
    };

    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> cost(static_cast<size_t>(G * G), inf);
    std::vector<int> step(static_cast<size_t>(G * G), -1);
    auto at = [G](Index i, Index j) { return static_cast<size_t>(i * G + j); };
    cost[at(0, 0)] = 0.0;
    // Slopes lie in [1/nb, nb], so only cells inside that cone from both corners
    // can sit on a complete path.
    const auto nb = static_cast<Index>(neighborhood);
    for (Index i = 1; i < G; ++i) {
        const Index ri = G - 1 - i;
        const Index jlo = std::max<Index>({1, (i + nb - 1) / nb, G - 1 - ri * nb});
        const Index jhi = std::min<Index>({G - 1, i * nb, G - 1 - (ri + nb - 1) / nb});
        for (Index j = jlo; j <= jhi; ++j) {
            double best = inf;
            int arg = -1;
            for (size_t s = 0; s < steps.size(); ++s) {
                const auto [di, dj] = steps[s];
                if (di > i || dj > j) continue;
                const double p = cost[at(i - di, j - dj)];
                if (p == inf) continue;
                if (const double c = p + edge(i, j, di, dj); c < best) best = c, arg = static_cast<int>(s);
            }
            cost[at(i, j)] = best;
            step[at(i, j)] = arg;
        }
    }

    // Backtrack; gamma on the lattice is linear between path nodes.
    VectorXd gl(G);
    Index i = G - 1, j = G - 1;
    gl(i) = lattice(j);
    while (i > 0) {
        const int s = step[at(i, j)];
        if (s < 0) throw SolverError("align_reparam: lattice end point unreachable");
        const auto [di, dj] = steps[static_cast<size_t>(s)];
        for (Index p = 1; p < di; ++p)
            gl(i - p) = lattice(j) - h * static_cast<double>(dj) * static_cast<double>(p) / static_cast<double>(di);
        i -= di;
        j -= dj;
        gl(i) = lattice(j);
    }

    VectorXd gamma = G == T ? gl : VectorXd(detail::interp_rows(gl, uniform_grid(T)).col(0));
    Warp best_warp = Warp::identity(T);
    Srvf best = normalize_srvf(q1);
    double best_dist = l2_distance(q0, best);
    for (int pass = 0; pass <= kWarpSmoothingPasses; ++pass) {
        if (pass > 0) gamma = detail::smooth_warp(gamma);
        if (pass % 4 != 0) continue;
        Warp warp(gamma);
        Srvf warped = normalize_srvf(warp_action(q1, warp));
        if (const double d = l2_distance(q0, warped); d < best_dist) {
            best_dist = d;
            best_warp = std::move(warp);
            best = std::move(warped);
        }
    }
    return {std::move(best_warp), std::move(best)};
}

struct AlignOptions {
    int iters = 3;         ///< rotation/reparameterization alternations
    Index grid_size = 0;   ///< DP lattice size, 0 = T
    int neighborhood = 4;  ///< largest DP step component
};

/// Representative of the orbit of q1 closest to q0, by alternating rotation and
/// reparameterization alignment, stopping early once a pass no longer improves.
/// If pass_distances is given, it receives |q0 - q1~| before the first pass and
/// after every pass performed.
inline Srvf align_to(const Srvf& q0, const Srvf& q1, const AlignOptions& opts,
                     std::vector<double>* pass_distances = nullptr) {
    detail::require_same_grid(q0, q1, "align_to");
    detail::require(opts.iters >= 0, "align_to: iters must be non-negative");
    Srvf current = q1;
    if (pass_distances) pass_distances->assign(1, l2_distance(q0, current));
    double dist = l2_distance(q0, current);
    for (int it = 0; it < opts.iters; ++it) {
        Srvf next = align_rotation(q0, current).second;
        next = align_reparam(q0, next, opts.grid_size, opts.neighborhood).second;
        const double next_dist = l2_distance(q0, next);
        if (pass_distances) pass_distances->push_back(next_dist);
        // A pass that gains nothing is a fixed point; later passes would repeat it.
        if (!(next_dist < dist - 1e-12)) {
            if (next_dist <= dist) current = std::move(next);
            break;
        }
        current = std::move(next);
        dist = next_dist;
    }
    return current;
}

inline Srvf align_to(const Srvf& q0, const Srvf& q1, int iters) {
    AlignOptions opts;
    opts.iters = iters;
    return align_to(q0, q1, opts);
}

/// Lifted tangent vector of [q1] at q0 in the quotient space.
inline TangentVector log_quotient(const Srvf& q0, const Srvf& q1, const AlignOptions& opts = {}) {
    return log_sphere(q0, align_to(q0, q1, opts));
}

/// Per-anchor Gram matrices B^i_{jk} = <log_[q_i] [q_j], log_[q_i] [q_k]>.
class GramTensor {
public:
    GramTensor() = default;
    explicit GramTensor(std::vector<MatrixXd> blocks) : blocks_(std::move(blocks)) {
        const auto n = static_cast<Index>(blocks_.size());
        for (const auto& b : blocks_)
            detail::require(b.rows() == n && b.cols() == n, "GramTensor: every block must be N x N");
    }

    Index size() const noexcept { return static_cast<Index>(blocks_.size()); }
    const MatrixXd& block(Index i) const { return blocks_.at(static_cast<size_t>(i)); }
    const std::vector<MatrixXd>& blocks() const noexcept { return blocks_; }

private:
    std::vector<MatrixXd> blocks_;
};

struct GramOptions {
    AlignOptions align;
    unsigned threads = 1;  ///< 0 = hardware concurrency
};

namespace detail {

inline MatrixXd gram_block(const std::vector<Srvf>& srvfs, Index anchor, const AlignOptions& opts) {
    const Index N = static_cast<Index>(srvfs.size());
    const Srvf& qi = srvfs[static_cast<size_t>(anchor)];
    const Index T = qi.length(), n = qi.dim();
    const VectorXd sw = trapezoid_weights(T).cwiseSqrt();
    MatrixXd rows = MatrixXd::Zero(N, T * n);
    for (Index j = 0; j < N; ++j) {
        if (j == anchor) continue;
        MatrixXd v;
        try {
            v = log_sphere_values(qi, align_to(qi, srvfs[static_cast<size_t>(j)], opts));
        } catch (const InvalidArgument& e) {
            throw InvalidArgument("build_gram_tensor: anchor " + std::to_string(anchor) + ", curve " +
                                  std::to_string(j) + ": " + e.what());
        }
        v.array().colwise() *= sw.array();
        rows.row(j) = Eigen::Map<const Eigen::RowVectorXd>(v.data(), T * n);
    }
    MatrixXd b = rows * rows.transpose();
    return 0.5 * (b + b.transpose());
}

} // namespace detail

/// Builds B^i for every anchor. Anchors are independent, so they may be split
/// across threads; each block's value does not depend on the split.
inline GramTensor build_gram_tensor(const std::vector<Srvf>& srvfs, const GramOptions& opts = {}) {
    const Index N = static_cast<Index>(srvfs.size());
    detail::require(N >= 2, "build_gram_tensor: need at least 2 SRVFs");
    for (const auto& q : srvfs) detail::require_same_grid(srvfs.front(), q, "build_gram_tensor");

    std::vector<MatrixXd> blocks(static_cast<size_t>(N));
    unsigned threads = opts.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opts.threads;
    threads = std::min<unsigned>(threads, static_cast<unsigned>(N));
    if (threads <= 1) {
        for (Index i = 0; i < N; ++i) blocks[static_cast<size_t>(i)] = detail::gram_block(srvfs, i, opts.align);
        return GramTensor(std::move(blocks));
    }

    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (Index i = t; i < N; i += threads)
                    blocks[static_cast<size_t>(i)] = detail::gram_block(srvfs, i, opts.align);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return GramTensor(std::move(blocks));
}

} // namespace curvelrr
