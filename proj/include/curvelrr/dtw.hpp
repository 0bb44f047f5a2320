#pragma once

// Banded (Sakoe-Chiba) dynamic time warping over multivariate sequences and a
// Gaussian-kernel affinity built from pairwise DTW distances.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "curvelrr/clustering.hpp"
#include "curvelrr/curve.hpp"
#include "curvelrr/error.hpp"

namespace curvelrr {

struct DtwConfig {
    double window_fraction = 0.10;  ///< band half-width as a fraction of the longer length

    void validate() const {
        detail::require(window_fraction > 0.0 && window_fraction <= 1.0,
                        "DtwConfig: window_fraction must lie in (0, 1]");
    }
};

/// Half-width ceil(window_fraction * T), at least 1.
inline Index dtw_band(const DtwConfig& cfg, Index T) {
    cfg.validate();
    return std::max<Index>(1, static_cast<Index>(std::ceil(cfg.window_fraction * static_cast<double>(T))));
}

struct DtwDiagnostics {
    bool band_widened = false;  ///< band was too narrow to join the corners
    Index band = 0;             ///< half-width actually used
};

/// Cumulative cost of the best monotone alignment with steps (1,1), (1,0),
/// (0,1), pointwise Euclidean local cost, and |i - j| <= band.
inline double dtw_banded(const MatrixXd& a, const MatrixXd& b, Index band) {
    detail::require(a.cols() == b.cols(), "dtw: sequences must share dimension");
    const Index la = a.rows(), lb = b.rows();
    detail::require(la >= 1 && lb >= 1, "dtw: empty sequence");
    detail::require(band >= std::abs(la - lb), "dtw: band cannot join the corners");
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(static_cast<size_t>(lb), inf), cur(static_cast<size_t>(lb), inf);
    for (Index i = 0; i < la; ++i) {
        std::fill(cur.begin(), cur.end(), inf);
        const Index lo = std::max<Index>(0, i - band), hi = std::min<Index>(lb - 1, i + band);
        for (Index j = lo; j <= hi; ++j) {
            const double cost = (a.row(i) - b.row(j)).norm();
            double best;
            if (i == 0 && j == 0) best = 0.0;
            else {
                best = inf;
                if (i > 0) best = std::min(best, prev[static_cast<size_t>(j)]);
                if (j > 0) best = std::min(best, cur[static_cast<size_t>(j - 1)]);
                if (i > 0 && j > 0) best = std::min(best, prev[static_cast<size_t>(j - 1)]);
            }
            cur[static_cast<size_t>(j)] = best + cost;
        }
        std::swap(prev, cur);
    }
    return prev[static_cast<size_t>(lb - 1)];
}

inline double dtw_distance(const Curve& a, const Curve& b, const DtwConfig& cfg = {},
                           DtwDiagnostics* diag = nullptr) {
    detail::require(a.dim() == b.dim(), "dtw_distance: curves must share dimension");
    Index band = dtw_band(cfg, std::max(a.length(), b.length()));
    const Index needed = std::abs(a.length() - b.length());
    const bool widened = band < needed;
    if (widened) band = needed;
    if (diag) *diag = DtwDiagnostics{widened, band};
    return dtw_banded(a.samples(), b.samples(), band);
}

enum class SigmaRule { median, mean };

/// Pairwise DTW distance matrix (symmetric, zero diagonal).
inline MatrixXd dtw_distances(const std::vector<Curve>& curves, const DtwConfig& cfg = {}) {
    const auto N = static_cast<Index>(curves.size());
    MatrixXd d = MatrixXd::Zero(N, N);
    for (Index i = 0; i < N; ++i)
        for (Index j = i + 1; j < N; ++j)
            d(i, j) = d(j, i) = dtw_distance(curves[static_cast<size_t>(i)], curves[static_cast<size_t>(j)], cfg);
    return d;
}

/// Kernel bandwidth from the off-diagonal distances.
inline double kernel_sigma(const MatrixXd& d, SigmaRule rule) {
    std::vector<double> off;
    for (Index i = 0; i < d.rows(); ++i)
        for (Index j = i + 1; j < d.cols(); ++j) off.push_back(d(i, j));
    if (off.empty()) return 0.0;
    if (rule == SigmaRule::mean) {
        double s = 0.0;
        for (double x : off) s += x;
        return s / static_cast<double>(off.size());
    }
    std::sort(off.begin(), off.end());
    const size_t m = off.size() / 2;
    return off.size() % 2 ? off[m] : 0.5 * (off[m - 1] + off[m]);
}

/// A_ij = exp(-d_ij^2 / (2 sigma^2)); all ones when sigma is zero.
inline Affinity distance_affinity(const MatrixXd& d, SigmaRule rule = SigmaRule::median) {
    const double sigma = kernel_sigma(d, rule);
    if (!(sigma > 0.0)) return Affinity(MatrixXd::Ones(d.rows(), d.cols()));
    MatrixXd a = (-(d.array().square()) / (2.0 * sigma * sigma)).exp().matrix();
    a = 0.5 * (a + a.transpose());
    a.diagonal().setOnes();
    return Affinity(std::move(a));
}

inline Affinity dtw_affinity(const std::vector<Curve>& curves, const DtwConfig& cfg = {},
                             SigmaRule rule = SigmaRule::median) {
    detail::require(curves.size() >= 2, "dtw_affinity: need at least 2 curves");
    return distance_affinity(dtw_distances(curves, cfg), rule);
}

} // namespace curvelrr
