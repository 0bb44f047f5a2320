#pragma once

// Synthetic datasets: progressively warped sine clusters and randomly
// shifted/stretched copies of smooth basis curves.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "curvelrr/curve.hpp"
#include "curvelrr/dataset.hpp"
#include "curvelrr/manifold.hpp"

namespace curvelrr {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Parameters of the random warps applied to generated curves.
///
/// A warp moves a random portion [a, b] of the domain by a shift drawn from
/// shift_range and rescales it by a factor drawn log-uniformly from
/// stretch_range; the knots are joined by a monotone cubic. A smooth sine-series
/// perturbation of amplitude local_warp_amplitude (< 1) is composed inside.
struct WarpSpec {
    Interval shift_range{0.0, 0.0};
    Interval stretch_range{1.0, 1.0};
    double local_warp_amplitude = 0.0;
    std::uint64_t seed = 0;

    void validate() const {
        detail::require(shift_range.lo <= shift_range.hi, "WarpSpec: empty shift range");
        detail::require(stretch_range.lo > 0.0 && stretch_range.lo <= stretch_range.hi,
                        "WarpSpec: stretch range must be positive and non-empty");
        detail::require(local_warp_amplitude >= 0.0 && local_warp_amplitude < 1.0,
                        "WarpSpec: local_warp_amplitude must lie in [0, 1)");
    }

    nlohmann::json to_json() const {
        return {{"shift_range", {shift_range.lo, shift_range.hi}},
                {"stretch_range", {stretch_range.lo, stretch_range.hi}},
                {"local_warp_amplitude", local_warp_amplitude},
                {"seed", seed}};
    }
};

/// Slopes of the shift/stretch piece are kept within [1/kMaxKnotSlope, kMaxKnotSlope].
inline constexpr double kMaxKnotSlope = 3.0;

namespace detail {

/// Monotone piecewise-cubic Hermite interpolation (Fritsch-Carlson) of
/// increasing knots, evaluated at x.
inline double pchip(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    const size_t m = xs.size();
    std::vector<double> d(m - 1), s(m);
    for (size_t k = 0; k + 1 < m; ++k) d[k] = (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k]);
    s[0] = d[0];
    s[m - 1] = d[m - 2];
    for (size_t k = 1; k + 1 < m; ++k) {
        if (d[k - 1] * d[k] <= 0.0) {
            s[k] = 0.0;
        } else {
            const double w1 = 2.0 * (xs[k + 1] - xs[k]) + (xs[k] - xs[k - 1]);
            const double w2 = (xs[k + 1] - xs[k]) + 2.0 * (xs[k] - xs[k - 1]);
            s[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
        }
    }
    size_t k = 0;
    while (k + 2 < m && x > xs[k + 1]) ++k;
    const double h = xs[k + 1] - xs[k];
    const double u = std::clamp((x - xs[k]) / h, 0.0, 1.0);
    const double u2 = u * u, u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * ys[k] + (u3 - 2 * u2 + u) * h * s[k] + (-2 * u3 + 3 * u2) * ys[k + 1] +
           (u3 - u2) * h * s[k + 1];
}

} // namespace detail

/// Draws one warp from spec with all deformations scaled by strength in [0, 1].
/// Parameters that produce no deformation yield exactly Warp::identity(T).
inline Warp random_warp(Index T, const WarpSpec& spec, double strength, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double a = 0.05 + 0.5 * unit(rng);
    const double b = a + 0.2 + (0.75 - a) * unit(rng);
    double shift = strength * (spec.shift_range.lo + (spec.shift_range.hi - spec.shift_range.lo) * unit(rng));
    const double log_lo = std::log(spec.stretch_range.lo), log_hi = std::log(spec.stretch_range.hi);
    double stretch = std::exp(strength * (log_lo + (log_hi - log_lo) * unit(rng)));
    std::array<double, 3> coef{};
    double total = 0.0;
    for (double& c : coef) total += std::abs(c = gauss(rng));
    const double amplitude = strength * spec.local_warp_amplitude;

    if (shift == 0.0 && stretch == 1.0 && amplitude == 0.0) return Warp::identity(T);

    auto slopes_ok = [&](double s, double r) {
        const double a2 = a + s, b2 = a2 + r * (b - a);
        const double s1 = a2 / a, s3 = (1.0 - b2) / (1.0 - b);
        auto in = [](double v) { return v >= 1.0 / kMaxKnotSlope && v <= kMaxKnotSlope; };
        return in(s1) && in(r) && in(s3);
    };
    for (int tries = 0; tries < 60 && !slopes_ok(shift, stretch); ++tries) {
        shift *= 0.5;
        stretch = std::sqrt(stretch);
    }
    if (!slopes_ok(shift, stretch)) shift = 0.0, stretch = 1.0;
    const std::vector<double> xs{0.0, a, b, 1.0};
    const std::vector<double> ys{0.0, a + shift, a + shift + stretch * (b - a), 1.0};

    const VectorXd t = uniform_grid(T);
    VectorXd g(T);
    for (Index k = 0; k < T; ++k) {
        double local = t(k);
        if (total > 0.0 && amplitude > 0.0)
            for (size_t j = 0; j < coef.size(); ++j) {
                const double w = static_cast<double>(j + 1) * std::numbers::pi;
                local += amplitude * coef[j] / total * std::sin(w * t(k)) / w;
            }
        g(k) = std::clamp(detail::pchip(xs, ys, std::clamp(local, 0.0, 1.0)), 0.0, 1.0);
    }
    g(0) = 0.0;
    g(T - 1) = 1.0;
    for (Index k = 1; k < T; ++k) g(k) = std::max(g(k), g(k - 1));
    return Warp(std::move(g));
}

inline constexpr double kSineBaseFrequency = 1.0;

/// c clusters of per_cluster 1-D curves of length T. Cluster k (0-based) is
/// sin(2 pi f_k gamma(t)) with f_k = kSineBaseFrequency * (k + 1); instance m
/// of a cluster uses warp strength m / (per_cluster - 1), so the first curve of
/// each cluster is the unwarped sine.
inline Dataset gen_sine_clusters(int c, int per_cluster, Index T, const WarpSpec& spec) {
    detail::require(c >= 1 && per_cluster >= 1, "gen_sine_clusters: need c >= 1 and per_cluster >= 1");
    detail::require(T >= 3, "gen_sine_clusters: need T >= 3");
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    Dataset ds;
    ds.name = "sine";
    const VectorXd t = uniform_grid(T);
    for (int k = 0; k < c; ++k) {
        const double freq = kSineBaseFrequency * (k + 1);
        for (int m = 0; m < per_cluster; ++m) {
            const double strength = per_cluster > 1 ? static_cast<double>(m) / (per_cluster - 1) : 0.0;
            const Warp w = random_warp(T, spec, strength, rng);
            MatrixXd s(T, 1);
            for (Index i = 0; i < T; ++i) s(i, 0) = std::sin(2.0 * std::numbers::pi * freq * w.values()(i));
            ds.curves.emplace_back(std::move(s));
            ds.truth.push_back(k);
        }
    }
    ds.meta = {{"generator", "sine"},
               {"clusters", c},
               {"per_cluster", per_cluster},
               {"T", T},
               {"base_frequency", kSineBaseFrequency},
               {"warp", spec.to_json()}};
    return ds;
}

/// per_cluster randomly warped copies of every basis curve; label = basis index.
inline Dataset gen_warped_basis_clusters(const std::vector<Curve>& bases, int per_cluster, const WarpSpec& spec) {
    detail::require(!bases.empty() && per_cluster >= 1, "gen_warped_basis_clusters: need bases and per_cluster >= 1");
    spec.validate();
    for (const auto& b : bases)
        detail::require(b.length() == bases.front().length() && b.dim() == bases.front().dim(),
                        "gen_warped_basis_clusters: bases must share grid and dimension");
    std::mt19937_64 rng(spec.seed);
    Dataset ds;
    ds.name = "warped-basis";
    for (size_t k = 0; k < bases.size(); ++k) {
        for (int m = 0; m < per_cluster; ++m) {
            ds.curves.push_back(warp_curve(bases[k], random_warp(bases[k].length(), spec, 1.0, rng)));
            ds.truth.push_back(static_cast<int>(k));
        }
    }
    ds.meta = {{"generator", "warped-basis"},
               {"clusters", bases.size()},
               {"per_cluster", per_cluster},
               {"T", bases.front().length()},
               {"warp", spec.to_json()}};
    return ds;
}

inline constexpr int kBasisHarmonics = 5;

/// Random low-frequency Fourier curve (linear trend plus kBasisHarmonics
/// harmonics with 1/k^2 decay), scaled to unit arc length. Draws whose second
/// difference exceeds 100/T^2 are rejected and redrawn from the same stream.
inline Curve random_smooth_basis(Index T, Index n, std::uint64_t seed) {
    detail::require(T >= 16 && n >= 1, "random_smooth_basis: need T >= 16 and n >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const VectorXd t = uniform_grid(T);
    const double bound = 100.0 / static_cast<double>(T * T);
    while (true) {
        MatrixXd s = MatrixXd::Zero(T, n);
        for (Index d = 0; d < n; ++d) {
            const double trend = gauss(rng);
            s.col(d) += trend * t;
            for (int k = 1; k <= kBasisHarmonics; ++k) {
                const double as = gauss(rng) / (k * k), ac = gauss(rng) / (k * k);
                const double w = 2.0 * std::numbers::pi * k;
                for (Index i = 0; i < T; ++i) s(i, d) += as * std::sin(w * t(i)) + ac * std::cos(w * t(i));
            }
        }
        const Curve raw(s);
        const double length = trapezoid_weights(T).dot(derivative(raw).rowwise().norm());
        if (!(length > 0.0)) continue;
        s /= length;
        const double second = (s.topRows(T - 2) - 2.0 * s.middleRows(1, T - 2) + s.bottomRows(T - 2)).cwiseAbs().maxCoeff();
        if (second <= bound) return Curve(std::move(s));
    }
}

/// |a - b|_L2 / max(|a|_L2, |b|_L2) on the shared grid.
inline double normalized_l2_distance(const Curve& a, const Curve& b) {
    detail::require(a.length() == b.length() && a.dim() == b.dim(), "normalized_l2_distance: shape mismatch");
    const double na = std::sqrt(detail::trapezoid_sq_norm(a.samples()));
    const double nb = std::sqrt(detail::trapezoid_sq_norm(b.samples()));
    const double scale = std::max(na, nb);
    return scale > 0.0 ? std::sqrt(detail::trapezoid_sq_norm(a.samples() - b.samples())) / scale : 0.0;
}

/// c bases drawn from consecutive sub-seeds of seed, skipping any candidate
/// closer than min_separation (normalized L2) to one already accepted.
inline std::vector<Curve> draw_separated_bases(int c, Index T, Index n, std::uint64_t seed, double min_separation) {
    detail::require(c >= 1, "draw_separated_bases: need c >= 1");
    std::vector<Curve> bases;
    for (std::uint64_t k = 0; static_cast<int>(bases.size()) < c; ++k) {
        detail::require(k < 10000, "draw_separated_bases: separation unattainable");
        Curve cand = random_smooth_basis(T, n, seed * 1000003ULL + k);
        bool ok = true;
        for (const auto& b : bases) ok = ok && normalized_l2_distance(cand, b) >= min_separation;
        if (ok) bases.push_back(std::move(cand));
    }
    return bases;
}

} // namespace curvelrr
