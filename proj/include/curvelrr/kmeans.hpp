#pragma once

// Lloyd's k-means with k-means++ seeding and seeded restarts. Points are rows.

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "curvelrr/error.hpp"

namespace curvelrr {

using Labels = std::vector<int>;

struct KMeansOptions {
    int restarts = 20;
    int max_iters = 300;
};

struct KMeansResult {
    Labels labels;
    Eigen::MatrixXd centers;
    double inertia = 0.0;               ///< within-cluster sum of squares
    std::vector<double> inertia_trace;  ///< per Lloyd iteration of the kept restart
};

namespace detail {

inline Eigen::MatrixXd kmeanspp_seed(const Eigen::MatrixXd& x, int k, std::mt19937_64& rng) {
    const Eigen::Index N = x.rows();
    Eigen::MatrixXd centers(k, x.cols());
    std::uniform_int_distribution<Eigen::Index> pick(0, N - 1);
    std::vector<bool> chosen(static_cast<size_t>(N), false);
    Eigen::Index first = pick(rng);
    centers.row(0) = x.row(first);
    chosen[static_cast<size_t>(first)] = true;
    Eigen::VectorXd d2 = (x.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
        const double total = d2.sum();
        Eigen::Index next = -1;
        if (total > 0.0) {
            double u = std::uniform_real_distribution<double>(0.0, total)(rng);
            for (Eigen::Index i = 0; i < N; ++i) {
                if (d2(i) <= 0.0) continue;
                next = i;
                u -= d2(i);
                if (u < 0.0) break;
            }
        } else {
            for (Eigen::Index i = 0; i < N && next < 0; ++i)
                if (!chosen[static_cast<size_t>(i)]) next = i;
            if (next < 0) next = pick(rng);
        }
        chosen[static_cast<size_t>(next)] = true;
        centers.row(c) = x.row(next);
        d2 = d2.cwiseMin((x.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }
    return centers;
}

inline double assign(const Eigen::MatrixXd& x, const Eigen::MatrixXd& centers, Labels& labels,
                     Eigen::VectorXd& dist) {
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        Eigen::Index best = 0;
        const double d = (centers.rowwise() - x.row(i)).rowwise().squaredNorm().minCoeff(&best);
        labels[static_cast<size_t>(i)] = static_cast<int>(best);
        dist(i) = d;
        inertia += d;
    }
    return inertia;
}

} // namespace detail

/// Lloyd iterations from the given centers. An emptied cluster is reseeded with
/// the point farthest from its current center.
inline KMeansResult lloyd(const Eigen::MatrixXd& x, Eigen::MatrixXd centers, int max_iters) {
    const Eigen::Index N = x.rows();
    const auto k = static_cast<int>(centers.rows());
    KMeansResult r;
    r.labels.assign(static_cast<size_t>(N), 0);
    Eigen::VectorXd dist(N);
    double inertia = detail::assign(x, centers, r.labels, dist);
    r.inertia_trace.push_back(inertia);
    for (int it = 0; it < max_iters; ++it) {
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, x.cols());
        std::vector<int> counts(static_cast<size_t>(k), 0);
        for (Eigen::Index i = 0; i < N; ++i) {
            sums.row(r.labels[static_cast<size_t>(i)]) += x.row(i);
            ++counts[static_cast<size_t>(r.labels[static_cast<size_t>(i)])];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<size_t>(c)] > 0) {
                centers.row(c) = sums.row(c) / counts[static_cast<size_t>(c)];
            } else {
                Eigen::Index far = 0;
                dist.maxCoeff(&far);
                centers.row(c) = x.row(far);
                dist(far) = 0.0;
            }
        }
        Labels previous = r.labels;
        inertia = detail::assign(x, centers, r.labels, dist);
        r.inertia_trace.push_back(inertia);
        if (r.labels == previous) break;
    }
    r.centers = std::move(centers);
    r.inertia = inertia;
    return r;
}

/// Best of `restarts` seeded k-means++ runs by inertia. Deterministic in seed.
inline KMeansResult kmeans_rows(const Eigen::MatrixXd& x, int k, std::uint64_t seed, const KMeansOptions& opts = {}) {
    detail::require(k >= 1 && k <= x.rows(), "kmeans: need 1 <= k <= number of points");
    detail::require(opts.restarts >= 1 && opts.max_iters >= 0, "kmeans: bad options");
    detail::require(x.allFinite(), "kmeans: non-finite input");
    std::mt19937_64 rng(seed);
    KMeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (int r = 0; r < opts.restarts; ++r) {
        KMeansResult run = lloyd(x, detail::kmeanspp_seed(x, k, rng), opts.max_iters);
        if (run.inertia < best.inertia) best = std::move(run);
    }
    return best;
}

} // namespace curvelrr
