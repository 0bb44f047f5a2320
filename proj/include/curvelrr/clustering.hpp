#pragma once

// Affinity construction, normalized spectral clustering, and subspace
// clustering accuracy (best label matching).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "curvelrr/error.hpp"
#include "curvelrr/kmeans.hpp"

namespace curvelrr {

/// Symmetric, entrywise non-negative N x N matrix.
class Affinity {
public:
    explicit Affinity(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
        detail::require(matrix_.rows() == matrix_.cols() && matrix_.rows() >= 1, "Affinity: must be square");
        detail::require(matrix_.allFinite(), "Affinity: non-finite entry");
        detail::require((matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff() <= 1e-10,
                        "Affinity: matrix is not symmetric");
        detail::require(matrix_.minCoeff() >= 0.0, "Affinity: negative entry");
    }

    const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
    Eigen::Index size() const noexcept { return matrix_.rows(); }

private:
    Eigen::MatrixXd matrix_;
};

/// (|W| + |W|^T) / 2.
inline Affinity symmetrize(const Eigen::MatrixXd& W) {
    detail::require(W.rows() == W.cols(), "symmetrize: W must be square");
    detail::require(W.allFinite(), "symmetrize: non-finite entry");
    const Eigen::MatrixXd a = W.cwiseAbs();
    return Affinity(0.5 * (a + a.transpose()));
}

struct SpectralDiagnostics {
    int isolated_vertices = 0;  ///< rows whose degree was floored
};

inline constexpr double kDegreeFloor = 1e-12;

/// Normalized-cut style clustering: embed with the top-c eigenvectors of
/// D^-1/2 A D^-1/2 (the bottom of the normalized Laplacian), normalize rows,
/// then k-means with seeded restarts. Labels are 0 .. c-1.
inline Labels spectral_cluster(const Affinity& A, int c, std::uint64_t seed, SpectralDiagnostics* diag = nullptr,
                               const KMeansOptions& kopts = {}) {
    const Eigen::Index N = A.size();
    detail::require(c >= 1 && c <= N, "spectral_cluster: need 1 <= c <= N");
    if (c == 1) return Labels(static_cast<size_t>(N), 0);

    Eigen::VectorXd degree = A.matrix().rowwise().sum();
    int isolated = 0;
    for (Eigen::Index i = 0; i < N; ++i)
        if (degree(i) < kDegreeFloor) degree(i) = kDegreeFloor, ++isolated;
    if (diag) diag->isolated_vertices = isolated;

    const Eigen::VectorXd dinv = degree.cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd m = dinv.asDiagonal() * A.matrix() * dinv.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
    Eigen::MatrixXd embed = es.eigenvectors().rightCols(c);
    for (Eigen::Index i = 0; i < N; ++i) {
        const double nrm = embed.row(i).norm();
        if (nrm > 0.0) embed.row(i) /= nrm;
    }
    return kmeans_rows(embed, c, seed, kopts).labels;
}

namespace detail {

/// Minimum-cost perfect assignment on a square matrix (Hungarian method,
/// O(n^3)). Returns col_for_row.
inline std::vector<int> hungarian_min(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) minv[j] = cur, way[j] = j0;
                if (minv[j] < delta) delta = minv[j], j1 = j;
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) u[p[j]] += delta, v[j] -= delta;
                else minv[j] -= delta;
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> col_for_row(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] > 0) col_for_row[p[j] - 1] = j - 1;
    return col_for_row;
}

inline std::vector<int> compact_ids(const Labels& labels, int& count) {
    std::map<int, int> ids;
    for (int l : labels) ids.emplace(l, 0);
    int next = 0;
    for (auto& [id, idx] : ids) idx = next++;
    count = next;
    std::vector<int> out;
    out.reserve(labels.size());
    for (int l : labels) out.push_back(ids[l]);
    return out;
}

} // namespace detail

/// Fraction of points correctly labelled under the best one-to-one matching of
/// predicted ids to true ids. Ids may be arbitrary integers.
inline double sca(const Labels& predicted, const Labels& truth) {
    detail::require(predicted.size() == truth.size(), "sca: label vectors differ in length");
    detail::require(!truth.empty(), "sca: empty labelling");
    int np = 0, nt = 0;
    const auto p = detail::compact_ids(predicted, np);
    const auto t = detail::compact_ids(truth, nt);
    const int n = std::max(np, nt);
    Eigen::MatrixXd confusion = Eigen::MatrixXd::Zero(n, n);
    for (size_t i = 0; i < p.size(); ++i) confusion(p[i], t[i]) += 1.0;
    const auto match = detail::hungarian_min(-confusion);
    double correct = 0.0;
    for (int r = 0; r < n; ++r) correct += confusion(r, match[static_cast<size_t>(r)]);
    return correct / static_cast<double>(truth.size());
}

} // namespace curvelrr
