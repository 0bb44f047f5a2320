#pragma once

// Comparison methods: k-means on concatenated samples, DTW affinities, and
// Euclidean LRR.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "curvelrr/curve.hpp"
#include "curvelrr/dtw.hpp"
#include "curvelrr/kmeans.hpp"
#include "curvelrr/lrr.hpp"

namespace curvelrr {

/// Dimension-major concatenation: all T samples of dimension 0, then dimension 1, ...
inline VectorXd flatten(const Curve& curve) {
    const MatrixXd& s = curve.samples();
    return Eigen::Map<const VectorXd>(s.data(), s.size());
}

/// Data matrix with one flattened curve per column.
inline MatrixXd stack_columns(const std::vector<Curve>& curves) {
    detail::require(!curves.empty(), "stack_columns: no curves");
    const Index d = curves.front().length() * curves.front().dim();
    MatrixXd x(d, static_cast<Index>(curves.size()));
    for (size_t i = 0; i < curves.size(); ++i) {
        detail::require(curves[i].length() * curves[i].dim() == d, "stack_columns: curves differ in size");
        x.col(static_cast<Index>(i)) = flatten(curves[i]);
    }
    return x;
}

/// k-means on the rows of `vectors` (one data point per row).
inline Labels kmeans(const MatrixXd& vectors, int c, std::uint64_t seed, const KMeansOptions& opts = {}) {
    return kmeans_rows(vectors, c, seed, opts).labels;
}

} // namespace curvelrr
