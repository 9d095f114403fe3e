#pragma once

#include <cstdint>

#include "krossfuse/metrics.hpp"
#include "krossfuse/types.hpp"

namespace krossfuse {

struct KMeansResult {
    Assignments labels;
    Matrix centers;
    double inertia = 0.0;
};

/// k-means++ seeding followed by Lloyd iterations; the restart with the
/// lowest inertia wins. Deterministic given seed.
KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, int restarts = 20, int max_iter = 300);

/// Normalized spectral clustering of an affinity (kernel) matrix:
/// D^{-1/2} K D^{-1/2}, top-k eigenvectors, row-normalize, k-means++.
/// Requires K symmetric with positive row sums and 2 <= k <= n.
Assignments spectral_cluster(const Matrix& K, int k, std::uint64_t seed);

}  // namespace krossfuse
