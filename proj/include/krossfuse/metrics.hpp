#pragma once

#include <span>
#include <vector>

namespace krossfuse {

using Assignments = std::vector<int>;

/// Normalized mutual information, arithmetic-mean normalization.
double nmi(std::span<const int> a, std::span<const int> b);

/// Adjusted mutual information with the hypergeometric expected MI and
/// arithmetic-mean normalization.
double ami(std::span<const int> a, std::span<const int> b);

/// Adjusted Rand index (pair counting).
double ari(std::span<const int> a, std::span<const int> b);

struct ClusterReport {
    Assignments assignments;
    double nmi = 0.0;
    double ami = 0.0;
    double ari = 0.0;
};

ClusterReport score_clustering(Assignments predicted, std::span<const int> truth);

}  // namespace krossfuse
