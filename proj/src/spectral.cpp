#include "krossfuse/spectral.hpp"

#include <cmath>
#include <limits>

#include "krossfuse/counter_rng.hpp"

namespace krossfuse {
namespace {

double squared_distance(const Matrix& a, Eigen::Index i, const Matrix& b, Eigen::Index j) {
    return (a.row(i) - b.row(j)).squaredNorm();
}

// k-means++ seeding. Draw t of restart `restart` uses counter (seed, restart, t).
Matrix seed_centers(const Matrix& points, int k, std::uint64_t seed, std::uint64_t restart) {
    const Eigen::Index n = points.rows();
    Matrix centers(k, points.cols());
    std::uint64_t draw = 0;
    auto first = static_cast<Eigen::Index>(rng::uniform01(seed, restart, draw++) * static_cast<double>(n));
    centers.row(0) = points.row(std::min(first, n - 1));

    std::vector<double> d2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], squared_distance(points, i, centers, c - 1));
            total += d2[i];
        }
        Eigen::Index pick = n - 1;
        if (total > 0.0) {
            double target = rng::uniform01(seed, restart, draw++) * total;
            for (Eigen::Index i = 0; i < n; ++i) {
                target -= d2[i];
                if (target < 0.0) {
                    pick = i;
                    break;
                }
            }
        } else {
            // All points coincide with chosen centers; fall back to a uniform pick.
            pick = std::min(static_cast<Eigen::Index>(rng::uniform01(seed, restart, draw++) * static_cast<double>(n)),
                            n - 1);
        }
        centers.row(c) = points.row(pick);
    }
    return centers;
}

KMeansResult lloyd(const Matrix& points, Matrix centers, int max_iter) {
    const Eigen::Index n = points.rows();
    const int k = static_cast<int>(centers.rows());
    KMeansResult res;
    res.labels.assign(static_cast<std::size_t>(n), -1);
    for (int iter = 0; iter < max_iter; ++iter) {
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double d = squared_distance(points, i, centers, c);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (res.labels[i] != best) {
                res.labels[i] = best;
                changed = true;
            }
        }
        if (!changed) break;
        Matrix sums = Matrix::Zero(k, points.cols());
        std::vector<long> counts(static_cast<std::size_t>(k), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            sums.row(res.labels[i]) += points.row(i);
            ++counts[res.labels[i]];
        }
        for (int c = 0; c < k; ++c) {
            // Empty clusters keep their previous center.
            if (counts[c] > 0) centers.row(c) = sums.row(c) / static_cast<double>(counts[c]);
        }
    }
    res.inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) res.inertia += squared_distance(points, i, centers, res.labels[i]);
    res.centers = std::move(centers);
    return res;
}

}  // namespace

KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, int restarts, int max_iter) {
    if (k < 1 || k > points.rows()) throw InvalidArgument("kmeans: need 1 <= k <= n");
    KMeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (int r = 0; r < std::max(restarts, 1); ++r) {
        KMeansResult res = lloyd(points, seed_centers(points, k, seed, static_cast<std::uint64_t>(r)), max_iter);
        if (res.inertia < best.inertia) best = std::move(res);
    }
    return best;
}

Assignments spectral_cluster(const Matrix& K, int k, std::uint64_t seed) {
    const Eigen::Index n = K.rows();
    if (K.cols() != n) throw InvalidArgument("spectral_cluster: matrix is not square");
    if (k < 2) throw InvalidArgument("spectral_cluster: k must be >= 2");
    if (k > n) throw InvalidArgument("spectral_cluster: k > n");
    const double scale = std::max(1.0, K.cwiseAbs().maxCoeff());
    if ((K - K.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
        throw InvalidArgument("spectral_cluster: matrix is not symmetric");
    }

    const Eigen::VectorXd degree = K.rowwise().sum();
    if ((degree.array() <= 0.0).any()) {
        throw InvalidArgument("spectral_cluster: affinity has a non-positive row sum");
    }
    const Eigen::VectorXd inv_sqrt = degree.array().rsqrt();
    Eigen::MatrixXd normalized = inv_sqrt.asDiagonal() * Eigen::MatrixXd(K) * inv_sqrt.asDiagonal();
    normalized = 0.5 * (normalized + normalized.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(normalized);
    if (solver.info() != Eigen::Success) throw Error("spectral_cluster: eigensolver failed");
    // Eigenvalues ascend; the top-k eigenvectors are the last k columns.
    Matrix embedding = solver.eigenvectors().rightCols(k);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double norm = embedding.row(i).norm();
        if (norm > 0.0) embedding.row(i) /= norm;
    }
    return kmeans(embedding, k, seed, 20).labels;
}

}  // namespace krossfuse
