#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "krossfuse/types.hpp"

namespace krossfuse {

/// One or more row-aligned embeddings with an integer class per row.
struct LabeledEmbeddings {
    std::vector<EmbeddingMatrix> embeddings;
    std::vector<int> labels;

    void validate() const;
    int num_classes() const;
    /// Horizontal concatenation of all embeddings.
    Matrix features() const;
};

/// One-vs-rest ridge regression with intercept (targets +1 / -1), solved in
/// closed form on (X^T X + lambda I). Predicts by argmax; returns the
/// fraction of test rows classified correctly.
double ridge_probe(const LabeledEmbeddings& train, const LabeledEmbeddings& test, double lambda);
double ridge_probe(const Matrix& train_x, std::span<const int> train_y, const Matrix& test_x,
                   std::span<const int> test_y, double lambda);

struct CSelection {
    double best_C = 1.0;
    std::vector<double> grid;
    std::vector<double> cv_accuracy;
};

/// Picks C for exact fusion of (psi, gamma) features by k-fold
/// cross-validated probe accuracy. Ties go to the earlier grid entry.
CSelection select_C(const Matrix& psi_feats, const Matrix& gamma_feats, std::span<const int> labels,
                    std::span<const double> grid, int folds = 5, double lambda = 1e-3);

/// {1e-3, 1e-2, ..., 1e3}.
std::vector<double> default_C_grid();

}  // namespace krossfuse
