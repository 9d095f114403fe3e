#pragma once

#include <span>

#include "krossfuse/types.hpp"

namespace krossfuse {

/// Pointwise kernel value. linear: <x,y>; cosine: <x,y>/(|x||y|);
/// rbf: exp(-|x-y|^2 / B). An rbf spec must carry a resolved bandwidth.
double kernel_eval(const KernelSpec& spec, const Vector& x, const Vector& y);

/// Finite feature map with <phi(x), phi(y)> = kernel_eval(spec, x, y).
/// Only linear and cosine have one; rbf goes through the rff module.
Vector finite_feature(const KernelSpec& spec, const Vector& x);

/// finite_feature applied to every row.
Matrix feature_matrix(const KernelSpec& spec, const Matrix& rows);

/// Median of squared pairwise row distances. Falls back to 1.0 when the
/// batch has fewer than two rows or the median is zero.
double median_bandwidth(const Matrix& rows);

/// Returns spec with the median heuristic applied if it is rbf without a
/// bandwidth; otherwise returns spec unchanged.
KernelSpec resolve_bandwidth(const KernelSpec& spec, const Matrix& rows);

/// Symmetric n x n Gram matrix of pairwise kernel values (row-parallel).
Matrix kernel_matrix(const KernelSpec& spec, const EmbeddingMatrix& e);
Matrix kernel_matrix(const KernelSpec& spec, const Matrix& rows);

/// Gram matrix of explicit features: F * F^T.
Matrix gram(const Matrix& features);
/// Cross Gram A * B^T.
Matrix gram(const Matrix& a, const Matrix& b);

struct PsdResult {
    bool is_psd;
    double min_eigenvalue;
};

/// PSD test on a symmetric matrix: smallest eigenvalue >= -tol * max(1, |largest|).
/// Throws on non-square input or asymmetry above the same relative tolerance.
PsdResult psd_check(const Matrix& k, double tol = 1e-8);

}  // namespace krossfuse
