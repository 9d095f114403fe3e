#pragma once

#include <cstddef>
#include <span>

#include "krossfuse/types.hpp"

// Exact Kronecker fusion of a cross-modal embedding with a uni-modal one.
//
// The uni-modal features phi (dimension d) are lifted to a 2d-dimensional
// "symmetrized" map so that the missing modality can be given a constant
// partner vector:
//
//   shared:  (1/sqrt 2) [ sqrt(C/d) + phi ,  sqrt(C/d) - phi ]
//   missing: sqrt(C/(2d)) * ones(2d)
//
// and the fused maps are psi (x) symmetrized, in that order. Inner products
// then satisfy
//
//   <E_X(x), E_X(x')> = k_psi(x,x') * (C + k_gamma(x,x'))
//   <E_T(t), E_T(t')> = C * k_psi(t,t')
//   <E_X(x), E_T(t)>  = C * k_psi(x,t)

namespace krossfuse {

/// Default cap on elements of one materialized fused matrix (2^27).
inline constexpr std::size_t kDefaultElementCap = std::size_t{1} << 27;

/// Entry (i*|v| + j) = u_i * v_j.
Vector kron(const Vector& u, const Vector& v);

/// Iterated Kronecker product, left to right. Throws on an empty list.
Vector multi_kron(std::span<const Vector> feats);

Vector symmetrize_shared(const Vector& phi, double C);
Vector missing_constant(double C, Eigen::Index d);

Vector krossfuse_shared(const Vector& psi_feat, const Vector& gamma_feat, double C);
Vector krossfuse_missing(const Vector& psi_feat, double C, Eigen::Index d_gamma);

/// Row-wise batch versions. Inputs are already feature-mapped; rows of the
/// two shared-branch batches are aligned. Refuses outputs larger than cap.
Matrix krossfuse_shared_batch(const Matrix& psi_feats, const Matrix& gamma_feats, double C,
                              std::size_t element_cap = kDefaultElementCap);
Matrix krossfuse_missing_batch(const Matrix& psi_feats, double C, Eigen::Index d_gamma,
                               std::size_t element_cap = kDefaultElementCap);

/// Throws CapacityError naming the scalable alternatives if rows*cols > cap.
void check_element_cap(std::size_t rows, std::size_t cols, std::size_t cap);

namespace detail {
// Same formulas with C >= 0 allowed; the randomized paths accept C = 0.
Vector symmetrize(const Vector& phi, double C);
Vector missing_constant(double C, Eigen::Index d);
}  // namespace detail

}  // namespace krossfuse
