#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "krossfuse/exact_fusion.hpp"
#include "krossfuse/types.hpp"

namespace krossfuse {

/// Projection matrices U_i (d_i x l) with i.i.d. Uniform[-sqrt 3, sqrt 3]
/// entries (mean 0, variance 1). Entry (r, c) of U_i is drawn from the
/// counter (seed, stream = i, index = r*l + c), so any U_i can be regenerated
/// on its own.
class RandomBasis {
  public:
    static RandomBasis sample(std::span<const Eigen::Index> dims, Eigen::Index l, std::uint64_t seed);

    /// Wraps caller-provided matrices (all with the same column count l).
    /// Used for deterministic stubs in tests.
    static RandomBasis from_matrices(std::vector<Matrix> matrices, std::uint64_t seed = 0);

    const Matrix& matrix(std::size_t i) const { return matrices_.at(i); }
    std::size_t size() const noexcept { return matrices_.size(); }
    Eigen::Index l() const noexcept { return l_; }
    std::uint64_t seed() const noexcept { return seed_; }

  private:
    RandomBasis(std::vector<Matrix> m, Eigen::Index l, std::uint64_t seed)
        : matrices_(std::move(m)), l_(l), seed_(seed) {}

    std::vector<Matrix> matrices_;
    Eigen::Index l_;
    std::uint64_t seed_;
};

/// Generates U_i exactly as RandomBasis::sample does for stream i.
Matrix sample_projection(Eigen::Index d, Eigen::Index l, std::uint64_t seed, std::uint64_t stream);

/// (1/sqrt l) * (U_1^T a) .* (U_2^T b), using basis matrices 0 and 1.
Vector rp_fuse_pair(const Vector& a, const Vector& b, const RandomBasis& basis);

/// (1/sqrt l) * prod_i (U_i^T a_i) per row, for m >= 2 row-aligned batches.
Matrix rp_multi(std::span<const Matrix> batches, const RandomBasis& basis);

/// RP-KrossFuse. Holds the one basis shared by both modalities, so the shared
/// and missing branches always project with the same U_1, U_2.
class RpKrossFuser {
  public:
    /// Samples U_1 (d_psi x l) and U_2 (2 d_gamma x l) from seed.
    RpKrossFuser(Eigen::Index d_psi, Eigen::Index d_gamma, double C, Eigen::Index l, std::uint64_t seed);
    /// Uses a prepared basis; its matrices must have d_psi and 2*d_gamma rows.
    RpKrossFuser(RandomBasis basis, double C);

    /// Row i: rp_fuse_pair(psi_i, symmetrize(gamma_i, C)).
    Matrix shared(const Matrix& psi_feats, const Matrix& gamma_feats) const;
    /// Row i: rp_fuse_pair(psi_i, missing_constant(C, d_gamma)).
    Matrix missing(const Matrix& psi_feats) const;

    const RandomBasis& basis() const noexcept { return basis_; }
    double C() const noexcept { return C_; }
    Eigen::Index d_psi() const noexcept { return basis_.matrix(0).rows(); }
    Eigen::Index d_gamma() const noexcept { return basis_.matrix(1).rows() / 2; }

  private:
    RandomBasis basis_;
    double C_;
};

/// Free-function forms of the two RP-KrossFuse branches.
Matrix rp_krossfuse_shared(const Matrix& psi_feats, const Matrix& gamma_feats, double C, const RandomBasis& basis);
Matrix rp_krossfuse_missing(const Matrix& psi_feats, double C, Eigen::Index d_gamma, const RandomBasis& basis);

/// KPoMRP baseline: project each side separately to l_each dims, then take
/// the Kronecker product. Output has l_each^2 columns. The basis must hold
/// U_1 (d_psi x l_each) and U_2 (2 d_gamma x l_each).
Matrix kpomrp_shared(const Matrix& psi_feats, const Matrix& gamma_feats, double C, const RandomBasis& basis,
                     std::size_t element_cap = kDefaultElementCap);
Matrix kpomrp_missing(const Matrix& psi_feats, double C, Eigen::Index d_gamma, const RandomBasis& basis,
                      std::size_t element_cap = kDefaultElementCap);

}  // namespace krossfuse
