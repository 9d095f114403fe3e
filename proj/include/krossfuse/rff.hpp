#pragma once

#include <cstdint>
#include <optional>

#include "krossfuse/types.hpp"

// Random Fourier features for shift-invariant kernels.
//
// For k(x, y) = exp(-|x - y|^2 / B) the spectral density is N(0, (2/B) I).
// A single map uses r frequencies w_j:
//     phi(z) = (1/sqrt r) [cos(w_1.z), sin(w_1.z), ..., cos(w_r.z), sin(w_r.z)]
// A joint map draws frequency pairs (w1_j, w2_j) and uses the phase
// w1_j.z1 + w2_j.z2; its inner products estimate k1(z1, z1') * k2(z2, z2').

namespace krossfuse {

/// Frequency rows drawn for one (omega1) or two (omega1, omega2) kernels.
/// omega1 uses RNG stream 0 and omega2 stream 1 under the same seed, so a
/// joint set's omega1 equals the single set sampled with the same seed.
struct FrequencySet {
    Matrix omega1;                 // r x d1
    std::optional<Matrix> omega2;  // r x d2
    KernelSpec kernel1;
    std::optional<KernelSpec> kernel2;
    std::uint64_t seed = 0;

    Eigen::Index r() const noexcept { return omega1.rows(); }
};

/// r i.i.d. rows from N(0, (2/B) I_d).
FrequencySet sample_freqs_rbf(Eigen::Index d, Eigen::Index r, double B, std::uint64_t seed);

/// Joint draw for two rbf kernels (bandwidths B1 on d1, B2 on d2).
FrequencySet sample_joint_freqs_rbf(Eigen::Index d1, double B1, Eigen::Index d2, double B2, Eigen::Index r,
                                    std::uint64_t seed);

/// Dispatches on a resolved rbf spec; other kernels are not shift-invariant
/// here and are rejected.
FrequencySet sample_freqs(const KernelSpec& spec, Eigen::Index d, Eigen::Index r, std::uint64_t seed);
FrequencySet sample_joint_freqs(const KernelSpec& spec1, Eigen::Index d1, const KernelSpec& spec2, Eigen::Index d2,
                                Eigen::Index r, std::uint64_t seed);

/// Length 2r, interleaved (cos, sin) per frequency. Uses omega1.
Vector rff_single(const Vector& z, const FrequencySet& freqs);

/// Length 2r. Requires omega2.
Vector rff_joint(const Vector& z1, const Vector& z2, const FrequencySet& freqs);

/// Length 4r: [ sqrt(C) * rff_single(gamma_x) | rff_joint(gamma_x, psi_x) ].
/// gamma is the cross-modal input (omega1), psi the uni-modal one (omega2).
Vector rff_krossfuse_shared(const Vector& gamma_cm_x, const Vector& psi_um_x, double C, const FrequencySet& freqs);

/// Length 4r: [ sqrt(C) * rff_single(gamma_t) | 0 ].
Vector rff_krossfuse_missing(const Vector& gamma_cm_t, double C, const FrequencySet& freqs);

/// Row-wise batch forms.
Matrix rff_single_batch(const Matrix& z, const FrequencySet& freqs);
Matrix rff_joint_batch(const Matrix& z1, const Matrix& z2, const FrequencySet& freqs);
Matrix rff_krossfuse_shared_batch(const Matrix& gamma_cm, const Matrix& psi_um, double C, const FrequencySet& freqs);
Matrix rff_krossfuse_missing_batch(const Matrix& gamma_cm, double C, const FrequencySet& freqs);

}  // namespace krossfuse
