#pragma once

#include <cstdint>
#include <vector>

#include "krossfuse/harness.hpp"

// Ablations over projection dimension, C, and kernel choice, run on the
// synthetic two-factor data. A plays the cross-modal role, B the uni-modal.

namespace krossfuse {

struct SweepData {
    int n_per_cell = 50;
    double noise = 0.3;
    Eigen::Index d = 16;
    std::uint64_t seed = 0;
};

/// Per l: mean RMS deviation of the RP Gram from the exact Gram over `seeds`
/// bases, spectral ARI of the RP Gram (first basis) and of the exact Gram.
/// Cosine features, fixed C.
Report sweep_projection_dim(const SweepData& data, const std::vector<Eigen::Index>& l_grid, double C, int seeds);

/// Per C: spectral ARI of the exact fused Gram and held-out ridge-probe
/// accuracy (even rows train, odd rows test). Cosine features.
Report sweep_C(const SweepData& data, const std::vector<double>& C_grid, double lambda = 1e-3);

/// Per kernel kind: ARI of K_A, K_B and of the fused K_A .* (C + K_B).
Report sweep_kernel(const SweepData& data, double C);

}  // namespace krossfuse
