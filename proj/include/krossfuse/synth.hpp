#pragma once

#include <cstdint>

#include "krossfuse/probe.hpp"

namespace krossfuse {

/// Two-factor synthetic data. Each row has latent bits (i, j) in {0,1}^2.
/// Embedding A encodes i only and embedding B encodes j only: each is a
/// unit-norm perturbation of one of two orthonormal code vectors in R^d,
/// with isotropic Gaussian noise of expected norm `noise`. Labels are
/// 2*i + j; rows are grouped by label, n_per_cell rows each.
///
/// embeddings[0] is A (modality shared, name "A"), embeddings[1] is B.
LabeledEmbeddings synth_factorial(int n_per_cell, double noise, Eigen::Index d, std::uint64_t seed);

}  // namespace krossfuse
