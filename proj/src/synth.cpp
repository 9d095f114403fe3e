#include "krossfuse/synth.hpp"

#include <cmath>

#include "krossfuse/counter_rng.hpp"

namespace krossfuse {
namespace {

enum Stream : std::uint64_t { kCodesA = 10, kCodesB = 11, kNoiseA = 12, kNoiseB = 13 };

// Two orthonormal vectors from Gaussian draws (Gram-Schmidt).
Matrix orthonormal_codes(Eigen::Index d, std::uint64_t seed, std::uint64_t stream) {
    Matrix codes(2, d);
    for (Eigen::Index r = 0; r < 2; ++r)
        for (Eigen::Index c = 0; c < d; ++c) codes(r, c) = rng::normal(seed, stream, static_cast<std::uint64_t>(r * d + c));
    codes.row(0).normalize();
    codes.row(1) -= codes.row(1).dot(codes.row(0)) * codes.row(0);
    codes.row(1).normalize();
    return codes;
}

Matrix noisy_rows(const Matrix& codes, const std::vector<int>& which, double noise, std::uint64_t seed,
                  std::uint64_t stream) {
    const Eigen::Index d = codes.cols();
    const double sigma = noise / std::sqrt(static_cast<double>(d));
    Matrix out(static_cast<Eigen::Index>(which.size()), d);
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
        for (Eigen::Index c = 0; c < d; ++c) {
            out(r, c) = codes(which[r], c) + sigma * rng::normal(seed, stream, static_cast<std::uint64_t>(r * d + c));
        }
        const double norm = out.row(r).norm();
        // A perturbation that cancels the code exactly has probability zero;
        // fall back to the clean code if it happens.
        if (norm > 0.0) {
            out.row(r) /= norm;
        } else {
            out.row(r) = codes.row(which[r]);
        }
    }
    return out;
}

}  // namespace

LabeledEmbeddings synth_factorial(int n_per_cell, double noise, Eigen::Index d, std::uint64_t seed) {
    if (n_per_cell < 2) throw InvalidArgument("synth_factorial: n_per_cell must be >= 2");
    if (d < 2) throw InvalidArgument("synth_factorial: d must be >= 2");
    if (!(noise >= 0.0) || !std::isfinite(noise)) throw InvalidArgument("synth_factorial: noise must be >= 0");

    std::vector<int> bit_i, bit_j, labels;
    for (int cell = 0; cell < 4; ++cell) {
        for (int s = 0; s < n_per_cell; ++s) {
            bit_i.push_back(cell / 2);
            bit_j.push_back(cell % 2);
            labels.push_back(cell);
        }
    }
    LabeledEmbeddings out;
    out.embeddings.emplace_back(noisy_rows(orthonormal_codes(d, seed, kCodesA), bit_i, noise, seed, kNoiseA),
                                Modality::shared, "A");
    out.embeddings.emplace_back(noisy_rows(orthonormal_codes(d, seed, kCodesB), bit_j, noise, seed, kNoiseB),
                                Modality::shared, "B");
    out.labels = std::move(labels);
    return out;
}

}  // namespace krossfuse
