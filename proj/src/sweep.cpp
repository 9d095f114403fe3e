#include "krossfuse/sweep.hpp"

#include <cmath>
#include <cstdio>

#include "krossfuse/counter_rng.hpp"
#include "krossfuse/exact_fusion.hpp"
#include "krossfuse/kernel.hpp"
#include "krossfuse/metrics.hpp"
#include "krossfuse/probe.hpp"
#include "krossfuse/rp_fusion.hpp"
#include "krossfuse/spectral.hpp"
#include "krossfuse/synth.hpp"

namespace krossfuse {
namespace {

struct CosineFeatures {
    Matrix psi;
    Matrix gamma;
    std::vector<int> labels;
};

CosineFeatures load(const SweepData& d) {
    const LabeledEmbeddings data = synth_factorial(d.n_per_cell, d.noise, d.d, d.seed);
    return {feature_matrix(KernelSpec::cosine(), data.embeddings[0].data()),
            feature_matrix(KernelSpec::cosine(), data.embeddings[1].data()), data.labels};
}

// Spectral clustering needs positive row sums; fused Grams may dip slightly
// below zero off the diagonal blocks, so shift by the most negative entry.
Matrix as_affinity(const Matrix& k) {
    const double lo = k.minCoeff();
    return lo < 0.0 ? Matrix((k.array() - lo).matrix()) : k;
}

double spectral_ari(const Matrix& k, const std::vector<int>& labels, std::uint64_t seed) {
    return ari(spectral_cluster(as_affinity(k), 4, seed), labels);
}

}  // namespace

Report sweep_projection_dim(const SweepData& data, const std::vector<Eigen::Index>& l_grid, double C, int seeds) {
    if (seeds < 1) throw InvalidArgument("sweep: seeds must be >= 1");
    const CosineFeatures f = load(data);
    const Matrix exact_gram = gram(krossfuse_shared_batch(f.psi, f.gamma, C));
    const double exact_ari = spectral_ari(exact_gram, f.labels, data.seed);

    Report rep;
    rep.title = "projection-dimension ablation";
    rep.csv_header = {"l", "mean_rms_dev", "ari_rp", "ari_exact"};
    for (Eigen::Index l : l_grid) {
        double rms_sum = 0.0;
        double ari_rp = 0.0;
        for (int s = 0; s < seeds; ++s) {
            const RpKrossFuser fuser(f.psi.cols(), f.gamma.cols(), C, l, rng::derive_seed(data.seed ^ static_cast<std::uint64_t>(l), s));
            const Matrix g = gram(fuser.shared(f.psi, f.gamma));
            const Matrix dev = g - exact_gram;
            rms_sum += std::sqrt(dev.squaredNorm() / static_cast<double>(dev.size()));
            if (s == 0) ari_rp = spectral_ari(g, f.labels, data.seed);
        }
        rep.csv_rows.push_back({static_cast<double>(l), rms_sum / seeds, ari_rp, exact_ari});
    }
    return rep;
}

Report sweep_C(const SweepData& data, const std::vector<double>& C_grid, double lambda) {
    const CosineFeatures f = load(data);
    const Eigen::Index n = f.psi.rows();
    Report rep;
    rep.title = "C ablation";
    rep.csv_header = {"C", "ari_exact", "probe_accuracy"};
    for (double C : C_grid) {
        const Matrix fused = krossfuse_shared_batch(f.psi, f.gamma, C);
        Matrix tr((n + 1) / 2, fused.cols()), te(n / 2, fused.cols());
        std::vector<int> ytr, yte;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (i % 2 == 0) {
                tr.row(i / 2) = fused.row(i);
                ytr.push_back(f.labels[i]);
            } else {
                te.row(i / 2) = fused.row(i);
                yte.push_back(f.labels[i]);
            }
        }
        rep.csv_rows.push_back({C, spectral_ari(gram(fused), f.labels, data.seed), ridge_probe(tr, ytr, te, yte, lambda)});
    }
    return rep;
}

Report sweep_kernel(const SweepData& data, double C) {
    const LabeledEmbeddings ds = synth_factorial(data.n_per_cell, data.noise, data.d, data.seed);
    Report rep;
    rep.title = "kernel ablation";
    rep.csv_header = {"kernel(0=linear;1=cosine;2=rbf_median)", "ari_a", "ari_b", "ari_fused"};
    const KernelSpec kernels[] = {KernelSpec::linear(), KernelSpec::cosine(), KernelSpec::rbf_median()};
    for (int i = 0; i < 3; ++i) {
        const Matrix ka = kernel_matrix(kernels[i], ds.embeddings[0]);
        const Matrix kb = kernel_matrix(kernels[i], ds.embeddings[1]);
        const Matrix fused = ka.cwiseProduct((kb.array() + C).matrix());
        rep.csv_rows.push_back({static_cast<double>(i), spectral_ari(ka, ds.labels, data.seed),
                                spectral_ari(kb, ds.labels, data.seed), spectral_ari(fused, ds.labels, data.seed)});
    }
    return rep;
}

}  // namespace krossfuse
