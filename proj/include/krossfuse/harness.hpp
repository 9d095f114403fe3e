#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "krossfuse/types.hpp"

// Validation harnesses. Each report carries named pass/fail criteria and
// renders as line-oriented text or CSV. Trials are seeded by
// rng::derive_seed(master, trial), stored per trial and reduced once, so
// reports do not depend on evaluation order.

namespace krossfuse {

struct Criterion {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct Report {
    std::string title;
    std::vector<Criterion> criteria;
    std::vector<std::string> csv_header;
    std::vector<std::vector<double>> csv_rows;

    bool passed() const;
    std::string to_text() const;
    std::string to_csv() const;
};

// ---------------------------------------------------------------------------
// RP-KrossFuse concentration
// ---------------------------------------------------------------------------

/// sqrt(B log(4n/delta) / l)
double thm1_bound(double B, int n, double delta, Eigen::Index l);

struct Thm1Config {
    int n = 32;
    Eigen::Index d_psi = 8;
    Eigen::Index d_gamma = 8;
    double C = 1.0;
    std::vector<Eigen::Index> l_grid = {2048, 4096};
    double delta = 0.05;
    int seeds = 200;
    std::uint64_t master_seed = 1;
    double slack = 0.03;
};

struct Thm1Row {
    Eigen::Index l = 0;
    double bound = 0.0;
    double exceedance = 0.0;       // fraction of seeds with max |dev| > bound
    double mean_max_deviation = 0.0;
    double q95_max_deviation = 0.0;
    double mean_rms_deviation = 0.0;
};

struct Thm1Report {
    Thm1Config config;
    std::vector<Thm1Row> rows;
    Report report;
};

/// Unit-norm psi rows and symmetrized gamma rows rescaled to unit norm, so the
/// fused Kronecker features have norm 1 (B = 1). For every l and seed the
/// RP Gram is compared against the exact Gram.
Thm1Report thm1_harness(const Thm1Config& cfg);

// ---------------------------------------------------------------------------
// Joint RFF concentration
// ---------------------------------------------------------------------------

/// sqrt(2 log(2/delta) / r)
double thm2_bound(double delta, Eigen::Index r);

struct Thm2Config {
    Eigen::Index d1 = 4;
    Eigen::Index d2 = 4;
    int pairs = 8;
    std::vector<Eigen::Index> r_grid = {500, 2000};
    double delta = 0.05;
    int draws = 500;
    std::uint64_t master_seed = 2;
    double slack = 0.03;
};

struct Thm2Row {
    Eigen::Index r = 0;
    double bound = 0.0;
    double worst_pair_exceedance = 0.0;  // max over pairs of the per-pair exceedance fraction
    double pooled_exceedance = 0.0;
    double max_self_error = 0.0;         // max |<phi(z), phi(z)> - 1|
};

struct Thm2Report {
    Thm2Config config;
    std::vector<Thm2Row> rows;
    Report report;
};

/// Per-pair product-kernel error of rff_joint against kernel_eval, over
/// independent frequency draws, with rbf bandwidths set by the median heuristic.
Thm2Report thm2_harness(const Thm2Config& cfg);

// ---------------------------------------------------------------------------
// Exact identities
// ---------------------------------------------------------------------------

struct Prop2Config {
    int instances = 200;
    Eigen::Index max_dim = 8;
    std::vector<double> C_values = {0.1, 1.0, 10.0};
    double tol = 1e-12;
    std::uint64_t master_seed = 3;
};

struct Prop2Result {
    double max_shared_error = 0.0;
    double max_missing_error = 0.0;
    double max_cross_error = 0.0;
    int checks = 0;
    Report report;
};

/// The three fused inner-product identities on random instances, both
/// linear and cosine kernels, via the exact Kronecker path.
Prop2Result prop2_harness(const Prop2Config& cfg);

struct ProductLawConfig {
    int n = 64;
    Eigen::Index d_psi = 8;
    Eigen::Index d_gamma = 8;
    std::vector<double> C_values = {0.1, 1.0, 10.0};
    double tol = 1e-12;
    std::uint64_t master_seed = 4;
};

/// Gram of exact fused rows equals K_psi .* (C + K_gamma) entrywise.
Report product_law_harness(const ProductLawConfig& cfg);

struct SchurConfig {
    int trials = 20;
    int n = 32;
    Eigen::Index d = 6;
    double tol = 1e-8;
    std::uint64_t master_seed = 5;
};

/// Elementwise products of kernel matrices (all kind pairs) pass psd_check.
Report schur_harness(const SchurConfig& cfg);

// ---------------------------------------------------------------------------
// Synthetic two-factor clustering
// ---------------------------------------------------------------------------

struct FactorialTrial {
    double ari_a = 0.0;
    double ari_b = 0.0;
    double ari_fused = 0.0;
};

/// synth_factorial -> rbf (median) Grams of A and B -> spectral clustering
/// (k = 4) of K_A, K_B and K_A .* K_B, scored by ARI against the 4 cells.
FactorialTrial factorial_trial(int n_per_cell, double noise, Eigen::Index d, std::uint64_t seed);

}  // namespace krossfuse
