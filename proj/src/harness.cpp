#include "krossfuse/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include "krossfuse/counter_rng.hpp"
#include "krossfuse/exact_fusion.hpp"
#include "krossfuse/kernel.hpp"
#include "krossfuse/metrics.hpp"
#include "krossfuse/parallel.hpp"
#include "krossfuse/rff.hpp"
#include "krossfuse/rp_fusion.hpp"
#include "krossfuse/spectral.hpp"
#include "krossfuse/synth.hpp"

namespace krossfuse {
namespace {

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, double stddev, std::uint64_t seed, std::uint64_t stream) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            m(i, j) = stddev * rng::normal(seed, stream, static_cast<std::uint64_t>(i * cols + j));
    return m;
}

Matrix unit_rows(Matrix m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i).normalize();
    return m;
}

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size()))) - 1;
    return v[std::min(idx, v.size() - 1)];
}

double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

bool Report::passed() const {
    return std::all_of(criteria.begin(), criteria.end(), [](const Criterion& c) { return c.passed; });
}

std::string Report::to_text() const {
    std::ostringstream os;
    os << "# " << title << '\n';
    for (const auto& c : criteria) {
        os << (c.passed ? "PASS " : "FAIL ") << c.name;
        if (!c.detail.empty()) os << "  (" << c.detail << ')';
        os << '\n';
    }
    os << (passed() ? "RESULT PASS" : "RESULT FAIL") << '\n';
    return os.str();
}

std::string Report::to_csv() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < csv_header.size(); ++i) os << (i ? "," : "") << csv_header[i];
    os << '\n';
    char buf[64];
    for (const auto& row : csv_rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", row[i]);
            os << (i ? "," : "") << buf;
        }
        os << '\n';
    }
    return os.str();
}

// ---------------------------------------------------------------------------

double thm1_bound(double B, int n, double delta, Eigen::Index l) {
    return std::sqrt(B * std::log(4.0 * n / delta) / static_cast<double>(l));
}

Thm1Report thm1_harness(const Thm1Config& cfg) {
    if (cfg.n < 1 || cfg.seeds < 1 || cfg.l_grid.empty()) throw InvalidArgument("thm1_harness: empty configuration");
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw InvalidArgument("thm1_harness: delta must lie in (0, 1)");

    const Matrix psi = unit_rows(gaussian_matrix(cfg.n, cfg.d_psi, 1.0, cfg.master_seed, 100));
    const Matrix gamma = unit_rows(gaussian_matrix(cfg.n, cfg.d_gamma, 1.0, cfg.master_seed, 101));
    // |symmetrize(g)|^2 = C + |g|^2 = C + 1; rescale so every fused row has norm 1.
    Matrix sym(cfg.n, 2 * cfg.d_gamma);
    for (int i = 0; i < cfg.n; ++i) {
        sym.row(i) = symmetrize_shared(gamma.row(i).transpose(), cfg.C).transpose() / std::sqrt(cfg.C + 1.0);
    }
    const Matrix exact = gram(psi).cwiseProduct(gram(sym));
    const Matrix factors[] = {psi, sym};
    const Eigen::Index dims[] = {cfg.d_psi, 2 * cfg.d_gamma};

    Thm1Report out;
    out.config = cfg;
    out.report.title = "RP-KrossFuse concentration (n=" + std::to_string(cfg.n) + ", delta=" + fmt("%g", cfg.delta) +
                       ", seeds=" + std::to_string(cfg.seeds) + ")";
    out.report.csv_header = {"l", "bound", "exceedance", "mean_max_dev", "q95_max_dev", "mean_rms_dev"};

    for (Eigen::Index l : cfg.l_grid) {
        std::vector<double> max_dev(static_cast<std::size_t>(cfg.seeds));
        std::vector<double> rms_dev(static_cast<std::size_t>(cfg.seeds));
        parallel_for(static_cast<std::size_t>(cfg.seeds), [&](std::size_t t) {
            const auto seed = rng::derive_seed(cfg.master_seed ^ static_cast<std::uint64_t>(l), t);
            const RandomBasis basis = RandomBasis::sample(dims, l, seed);
            const Matrix dev = gram(rp_multi(factors, basis)) - exact;
            max_dev[t] = dev.cwiseAbs().maxCoeff();
            rms_dev[t] = std::sqrt(dev.squaredNorm() / static_cast<double>(dev.size()));
        });
        Thm1Row row;
        row.l = l;
        row.bound = thm1_bound(1.0, cfg.n, cfg.delta, l);
        row.exceedance = static_cast<double>(std::count_if(max_dev.begin(), max_dev.end(),
                                                           [&](double v) { return v > row.bound; })) /
                         cfg.seeds;
        row.mean_max_deviation = mean(max_dev);
        row.q95_max_deviation = quantile(max_dev, 0.95);
        row.mean_rms_deviation = mean(rms_dev);
        out.rows.push_back(row);
        out.report.csv_rows.push_back({static_cast<double>(l), row.bound, row.exceedance, row.mean_max_deviation,
                                       row.q95_max_deviation, row.mean_rms_deviation});
        out.report.criteria.push_back(
            {"l=" + std::to_string(l) + " exceedance <= delta + " + fmt("%g", cfg.slack),
             row.exceedance <= cfg.delta + cfg.slack,
             "bound " + fmt("%.4f", row.bound) + ", exceedance " + fmt("%.3f", row.exceedance) + ", q95 max dev " +
                 fmt("%.4f", row.q95_max_deviation)});
    }

    for (std::size_t i = 0; i + 1 < out.rows.size(); ++i) {
        const auto& a = out.rows[i];
        const auto& b = out.rows[i + 1];
        if (b.l != 2 * a.l) continue;
        const double ratio = b.mean_rms_deviation / a.mean_rms_deviation;
        const double lo = 0.8 / std::sqrt(2.0), hi = 1.25 / std::sqrt(2.0);
        out.report.criteria.push_back({"rms(l=" + std::to_string(b.l) + ")/rms(l=" + std::to_string(a.l) +
                                           ") within 1/sqrt2 * [0.8, 1.25]",
                                       ratio >= lo && ratio <= hi, "ratio " + fmt("%.4f", ratio)});
    }
    return out;
}

// ---------------------------------------------------------------------------

double thm2_bound(double delta, Eigen::Index r) {
    return std::sqrt(2.0 * std::log(2.0 / delta) / static_cast<double>(r));
}

Thm2Report thm2_harness(const Thm2Config& cfg) {
    if (cfg.pairs < 1 || cfg.draws < 1 || cfg.r_grid.empty()) throw InvalidArgument("thm2_harness: empty configuration");
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw InvalidArgument("thm2_harness: delta must lie in (0, 1)");

    // Rows 2p and 2p+1 form pair p.
    const Matrix z1 = gaussian_matrix(2 * cfg.pairs, cfg.d1, 1.0, cfg.master_seed, 200);
    const Matrix z2 = gaussian_matrix(2 * cfg.pairs, cfg.d2, 1.0, cfg.master_seed, 201);
    const KernelSpec k1 = KernelSpec::rbf(median_bandwidth(z1));
    const KernelSpec k2 = KernelSpec::rbf(median_bandwidth(z2));
    std::vector<double> truth(static_cast<std::size_t>(cfg.pairs));
    for (int p = 0; p < cfg.pairs; ++p) {
        truth[p] = kernel_eval(k1, z1.row(2 * p).transpose(), z1.row(2 * p + 1).transpose()) *
                   kernel_eval(k2, z2.row(2 * p).transpose(), z2.row(2 * p + 1).transpose());
    }

    Thm2Report out;
    out.config = cfg;
    out.report.title = "joint RFF concentration (pairs=" + std::to_string(cfg.pairs) + ", delta=" +
                       fmt("%g", cfg.delta) + ", draws=" + std::to_string(cfg.draws) + ")";
    out.report.csv_header = {"r", "bound", "worst_pair_exceedance", "pooled_exceedance", "max_self_error"};

    for (Eigen::Index r : cfg.r_grid) {
        const double bound = thm2_bound(cfg.delta, r);
        // exceed[draw * pairs + p]
        std::vector<char> exceed(static_cast<std::size_t>(cfg.draws * cfg.pairs));
        std::vector<double> self_err(static_cast<std::size_t>(cfg.draws));
        parallel_for(static_cast<std::size_t>(cfg.draws), [&](std::size_t t) {
            const auto seed = rng::derive_seed(cfg.master_seed ^ static_cast<std::uint64_t>(r), t);
            const FrequencySet f = sample_joint_freqs(k1, cfg.d1, k2, cfg.d2, r, seed);
            const Matrix phi = rff_joint_batch(z1, z2, f);
            double worst_self = 0.0;
            for (Eigen::Index i = 0; i < phi.rows(); ++i) worst_self = std::max(worst_self, std::abs(phi.row(i).squaredNorm() - 1.0));
            self_err[t] = worst_self;
            for (int p = 0; p < cfg.pairs; ++p) {
                const double est = phi.row(2 * p).dot(phi.row(2 * p + 1));
                exceed[t * cfg.pairs + p] = std::abs(est - truth[p]) > bound;
            }
        });
        Thm2Row row;
        row.r = r;
        row.bound = bound;
        long pooled = 0;
        for (int p = 0; p < cfg.pairs; ++p) {
            long cnt = 0;
            for (int t = 0; t < cfg.draws; ++t) cnt += exceed[t * cfg.pairs + p];
            pooled += cnt;
            row.worst_pair_exceedance = std::max(row.worst_pair_exceedance, static_cast<double>(cnt) / cfg.draws);
        }
        row.pooled_exceedance = static_cast<double>(pooled) / (static_cast<double>(cfg.draws) * cfg.pairs);
        row.max_self_error = *std::max_element(self_err.begin(), self_err.end());
        out.rows.push_back(row);
        out.report.csv_rows.push_back(
            {static_cast<double>(r), bound, row.worst_pair_exceedance, row.pooled_exceedance, row.max_self_error});
        out.report.criteria.push_back({"r=" + std::to_string(r) + " per-pair exceedance <= delta + " + fmt("%g", cfg.slack),
                                       row.worst_pair_exceedance <= cfg.delta + cfg.slack,
                                       "bound " + fmt("%.4f", bound) + ", worst pair " +
                                           fmt("%.3f", row.worst_pair_exceedance)});
        out.report.criteria.push_back({"r=" + std::to_string(r) + " self inner products equal 1 to 1e-12",
                                       row.max_self_error <= 1e-12, "max error " + fmt("%.3g", row.max_self_error)});
    }
    for (std::size_t i = 0; i + 1 < out.rows.size(); ++i) {
        const auto& a = out.rows[i];
        const auto& b = out.rows[i + 1];
        if (b.r <= a.r) continue;
        out.report.criteria.push_back({"exceedance non-increasing from r=" + std::to_string(a.r) + " to r=" +
                                           std::to_string(b.r) + " (noise " + fmt("%g", cfg.slack) + ")",
                                       b.worst_pair_exceedance <= a.worst_pair_exceedance + cfg.slack, ""});
    }
    return out;
}

// ---------------------------------------------------------------------------

Prop2Result prop2_harness(const Prop2Config& cfg) {
    Prop2Result res;
    const KernelSpec kernels[] = {KernelSpec::linear(), KernelSpec::cosine()};
    for (int inst = 0; inst < cfg.instances; ++inst) {
        const auto seed = rng::derive_seed(cfg.master_seed, static_cast<std::uint64_t>(inst));
        const auto pick_dim = [&](std::uint64_t stream) {
            return 1 + static_cast<Eigen::Index>(rng::uniform01(seed, stream, 0) * static_cast<double>(cfg.max_dim));
        };
        const Eigen::Index dp = std::min(pick_dim(300), cfg.max_dim);
        const Eigen::Index dg = std::min(pick_dim(301), cfg.max_dim);
        // Rows: x, x', t, t' for psi; x, x' for gamma. Entries N(0, 1/d).
        const Matrix psi = gaussian_matrix(4, dp, 1.0 / std::sqrt(static_cast<double>(dp)), seed, 302);
        const Matrix gam = gaussian_matrix(2, dg, 1.0 / std::sqrt(static_cast<double>(dg)), seed, 303);
        for (const auto& k : kernels) {
            const Matrix fp = feature_matrix(k, psi);
            const Matrix fg = feature_matrix(k, gam);
            for (double C : cfg.C_values) {
                const Vector ex = krossfuse_shared(fp.row(0).transpose(), fg.row(0).transpose(), C);
                const Vector ex2 = krossfuse_shared(fp.row(1).transpose(), fg.row(1).transpose(), C);
                const Vector et = krossfuse_missing(fp.row(2).transpose(), C, dg);
                const Vector et2 = krossfuse_missing(fp.row(3).transpose(), C, dg);
                const auto kp = [&](int a, int b) { return kernel_eval(k, psi.row(a).transpose(), psi.row(b).transpose()); };
                const double kg = kernel_eval(k, gam.row(0).transpose(), gam.row(1).transpose());
                res.max_shared_error = std::max(res.max_shared_error, std::abs(ex.dot(ex2) - kp(0, 1) * (C + kg)));
                res.max_missing_error = std::max(res.max_missing_error, std::abs(et.dot(et2) - C * kp(2, 3)));
                res.max_cross_error = std::max(res.max_cross_error, std::abs(ex.dot(et) - C * kp(0, 2)));
                ++res.checks;
            }
        }
    }
    res.report.title = "fused inner-product identities (" + std::to_string(res.checks) + " checks)";
    res.report.criteria = {
        {"shared-shared = k_psi (C + k_gamma)", res.max_shared_error <= cfg.tol, "max error " + fmt("%.3g", res.max_shared_error)},
        {"missing-missing = C k_psi", res.max_missing_error <= cfg.tol, "max error " + fmt("%.3g", res.max_missing_error)},
        {"shared-missing = C k_psi", res.max_cross_error <= cfg.tol, "max error " + fmt("%.3g", res.max_cross_error)},
    };
    res.report.csv_header = {"checks", "max_shared_error", "max_missing_error", "max_cross_error"};
    res.report.csv_rows = {{static_cast<double>(res.checks), res.max_shared_error, res.max_missing_error, res.max_cross_error}};
    return res;
}

Report product_law_harness(const ProductLawConfig& cfg) {
    Report rep;
    rep.title = "product-kernel law for exact fusion (n=" + std::to_string(cfg.n) + ")";
    rep.csv_header = {"kernel(0=linear;1=cosine)", "C", "max_error"};
    const KernelSpec kernels[] = {KernelSpec::linear(), KernelSpec::cosine()};
    const Matrix psi = gaussian_matrix(cfg.n, cfg.d_psi, 1.0 / std::sqrt(static_cast<double>(cfg.d_psi)), cfg.master_seed, 400);
    const Matrix gam = gaussian_matrix(cfg.n, cfg.d_gamma, 1.0 / std::sqrt(static_cast<double>(cfg.d_gamma)), cfg.master_seed, 401);
    double worst = 0.0;
    for (std::size_t ki = 0; ki < 2; ++ki) {
        const auto& k = kernels[ki];
        const Matrix kpsi = kernel_matrix(k, psi);
        const Matrix kgam = kernel_matrix(k, gam);
        for (double C : cfg.C_values) {
            const Matrix fused = krossfuse_shared_batch(feature_matrix(k, psi), feature_matrix(k, gam), C);
            const Matrix target = kpsi.cwiseProduct((kgam.array() + C).matrix());
            const double err = (gram(fused) - target).cwiseAbs().maxCoeff();
            worst = std::max(worst, err);
            rep.csv_rows.push_back({static_cast<double>(ki), C, err});
        }
    }
    rep.criteria.push_back({"Gram(fused) = K_psi .* (C + K_gamma) entrywise", worst <= cfg.tol, "max error " + fmt("%.3g", worst)});
    return rep;
}

Report schur_harness(const SchurConfig& cfg) {
    Report rep;
    rep.title = "Schur product closure (" + std::to_string(cfg.trials) + " trials)";
    rep.csv_header = {"trial", "kernel_a", "kernel_b", "min_eigenvalue", "psd"};
    const KernelSpec kernels[] = {KernelSpec::linear(), KernelSpec::cosine(), KernelSpec::rbf_median()};
    bool all = true;
    double worst = std::numeric_limits<double>::infinity();
    for (int t = 0; t < cfg.trials; ++t) {
        const auto seed = rng::derive_seed(cfg.master_seed, static_cast<std::uint64_t>(t));
        const Matrix a = gaussian_matrix(cfg.n, cfg.d, 1.0, seed, 500);
        const Matrix b = gaussian_matrix(cfg.n, cfg.d, 1.0, seed, 501);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                const Matrix prod = kernel_matrix(kernels[i], a).cwiseProduct(kernel_matrix(kernels[j], b));
                const PsdResult r = psd_check(prod, cfg.tol);
                all = all && r.is_psd;
                worst = std::min(worst, r.min_eigenvalue);
                rep.csv_rows.push_back({static_cast<double>(t), static_cast<double>(i), static_cast<double>(j),
                                        r.min_eigenvalue, r.is_psd ? 1.0 : 0.0});
            }
        }
    }
    rep.criteria.push_back({"elementwise products of kernel matrices are PSD", all, "min eigenvalue " + fmt("%.3g", worst)});
    return rep;
}

// ---------------------------------------------------------------------------

FactorialTrial factorial_trial(int n_per_cell, double noise, Eigen::Index d, std::uint64_t seed) {
    const LabeledEmbeddings data = synth_factorial(n_per_cell, noise, d, seed);
    const Matrix ka = kernel_matrix(KernelSpec::rbf_median(), data.embeddings[0]);
    const Matrix kb = kernel_matrix(KernelSpec::rbf_median(), data.embeddings[1]);
    const Matrix fused = ka.cwiseProduct(kb);
    FactorialTrial t;
    t.ari_a = ari(spectral_cluster(ka, 4, seed), data.labels);
    t.ari_b = ari(spectral_cluster(kb, 4, seed), data.labels);
    t.ari_fused = ari(spectral_cluster(fused, 4, seed), data.labels);
    return t;
}

}  // namespace krossfuse
