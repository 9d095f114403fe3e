#include "krossfuse/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <new>
#include <optional>

#include "krossfuse/exact_fusion.hpp"
#include "krossfuse/harness.hpp"
#include "krossfuse/heatmap.hpp"
#include "krossfuse/kernel.hpp"
#include "krossfuse/matrix_io.hpp"
#include "krossfuse/metrics.hpp"
#include "krossfuse/parallel.hpp"
#include "krossfuse/probe.hpp"
#include "krossfuse/rff.hpp"
#include "krossfuse/rp_fusion.hpp"
#include "krossfuse/spectral.hpp"
#include "krossfuse/sweep.hpp"
#include "krossfuse/synth.hpp"

namespace krossfuse {
namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open '" + path + "' for writing");
    f << text;
    if (!f) throw Error("write to '" + path + "' failed");
}

// ---------------------------------------------------------------------------
// fuse
// ---------------------------------------------------------------------------

struct FuseArgs {
    std::string method = "exact";
    std::string cross, uni, missing;
    double C = 1.0;
    std::size_t l = 1024;
    std::size_t r = 1024;
    std::string kernel = "linear";
    std::string kernel_uni;
    std::uint64_t seed = 0;
    std::string out, out_missing;
    std::size_t max_elements = kDefaultElementCap;
};

std::string default_missing_path(const std::string& out) {
    std::filesystem::path p(out);
    const std::string ext = p.extension().string();
    p.replace_extension();
    return p.string() + ".missing" + ext;
}

void write_fused(const Matrix& m, const std::string& path, FusionMethod method, const FusionConfig& cfg,
                 Modality modality, const FuseArgs& a) {
    write_matrix(m, path);
    nlohmann::ordered_json j;
    j["method"] = std::string(to_string(method));
    j["modality"] = std::string(to_string(modality));
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    j["seed"] = cfg.seed;
    j["config"] = cfg.canonical();
    j["config_digest"] = hex64(cfg.digest());
    j["inputs"] = {{"cross", a.cross}, {"uni", a.uni}, {"missing", a.missing}};
    write_text(path + ".json", j.dump(2) + "\n");
}

int run_fuse(const FuseArgs& a, std::ostream& out) {
    const FusionMethod method = parse_fusion_method(a.method);
    const EmbeddingMatrix cross = read_matrix(a.cross, Modality::shared);
    const EmbeddingMatrix uni = read_matrix(a.uni, Modality::nonshared);
    if (cross.rows() != uni.rows()) {
        throw InvalidArgument("--cross has " + std::to_string(cross.rows()) + " rows but --uni has " +
                              std::to_string(uni.rows()));
    }
    std::optional<EmbeddingMatrix> miss;
    if (!a.missing.empty()) {
        miss.emplace(read_matrix(a.missing, Modality::shared));
        if (miss->cols() != cross.cols()) {
            throw InvalidArgument("--missing has " + std::to_string(miss->cols()) + " columns but --cross has " +
                                  std::to_string(cross.cols()));
        }
    }

    // Bandwidths are resolved on the paired (shared-modality) rows and reused
    // for the missing-modality rows so both outputs live in one space.
    const KernelSpec kc = resolve_bandwidth(KernelSpec::parse(a.kernel), cross.data());
    const KernelSpec ku =
        resolve_bandwidth(KernelSpec::parse(a.kernel_uni.empty() ? a.kernel : a.kernel_uni), uni.data());

    FusionConfig cfg;
    cfg.C = a.C;
    cfg.l = a.l;
    cfg.r = a.r;
    cfg.seed = a.seed;
    cfg.kernels = {kc, ku};
    cfg.validate();

    const auto n = static_cast<std::size_t>(cross.rows());
    Matrix shared, missing_out;
    switch (method) {
        case FusionMethod::exact: {
            const Matrix f = feature_matrix(kc, cross.data());
            const Matrix g = feature_matrix(ku, uni.data());
            shared = krossfuse_shared_batch(f, g, a.C, a.max_elements);
            if (miss) missing_out = krossfuse_missing_batch(feature_matrix(kc, miss->data()), a.C, g.cols(), a.max_elements);
            break;
        }
        case FusionMethod::rp: {
            check_element_cap(n, a.l, a.max_elements);
            const Matrix f = feature_matrix(kc, cross.data());
            const Matrix g = feature_matrix(ku, uni.data());
            const RpKrossFuser fuser(f.cols(), g.cols(), a.C, static_cast<Eigen::Index>(a.l), a.seed);
            shared = fuser.shared(f, g);
            if (miss) missing_out = fuser.missing(feature_matrix(kc, miss->data()));
            break;
        }
        case FusionMethod::kpomrp: {
            const Matrix f = feature_matrix(kc, cross.data());
            const Matrix g = feature_matrix(ku, uni.data());
            const Eigen::Index dims[] = {f.cols(), 2 * g.cols()};
            const RandomBasis basis = RandomBasis::sample(dims, static_cast<Eigen::Index>(a.l), a.seed);
            shared = kpomrp_shared(f, g, a.C, basis, a.max_elements);
            if (miss) missing_out = kpomrp_missing(feature_matrix(kc, miss->data()), a.C, g.cols(), basis, a.max_elements);
            break;
        }
        case FusionMethod::rff: {
            check_element_cap(n, 4 * a.r, a.max_elements);
            const FrequencySet freqs =
                sample_joint_freqs(kc, cross.cols(), ku, uni.cols(), static_cast<Eigen::Index>(a.r), a.seed);
            shared = rff_krossfuse_shared_batch(cross.data(), uni.data(), a.C, freqs);
            if (miss) missing_out = rff_krossfuse_missing_batch(miss->data(), a.C, freqs);
            break;
        }
    }

    write_fused(shared, a.out, method, cfg, Modality::shared, a);
    out << "wrote " << a.out << " (" << shared.rows() << " x " << shared.cols() << ")\n";
    if (miss) {
        const std::string path = a.out_missing.empty() ? default_missing_path(a.out) : a.out_missing;
        write_fused(missing_out, path, method, cfg, Modality::nonshared, a);
        out << "wrote " << path << " (" << missing_out.rows() << " x " << missing_out.cols() << ")\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// kernel / cluster / probe
// ---------------------------------------------------------------------------

struct KernelArgs {
    std::string in, kernel = "linear", out, heatmap;
};

int run_kernel(const KernelArgs& a, std::ostream& out) {
    const EmbeddingMatrix e = read_matrix(a.in);
    const Matrix k = kernel_matrix(KernelSpec::parse(a.kernel), e);
    write_matrix(k, a.out);
    out << "wrote " << a.out << " (" << k.rows() << " x " << k.cols() << ")\n";
    if (!a.heatmap.empty()) {
        heatmap_export(k, a.heatmap);
        out << "wrote " << a.heatmap << "\n";
    }
    return kExitOk;
}

struct ClusterArgs {
    std::string gram, features, kernel = "linear", labels, out;
    int k = 2;
    std::uint64_t seed = 0;
};

int run_cluster(const ClusterArgs& a, std::ostream& out) {
    Matrix K;
    if (!a.gram.empty()) {
        K = read_matrix(a.gram).data();
        if (K.rows() != K.cols()) throw InvalidArgument("--gram must be square");
    } else {
        K = kernel_matrix(KernelSpec::parse(a.kernel), read_matrix(a.features));
    }
    // Spectral clustering wants non-negative affinities; shift signed Grams.
    const double lo = K.minCoeff();
    if (lo < 0.0) K.array() -= lo;

    const std::vector<int> truth = read_labels(a.labels);
    if (static_cast<Eigen::Index>(truth.size()) != K.rows()) {
        throw InvalidArgument("--labels has " + std::to_string(truth.size()) + " entries for " +
                              std::to_string(K.rows()) + " rows");
    }
    const ClusterReport rep = score_clustering(spectral_cluster(K, a.k, a.seed), truth);
    out << "NMI " << fmt(rep.nmi) << "\nAMI " << fmt(rep.ami) << "\nARI " << fmt(rep.ari) << "\n";
    if (!a.out.empty()) write_labels(rep.assignments, a.out);
    return kExitOk;
}

struct ProbeArgs {
    std::string train, train_labels, test, test_labels;
    double lambda = 1e-3;
};

int run_probe(const ProbeArgs& a, std::ostream& out) {
    const Matrix tr = read_matrix(a.train).data();
    const Matrix te = read_matrix(a.test).data();
    const std::vector<int> ytr = read_labels(a.train_labels);
    const std::vector<int> yte = read_labels(a.test_labels);
    out << "accuracy " << fmt(ridge_probe(tr, ytr, te, yte, a.lambda)) << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// validate / synth / sweep
// ---------------------------------------------------------------------------

struct ValidateArgs {
    Thm1Config thm1;
    Eigen::Index thm1_dim = 8;
    Thm2Config thm2;
    Prop2Config prop2;
    ProductLawConfig product;
    SchurConfig schur;
    std::string csv;
};

int emit_report(const Report& rep, const std::string& csv, std::ostream& out) {
    out << rep.to_text();
    if (!csv.empty()) write_text(csv, rep.to_csv());
    return rep.passed() ? kExitOk : kExitCriterion;
}

struct SynthArgs {
    int n_per_cell = 50;
    double noise = 0.3;
    Eigen::Index d = 16;
    std::uint64_t seed = 0;
    std::string out_a, out_b, labels;
};

int run_synth(const SynthArgs& a, std::ostream& out) {
    const LabeledEmbeddings ds = synth_factorial(a.n_per_cell, a.noise, a.d, a.seed);
    write_matrix(ds.embeddings[0].data(), a.out_a);
    write_matrix(ds.embeddings[1].data(), a.out_b);
    write_labels(ds.labels, a.labels);
    out << "wrote " << a.out_a << ", " << a.out_b << ", " << a.labels << " (" << ds.labels.size() << " rows)\n";
    return kExitOk;
}

struct SweepArgs {
    SweepData data;
    std::vector<Eigen::Index> l_grid = {16, 64, 256, 1024};
    std::vector<double> C_grid = default_C_grid();
    double C = 1.0;
    int seeds = 5;
    double lambda = 1e-3;
    std::string out;
};

int emit_csv(const Report& rep, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << rep.to_csv();
    } else {
        write_text(path, rep.to_csv());
        out << "wrote " << path << "\n";
    }
    return kExitOk;
}

void add_sweep_data(CLI::App* sub, SweepArgs& a) {
    sub->add_option("--n-per-cell", a.data.n_per_cell, "Samples per factor cell")->check(CLI::PositiveNumber);
    sub->add_option("--noise", a.data.noise, "Expected noise norm")->check(CLI::NonNegativeNumber);
    sub->add_option("--d", a.data.d, "Embedding dimension")->check(CLI::Range(2, 1 << 16));
    sub->add_option("--seed", a.data.seed, "Generator seed");
    sub->add_option("--out", a.out, "CSV output path (default: stdout)");
}

int dispatch(CLI::App& app, const std::vector<std::string>& argv_tail, std::ostream& out, std::ostream& err) {
    std::size_t threads = 0;
    app.add_option("--threads", threads, "Worker threads (default: $KROSSFUSE_THREADS or 1)")
        ->check(CLI::Range(std::size_t{1}, std::size_t{1024}));
    app.require_subcommand(1);

    FuseArgs fa;
    auto* fuse = app.add_subcommand("fuse", "Fuse a cross-modal embedding with a uni-modal one");
    fuse->add_option("--method", fa.method, "exact | rp | rff | kpomrp")
        ->check(CLI::IsMember({"exact", "rp", "rff", "kpomrp"}));
    fuse->add_option("--cross", fa.cross, "Cross-modal embedding of the paired rows")->required();
    fuse->add_option("--uni", fa.uni, "Uni-modal embedding of the same rows")->required();
    fuse->add_option("--missing", fa.missing, "Cross-modal embedding of rows lacking the uni-modal view");
    fuse->add_option("--C", fa.C, "Offset constant C (exact needs C > 0)");
    fuse->add_option("--l", fa.l, "Projection dimension (rp; per-factor for kpomrp)")->check(CLI::PositiveNumber);
    fuse->add_option("--r", fa.r, "Number of random frequencies (rff)")->check(CLI::PositiveNumber);
    fuse->add_option("--kernel", fa.kernel, "Kernel of the cross-modal embedding");
    fuse->add_option("--kernel-uni", fa.kernel_uni, "Kernel of the uni-modal embedding (default: --kernel)");
    fuse->add_option("--seed", fa.seed, "Random seed");
    fuse->add_option("--out", fa.out, "Fused output for the paired rows")->required();
    fuse->add_option("--out-missing", fa.out_missing, "Fused output for --missing (default: <out>.missing.<ext>)");
    fuse->add_option("--max-elements", fa.max_elements, "Refuse outputs with more elements than this")
        ->check(CLI::PositiveNumber);

    KernelArgs ka;
    auto* kern = app.add_subcommand("kernel", "Kernel (Gram) matrix of an embedding");
    kern->add_option("--in", ka.in, "Embedding file")->required();
    kern->add_option("--kernel", ka.kernel, "linear | cosine | rbf:<B> | rbf:median");
    kern->add_option("--out", ka.out, "Gram output")->required();
    kern->add_option("--heatmap", ka.heatmap, "Also write a PGM heatmap (plus a CSV next to it)");

    ClusterArgs ca;
    auto* clus = app.add_subcommand("cluster", "Spectral clustering scored against reference labels");
    auto* g_opt = clus->add_option("--gram", ca.gram, "Precomputed Gram matrix");
    auto* f_opt = clus->add_option("--features", ca.features, "Embedding file (Gram built with --kernel)");
    g_opt->excludes(f_opt);
    clus->add_option("--kernel", ca.kernel, "Kernel for --features");
    clus->add_option("--k", ca.k, "Number of clusters")->required()->check(CLI::Range(2, 1 << 20));
    clus->add_option("--labels", ca.labels, "Reference labels")->required();
    clus->add_option("--seed", ca.seed, "k-means seed");
    clus->add_option("--out", ca.out, "Write predicted assignments");

    ProbeArgs pa;
    auto* probe = app.add_subcommand("probe", "Ridge linear probe accuracy");
    probe->add_option("--train", pa.train, "Training embeddings")->required();
    probe->add_option("--train-labels", pa.train_labels, "Training labels")->required();
    probe->add_option("--test", pa.test, "Test embeddings")->required();
    probe->add_option("--test-labels", pa.test_labels, "Test labels")->required();
    probe->add_option("--lambda", pa.lambda, "Ridge penalty")->check(CLI::PositiveNumber);

    ValidateArgs va;
    auto* val = app.add_subcommand("validate", "Run a validation harness; exit 1 if a criterion fails");
    val->require_subcommand(1);
    auto* v1 = val->add_subcommand("thm1", "RP fusion concentration bound");
    v1->add_option("--l", va.thm1.l_grid, "Projection dimensions")->check(CLI::PositiveNumber);
    v1->add_option("--seeds", va.thm1.seeds, "Bases per l")->check(CLI::PositiveNumber);
    v1->add_option("--n", va.thm1.n, "Samples")->check(CLI::PositiveNumber);
    v1->add_option("--dim", va.thm1_dim, "Input dimension of both embeddings")->check(CLI::PositiveNumber);
    v1->add_option("--delta", va.thm1.delta, "Failure probability");
    v1->add_option("--slack", va.thm1.slack, "Allowed excess over delta");
    v1->add_option("--master-seed", va.thm1.master_seed, "Master seed");
    auto* v2 = val->add_subcommand("thm2", "Joint RFF concentration bound");
    v2->add_option("--r", va.thm2.r_grid, "Frequency counts")->check(CLI::PositiveNumber);
    v2->add_option("--draws", va.thm2.draws, "Frequency draws per r")->check(CLI::PositiveNumber);
    v2->add_option("--pairs", va.thm2.pairs, "Input pairs")->check(CLI::PositiveNumber);
    v2->add_option("--delta", va.thm2.delta, "Failure probability");
    v2->add_option("--slack", va.thm2.slack, "Allowed excess over delta");
    v2->add_option("--master-seed", va.thm2.master_seed, "Master seed");
    auto* v3 = val->add_subcommand("prop2", "Exact fused inner-product identities");
    v3->add_option("--instances", va.prop2.instances, "Random instances")->check(CLI::PositiveNumber);
    v3->add_option("--max-dim", va.prop2.max_dim, "Largest feature dimension")->check(CLI::PositiveNumber);
    v3->add_option("--C", va.prop2.C_values, "C values")->check(CLI::PositiveNumber);
    v3->add_option("--tol", va.prop2.tol, "Absolute tolerance");
    v3->add_option("--master-seed", va.prop2.master_seed, "Master seed");
    auto* v4 = val->add_subcommand("schur", "Positive semidefiniteness of kernel products");
    v4->add_option("--trials", va.schur.trials, "Trials per kernel pair")->check(CLI::PositiveNumber);
    v4->add_option("--n", va.schur.n, "Samples")->check(CLI::PositiveNumber);
    v4->add_option("--tol", va.schur.tol, "Relative eigenvalue tolerance");
    v4->add_option("--master-seed", va.schur.master_seed, "Master seed");
    auto* v5 = val->add_subcommand("product", "Fused Gram equals the product kernel");
    v5->add_option("--n", va.product.n, "Samples")->check(CLI::PositiveNumber);
    v5->add_option("--C", va.product.C_values, "C values")->check(CLI::PositiveNumber);
    v5->add_option("--tol", va.product.tol, "Absolute tolerance");
    v5->add_option("--master-seed", va.product.master_seed, "Master seed");
    for (auto* v : {v1, v2, v3, v4, v5}) v->add_option("--csv", va.csv, "Write the per-row statistics as CSV");

    SynthArgs sa;
    auto* syn = app.add_subcommand("synth", "Two-factor synthetic embeddings with 4 cells");
    syn->add_option("--n-per-cell", sa.n_per_cell, "Samples per cell")->check(CLI::PositiveNumber);
    syn->add_option("--noise", sa.noise, "Expected noise norm")->check(CLI::NonNegativeNumber);
    syn->add_option("--d", sa.d, "Embedding dimension")->check(CLI::Range(2, 1 << 16));
    syn->add_option("--seed", sa.seed, "Generator seed");
    syn->add_option("--out-a", sa.out_a, "Embedding A (factor 1)")->required();
    syn->add_option("--out-b", sa.out_b, "Embedding B (factor 2)")->required();
    syn->add_option("--labels", sa.labels, "Cell labels")->required();

    SweepArgs wa;
    auto* sweep = app.add_subcommand("sweep", "Ablations on synthetic data, emitted as CSV");
    sweep->require_subcommand(1);
    auto* wl = sweep->add_subcommand("l", "Projection dimension");
    add_sweep_data(wl, wa);
    wl->add_option("--l", wa.l_grid, "Projection dimensions")->check(CLI::PositiveNumber);
    wl->add_option("--C", wa.C, "Offset constant")->check(CLI::NonNegativeNumber);
    wl->add_option("--seeds", wa.seeds, "Bases per l")->check(CLI::PositiveNumber);
    auto* wc = sweep->add_subcommand("C", "Offset constant");
    add_sweep_data(wc, wa);
    wc->add_option("--C", wa.C_grid, "C values")->check(CLI::PositiveNumber);
    wc->add_option("--lambda", wa.lambda, "Ridge penalty")->check(CLI::PositiveNumber);
    auto* wk = sweep->add_subcommand("kernel", "Kernel choice");
    add_sweep_data(wk, wa);
    wk->add_option("--C", wa.C, "Offset constant")->check(CLI::NonNegativeNumber);

    try {
        std::vector<std::string> rev(argv_tail.rbegin(), argv_tail.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (threads > 0) set_thread_count(threads);

    if (fuse->parsed()) return run_fuse(fa, out);
    if (kern->parsed()) return run_kernel(ka, out);
    if (clus->parsed()) {
        if (ca.gram.empty() && ca.features.empty()) throw InvalidArgument("cluster needs --gram or --features");
        return run_cluster(ca, out);
    }
    if (probe->parsed()) return run_probe(pa, out);
    if (syn->parsed()) return run_synth(sa, out);
    if (val->parsed()) {
        if (v1->parsed()) {
            va.thm1.d_psi = va.thm1.d_gamma = va.thm1_dim;
            return emit_report(thm1_harness(va.thm1).report, va.csv, out);
        }
        if (v2->parsed()) return emit_report(thm2_harness(va.thm2).report, va.csv, out);
        if (v3->parsed()) return emit_report(prop2_harness(va.prop2).report, va.csv, out);
        if (v4->parsed()) return emit_report(schur_harness(va.schur), va.csv, out);
        return emit_report(product_law_harness(va.product), va.csv, out);
    }
    if (wl->parsed()) return emit_csv(sweep_projection_dim(wa.data, wa.l_grid, wa.C, wa.seeds), wa.out, out);
    if (wc->parsed()) return emit_csv(sweep_C(wa.data, wa.C_grid, wa.lambda), wa.out, out);
    return emit_csv(sweep_kernel(wa.data, wa.C), wa.out, out);
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Kernel-product fusion of embeddings", "krossfuse"};
    const std::size_t saved_threads = thread_count();
    int code = kExitUsage;
    try {
        code = dispatch(app, args, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
    } catch (const std::bad_alloc&) {
        err << "error: out of memory\n";
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
    }
    set_thread_count(saved_threads);
    return code;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return cli_main(args, out, err);
}

}  // namespace krossfuse
