#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "krossfuse/counter_rng.hpp"
#include "krossfuse/exact_fusion.hpp"
#include "krossfuse/kernel.hpp"
#include "krossfuse/parallel.hpp"
#include "oracle.hpp"

using namespace krossfuse;

namespace {
Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}
}  // namespace

TEST_CASE("EmbeddingMatrix rejects empty and non-finite data") {
    CHECK_THROWS_AS(EmbeddingMatrix(Matrix(0, 3)), InvalidArgument);
    CHECK_THROWS_AS(EmbeddingMatrix(Matrix(2, 0)), InvalidArgument);
    Matrix m = Matrix::Ones(2, 2);
    m(1, 0) = std::nan("");
    CHECK_THROWS_AS(EmbeddingMatrix{m}, InvalidArgument);
    m(1, 0) = INFINITY;
    CHECK_THROWS_AS(EmbeddingMatrix{m}, InvalidArgument);
    const EmbeddingMatrix ok(Matrix::Ones(2, 3), Modality::nonshared, "x");
    CHECK(ok.rows() == 2);
    CHECK(ok.cols() == 3);
    CHECK(ok.modality() == Modality::nonshared);
}

TEST_CASE("KernelSpec grammar round-trips") {
    CHECK(KernelSpec::parse("linear") == KernelSpec::linear());
    CHECK(KernelSpec::parse("cosine") == KernelSpec::cosine());
    CHECK(KernelSpec::parse("rbf:median") == KernelSpec::rbf_median());
    CHECK(KernelSpec::parse("rbf:2.5") == KernelSpec::rbf(2.5));
    CHECK(KernelSpec::parse(KernelSpec::rbf(0.1).to_string()) == KernelSpec::rbf(0.1));
    for (const char* bad : {"", "rbf", "rbf:", "rbf:-1", "rbf:0", "rbf:abc", "poly", "linear:1", "rbf:nan"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(KernelSpec::parse(bad), InvalidArgument);
    }
}

TEST_CASE("FusionConfig digest is stable and sensitive to every field") {
    FusionConfig a;
    a.kernels = {KernelSpec::cosine(), KernelSpec::linear()};
    FusionConfig b = a;
    CHECK(a.digest() == b.digest());
    b.seed = 1;
    CHECK(a.digest() != b.digest());
    b = a;
    b.C = 2.0;
    CHECK(a.digest() != b.digest());
    b = a;
    b.kernels[1] = KernelSpec::rbf(1.0);
    CHECK(a.digest() != b.digest());
    FusionConfig bad;
    bad.C = -1.0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    CHECK(parse_fusion_method("kpomrp") == FusionMethod::kpomrp);
    CHECK_THROWS_AS(parse_fusion_method("fast"), InvalidArgument);
}

TEST_CASE("counter RNG is a pure function of (seed, stream, index)") {
    CHECK(rng::bits(1, 2, 3) == rng::bits(1, 2, 3));
    CHECK(rng::bits(1, 2, 3) != rng::bits(1, 2, 4));
    CHECK(rng::bits(1, 2, 3) != rng::bits(1, 3, 3));
    CHECK(rng::bits(1, 2, 3) != rng::bits(2, 2, 3));
    CHECK(rng::derive_seed(7, 0) != rng::derive_seed(7, 1));

    const int n = 200000;
    double s = 0, s2 = 0, u_lo = 1, u_hi = 0;
    for (int i = 0; i < n; ++i) {
        const double z = rng::normal(11, 0, static_cast<std::uint64_t>(i));
        s += z;
        s2 += z * z;
        const double u = rng::uniform01(11, 1, static_cast<std::uint64_t>(i));
        u_lo = std::min(u_lo, u);
        u_hi = std::max(u_hi, u);
    }
    CHECK(std::abs(s / n) < 0.01);
    CHECK(std::abs(s2 / n - 1.0) < 0.02);
    CHECK(u_lo >= 0.0);
    CHECK(u_hi < 1.0);
}

TEST_CASE("parallel_for covers every index once and propagates exceptions") {
    const std::size_t saved = thread_count();
    for (std::size_t t : {1u, 3u, 8u}) {
        set_thread_count(t);
        std::vector<int> hits(1001, 0);
        parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
        CHECK(std::count(hits.begin(), hits.end(), 1) == 1001);
        CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                            if (i == 7) throw InvalidArgument("boom");
                        }),
                        InvalidArgument);
    }
    set_thread_count(saved);
}

TEST_CASE("kernel_eval reference values") {
    CHECK(kernel_eval(KernelSpec::rbf(4.0), vec({1, 2, 3}), vec({1, 2, 3})) == 1.0);
    CHECK(kernel_eval(KernelSpec::rbf(1.0), vec({0}), vec({1})) == doctest::Approx(0.3678794).epsilon(1e-7));
    CHECK(kernel_eval(KernelSpec::cosine(), vec({1, 0}), vec({0, 1})) == 0.0);
    CHECK(kernel_eval(KernelSpec::linear(), vec({1, 2}), vec({3, 4})) == 11.0);
    CHECK_THROWS_AS(kernel_eval(KernelSpec::rbf_median(), vec({1}), vec({2})), InvalidArgument);
    CHECK_THROWS_AS(kernel_eval(KernelSpec::cosine(), vec({0, 0}), vec({1, 0})), InvalidArgument);
    CHECK_THROWS_AS(kernel_eval(KernelSpec::linear(), vec({1, 0}), vec({1})), InvalidArgument);

    const Matrix pts = oracle::gaussian(6, 5, 1);
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
            const Vector x = pts.row(i).transpose(), y = pts.row(j).transpose();
            CHECK(kernel_eval(KernelSpec::cosine(), x, y) == doctest::Approx(oracle::cosine(x, y)).epsilon(1e-13));
            CHECK(kernel_eval(KernelSpec::rbf(2.0), x, y) == doctest::Approx(oracle::rbf(x, y, 2.0)).epsilon(1e-13));
        }
    }
}

TEST_CASE("finite_feature maps") {
    CHECK(finite_feature(KernelSpec::linear(), vec({2, 3})) == vec({2, 3}));
    const Vector c = finite_feature(KernelSpec::cosine(), vec({3, 4}));
    CHECK(c(0) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(c(1) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK_THROWS_WITH_AS(finite_feature(KernelSpec::rbf(1.0), vec({1})), doctest::Contains("--method rff"),
                         InvalidArgument);

    const Matrix pts = oracle::gaussian(5, 4, 2);
    const Matrix f = feature_matrix(KernelSpec::cosine(), pts);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            CHECK(std::abs(f.row(i).dot(f.row(j)) -
                           kernel_eval(KernelSpec::cosine(), pts.row(i).transpose(), pts.row(j).transpose())) <= 1e-12);
}

TEST_CASE("kernel_matrix") {
    const Matrix one = oracle::gaussian(1, 3, 3);
    CHECK(kernel_matrix(KernelSpec::linear(), one)(0, 0) == doctest::Approx(one.squaredNorm()));
    CHECK(kernel_matrix(KernelSpec::linear(), Matrix(Matrix::Identity(4, 4))) == Matrix::Identity(4, 4));

    Matrix three(3, 2);
    three << 0, 0, 1, 0, 0, 2;
    const Matrix k = kernel_matrix(KernelSpec::rbf(1.0), three);
    CHECK(psd_check(k).min_eigenvalue >= -1e-9);
    CHECK(k(0, 1) == doctest::Approx(std::exp(-1.0)));

    // Median heuristic: squared pairwise distances are 1, 4, 5.
    CHECK(median_bandwidth(three) == doctest::Approx(4.0));
    CHECK(resolve_bandwidth(KernelSpec::rbf_median(), three) == KernelSpec::rbf(median_bandwidth(three)));
    CHECK(median_bandwidth(Matrix::Ones(3, 2)) == 1.0);

    const Matrix pts = oracle::gaussian(20, 3, 4);
    const Matrix km = kernel_matrix(KernelSpec::rbf_median(), pts);
    CHECK(km == km.transpose());
    CHECK(km.diagonal() == Vector::Ones(20));
}

TEST_CASE("kernel_matrix is bit-identical across thread counts") {
    const std::size_t saved = thread_count();
    const Matrix pts = oracle::gaussian(50, 7, 5);
    set_thread_count(1);
    const Matrix a = kernel_matrix(KernelSpec::rbf_median(), pts);
    set_thread_count(4);
    const Matrix b = kernel_matrix(KernelSpec::rbf_median(), pts);
    set_thread_count(saved);
    CHECK(a == b);
}

TEST_CASE("psd_check") {
    const PsdResult id = psd_check(Matrix::Identity(4, 4));
    CHECK(id.is_psd);
    CHECK(id.min_eigenvalue == doctest::Approx(1.0));
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 1;
    d(1, 1) = -0.5;
    const PsdResult neg = psd_check(d);
    CHECK_FALSE(neg.is_psd);
    CHECK(neg.min_eigenvalue == doctest::Approx(-0.5));
    Matrix asym = Matrix::Identity(2, 2);
    asym(0, 1) = 0.3;
    CHECK_THROWS_AS(psd_check(asym), InvalidArgument);
    CHECK_THROWS_AS(psd_check(Matrix(2, 3)), InvalidArgument);

    // Schur product of two PSD Grams, checked against a direct eigendecomposition.
    const Matrix a = oracle::gram(oracle::gaussian(10, 3, 6));
    const Matrix b = oracle::gram(oracle::gaussian(10, 4, 7));
    const Matrix h = a.cwiseProduct(b);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    CHECK(psd_check(h).is_psd);
}
