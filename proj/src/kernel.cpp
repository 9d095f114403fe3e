#include "krossfuse/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "krossfuse/parallel.hpp"

namespace krossfuse {
namespace {

double checked_norm(const Vector& v) {
    const double n = v.norm();
    if (n == 0.0) throw InvalidArgument("cosine kernel: zero-norm input");
    return n;
}

double rbf_bandwidth(const KernelSpec& spec) {
    if (!spec.bandwidth) {
        throw InvalidArgument("rbf kernel: bandwidth unresolved (use resolve_bandwidth for rbf:median)");
    }
    return *spec.bandwidth;
}

}  // namespace

double kernel_eval(const KernelSpec& spec, const Vector& x, const Vector& y) {
    if (x.size() != y.size()) {
        throw InvalidArgument("kernel_eval: dimension mismatch (" + std::to_string(x.size()) + " vs " +
                              std::to_string(y.size()) + ")");
    }
    switch (spec.kind) {
        case KernelKind::linear: return x.dot(y);
        case KernelKind::cosine: {
            if ((x.array() == y.array()).all()) {
                checked_norm(x);
                return 1.0;
            }
            return x.dot(y) / (checked_norm(x) * checked_norm(y));
        }
        case KernelKind::rbf: {
            const double b = rbf_bandwidth(spec);
            return std::exp(-(x - y).squaredNorm() / b);
        }
    }
    return 0.0;
}

Vector finite_feature(const KernelSpec& spec, const Vector& x) {
    switch (spec.kind) {
        case KernelKind::linear: return x;
        case KernelKind::cosine: return x / checked_norm(x);
        case KernelKind::rbf: break;
    }
    throw InvalidArgument("rbf kernel has no finite feature map; use the rff path (--method rff)");
}

Matrix feature_matrix(const KernelSpec& spec, const Matrix& rows) {
    if (spec.kind == KernelKind::linear) return rows;
    Matrix out(rows.rows(), rows.cols());
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        out.row(i) = finite_feature(spec, rows.row(i).transpose()).transpose();
    }
    return out;
}

double median_bandwidth(const Matrix& rows) {
    const Eigen::Index n = rows.rows();
    if (n < 2) return 1.0;
    std::vector<double> d2;
    d2.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) d2.push_back((rows.row(i) - rows.row(j)).squaredNorm());
    }
    const std::size_t m = d2.size();
    std::nth_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(m / 2), d2.end());
    double med = d2[m / 2];
    if (m % 2 == 0) {
        const double lower = *std::max_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(m / 2));
        med = 0.5 * (med + lower);
    }
    return med > 0.0 ? med : 1.0;
}

KernelSpec resolve_bandwidth(const KernelSpec& spec, const Matrix& rows) {
    if (spec.kind != KernelKind::rbf || spec.bandwidth) return spec;
    return KernelSpec::rbf(median_bandwidth(rows));
}

Matrix kernel_matrix(const KernelSpec& spec, const EmbeddingMatrix& e) { return kernel_matrix(spec, e.data()); }

Matrix kernel_matrix(const KernelSpec& raw_spec, const Matrix& rows) {
    const KernelSpec spec = resolve_bandwidth(raw_spec, rows);
    const Eigen::Index n = rows.rows();
    Matrix k(n, n);

    // Cosine rows are normalized once; the kernel then reduces to a dot product.
    Matrix feats;
    if (spec.kind == KernelKind::cosine) feats = feature_matrix(spec, rows);
    const Matrix& src = spec.kind == KernelKind::cosine ? feats : rows;

    parallel_for(static_cast<std::size_t>(n), [&](std::size_t ui) {
        const auto i = static_cast<Eigen::Index>(ui);
        for (Eigen::Index j = 0; j < n; ++j) {
            // Evaluate on the (min, max) pair so k(i,j) and k(j,i) are bitwise equal.
            const Eigen::Index a = std::min(i, j), b = std::max(i, j);
            switch (spec.kind) {
                case KernelKind::linear:
                case KernelKind::cosine: k(i, j) = src.row(a).dot(src.row(b)); break;
                case KernelKind::rbf:
                    k(i, j) = std::exp(-(src.row(a) - src.row(b)).squaredNorm() / *spec.bandwidth);
                    break;
            }
        }
        if (spec.kind != KernelKind::linear) k(i, i) = 1.0;
    });
    return k;
}

Matrix gram(const Matrix& features) { return gram(features, features); }

Matrix gram(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw InvalidArgument("gram: feature dimension mismatch");
    Matrix k(a.rows(), b.rows());
    const bool symmetric = &a == &b;
    parallel_for(static_cast<std::size_t>(a.rows()), [&](std::size_t ui) {
        const auto i = static_cast<Eigen::Index>(ui);
        for (Eigen::Index j = 0; j < b.rows(); ++j) {
            if (symmetric && j < i) {
                k(i, j) = a.row(j).dot(a.row(i));
            } else {
                k(i, j) = a.row(i).dot(b.row(j));
            }
        }
    });
    return k;
}

PsdResult psd_check(const Matrix& k, double tol) {
    if (k.rows() != k.cols()) throw InvalidArgument("psd_check: matrix is not square");
    if (k.size() == 0) throw InvalidArgument("psd_check: empty matrix");
    const double scale = std::max(1.0, k.cwiseAbs().maxCoeff());
    if ((k - k.transpose()).cwiseAbs().maxCoeff() > tol * scale) {
        throw InvalidArgument("psd_check: matrix is not symmetric within tolerance");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(Eigen::MatrixXd(k), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw Error("psd_check: eigensolver failed");
    const auto& ev = solver.eigenvalues();
    const double lo = ev.minCoeff();
    const double threshold = -tol * std::max(1.0, ev.cwiseAbs().maxCoeff());
    return {lo >= threshold, lo};
}

}  // namespace krossfuse
