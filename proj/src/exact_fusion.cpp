#include "krossfuse/exact_fusion.hpp"

#include <cmath>
#include <limits>

#include "krossfuse/parallel.hpp"

namespace krossfuse {
namespace {

void require_positive_C(double C) {
    if (!(C > 0.0) || !std::isfinite(C)) throw InvalidArgument("C must be > 0");
}

}  // namespace

Vector kron(const Vector& u, const Vector& v) {
    Vector out(u.size() * v.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) out.segment(i * v.size(), v.size()) = u[i] * v;
    return out;
}

Vector multi_kron(std::span<const Vector> feats) {
    if (feats.empty()) throw InvalidArgument("multi_kron: empty factor list");
    Vector acc = feats.front();
    for (std::size_t i = 1; i < feats.size(); ++i) acc = kron(acc, feats[i]);
    return acc;
}

namespace detail {

Vector symmetrize(const Vector& phi, double C) {
    const Eigen::Index d = phi.size();
    if (d < 1) throw InvalidArgument("symmetrize_shared: empty feature vector");
    const double c = std::sqrt(C / static_cast<double>(d));
    const double s = 1.0 / std::sqrt(2.0);
    Vector out(2 * d);
    out.head(d) = s * (phi.array() + c);
    out.tail(d) = s * (c - phi.array());
    return out;
}

Vector missing_constant(double C, Eigen::Index d) {
    if (d < 1) throw InvalidArgument("missing_constant: d must be >= 1");
    return Vector::Constant(2 * d, std::sqrt(C / (2.0 * static_cast<double>(d))));
}

}  // namespace detail

Vector symmetrize_shared(const Vector& phi, double C) {
    require_positive_C(C);
    return detail::symmetrize(phi, C);
}

Vector missing_constant(double C, Eigen::Index d) {
    require_positive_C(C);
    return detail::missing_constant(C, d);
}

Vector krossfuse_shared(const Vector& psi_feat, const Vector& gamma_feat, double C) {
    return kron(psi_feat, symmetrize_shared(gamma_feat, C));
}

Vector krossfuse_missing(const Vector& psi_feat, double C, Eigen::Index d_gamma) {
    return kron(psi_feat, missing_constant(C, d_gamma));
}

void check_element_cap(std::size_t rows, std::size_t cols, std::size_t cap) {
    const bool overflow = cols != 0 && rows > std::numeric_limits<std::size_t>::max() / cols;
    if (overflow || rows * cols > cap) {
        throw CapacityError("fused output of " + std::to_string(rows) + " x " + std::to_string(cols) +
                            " elements exceeds the cap of " + std::to_string(cap) +
                            "; use --method rp (random projection) or --method rff instead");
    }
}

Matrix krossfuse_shared_batch(const Matrix& psi_feats, const Matrix& gamma_feats, double C,
                              std::size_t element_cap) {
    if (psi_feats.rows() != gamma_feats.rows()) {
        throw InvalidArgument("krossfuse_shared_batch: batches are not row-aligned");
    }
    require_positive_C(C);
    const auto out_dim = static_cast<std::size_t>(psi_feats.cols() * 2 * gamma_feats.cols());
    check_element_cap(static_cast<std::size_t>(psi_feats.rows()), out_dim, element_cap);

    Matrix out(psi_feats.rows(), static_cast<Eigen::Index>(out_dim));
    parallel_for(static_cast<std::size_t>(psi_feats.rows()), [&](std::size_t ui) {
        const auto i = static_cast<Eigen::Index>(ui);
        out.row(i) =
            krossfuse_shared(psi_feats.row(i).transpose(), gamma_feats.row(i).transpose(), C).transpose();
    });
    return out;
}

Matrix krossfuse_missing_batch(const Matrix& psi_feats, double C, Eigen::Index d_gamma,
                               std::size_t element_cap) {
    const auto out_dim = static_cast<std::size_t>(psi_feats.cols() * 2 * d_gamma);
    check_element_cap(static_cast<std::size_t>(psi_feats.rows()), out_dim, element_cap);
    const Vector constant = missing_constant(C, d_gamma);

    Matrix out(psi_feats.rows(), static_cast<Eigen::Index>(out_dim));
    parallel_for(static_cast<std::size_t>(psi_feats.rows()), [&](std::size_t ui) {
        const auto i = static_cast<Eigen::Index>(ui);
        out.row(i) = kron(psi_feats.row(i).transpose(), constant).transpose();
    });
    return out;
}

}  // namespace krossfuse
