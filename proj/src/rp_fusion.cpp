#include "krossfuse/rp_fusion.hpp"

#include <cmath>

#include "krossfuse/counter_rng.hpp"
#include "krossfuse/parallel.hpp"

namespace krossfuse {
namespace {

constexpr double kSqrt3 = 1.7320508075688772;

void require_nonnegative_C(double C) {
    if (!(C >= 0.0) || !std::isfinite(C)) throw InvalidArgument("C must be >= 0");
}

void require_rows(const Matrix& u, Eigen::Index d, const char* what) {
    if (u.rows() != d) {
        throw InvalidArgument(std::string(what) + ": dimension mismatch (input " + std::to_string(d) +
                              ", basis " + std::to_string(u.rows()) + ")");
    }
}

// (1/sqrt l) * (U_1^T a) .* (U_2^T b) as a row vector.
Eigen::RowVectorXd fuse_row(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b, const RandomBasis& basis) {
    Eigen::RowVectorXd pa = a * basis.matrix(0);
    Eigen::RowVectorXd pb = b * basis.matrix(1);
    return pa.cwiseProduct(pb) / std::sqrt(static_cast<double>(basis.l()));
}

}  // namespace

Matrix sample_projection(Eigen::Index d, Eigen::Index l, std::uint64_t seed, std::uint64_t stream) {
    if (d < 1 || l < 1) throw InvalidArgument("sample_projection: dims and l must be >= 1");
    Matrix u(d, l);
    for (Eigen::Index r = 0; r < d; ++r) {
        for (Eigen::Index c = 0; c < l; ++c) {
            const auto idx = static_cast<std::uint64_t>(r * l + c);
            u(r, c) = rng::uniform(seed, stream, idx, -kSqrt3, kSqrt3);
        }
    }
    return u;
}

RandomBasis RandomBasis::sample(std::span<const Eigen::Index> dims, Eigen::Index l, std::uint64_t seed) {
    if (l < 1) throw InvalidArgument("RandomBasis: l must be >= 1");
    std::vector<Matrix> mats(dims.size());
    parallel_for(dims.size(), [&](std::size_t i) { mats[i] = sample_projection(dims[i], l, seed, i); });
    return RandomBasis(std::move(mats), l, seed);
}

RandomBasis RandomBasis::from_matrices(std::vector<Matrix> matrices, std::uint64_t seed) {
    if (matrices.empty()) throw InvalidArgument("RandomBasis: no matrices");
    const Eigen::Index l = matrices.front().cols();
    if (l < 1) throw InvalidArgument("RandomBasis: l must be >= 1");
    for (const auto& m : matrices) {
        if (m.cols() != l) throw InvalidArgument("RandomBasis: matrices disagree on l");
        if (m.rows() < 1) throw InvalidArgument("RandomBasis: empty matrix");
    }
    return RandomBasis(std::move(matrices), l, seed);
}

Vector rp_fuse_pair(const Vector& a, const Vector& b, const RandomBasis& basis) {
    if (basis.size() < 2) throw InvalidArgument("rp_fuse_pair: basis needs two matrices");
    require_rows(basis.matrix(0), a.size(), "rp_fuse_pair");
    require_rows(basis.matrix(1), b.size(), "rp_fuse_pair");
    return fuse_row(a.transpose(), b.transpose(), basis).transpose();
}

Matrix rp_multi(std::span<const Matrix> batches, const RandomBasis& basis) {
    if (batches.size() < 2) throw InvalidArgument("rp_multi: need at least two factors");
    if (basis.size() < batches.size()) throw InvalidArgument("rp_multi: basis has too few matrices");
    const Eigen::Index n = batches.front().rows();
    for (std::size_t i = 0; i < batches.size(); ++i) {
        if (batches[i].rows() != n) throw InvalidArgument("rp_multi: mismatched batch sizes");
        require_rows(basis.matrix(i), batches[i].cols(), "rp_multi");
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(basis.l()));
    Matrix out(n, basis.l());
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t ui) {
        const auto r = static_cast<Eigen::Index>(ui);
        Eigen::RowVectorXd acc = batches[0].row(r) * basis.matrix(0);
        for (std::size_t i = 1; i < batches.size(); ++i) {
            Eigen::RowVectorXd p = batches[i].row(r) * basis.matrix(i);
            acc = acc.cwiseProduct(p);
        }
        out.row(r) = acc * scale;
    });
    return out;
}

RpKrossFuser::RpKrossFuser(Eigen::Index d_psi, Eigen::Index d_gamma, double C, Eigen::Index l, std::uint64_t seed)
    : basis_([&] {
          const Eigen::Index dims[] = {d_psi, 2 * d_gamma};
          return RandomBasis::sample(dims, l, seed);
      }()),
      C_(C) {
    require_nonnegative_C(C);
}

RpKrossFuser::RpKrossFuser(RandomBasis basis, double C) : basis_(std::move(basis)), C_(C) {
    require_nonnegative_C(C);
    if (basis_.size() != 2) throw InvalidArgument("RpKrossFuser: basis must hold exactly two matrices");
    if (basis_.matrix(1).rows() % 2 != 0) {
        throw InvalidArgument("RpKrossFuser: second basis matrix must have 2*d_gamma rows");
    }
}

Matrix RpKrossFuser::shared(const Matrix& psi_feats, const Matrix& gamma_feats) const {
    if (psi_feats.rows() != gamma_feats.rows()) throw InvalidArgument("rp shared: batches are not row-aligned");
    require_rows(basis_.matrix(0), psi_feats.cols(), "rp shared (psi)");
    require_rows(basis_.matrix(1), 2 * gamma_feats.cols(), "rp shared (symmetrized gamma)");
    Matrix out(psi_feats.rows(), basis_.l());
    parallel_for(static_cast<std::size_t>(psi_feats.rows()), [&](std::size_t ui) {
        const auto i = static_cast<Eigen::Index>(ui);
        const Vector sym = detail::symmetrize(gamma_feats.row(i).transpose(), C_);
        out.row(i) = fuse_row(psi_feats.row(i), sym.transpose(), basis_);
    });
    return out;
}

Matrix RpKrossFuser::missing(const Matrix& psi_feats) const {
    require_rows(basis_.matrix(0), psi_feats.cols(), "rp missing (psi)");
    const Eigen::RowVectorXd constant = detail::missing_constant(C_, d_gamma()).transpose();
    // The constant side projects to the same vector for every row.
    const Eigen::RowVectorXd projected = constant * basis_.matrix(1);
    const double scale = 1.0 / std::sqrt(static_cast<double>(basis_.l()));
    Matrix out(psi_feats.rows(), basis_.l());
    parallel_for(static_cast<std::size_t>(psi_feats.rows()), [&](std::size_t ui) {
        const auto i = static_cast<Eigen::Index>(ui);
        Eigen::RowVectorXd pa = psi_feats.row(i) * basis_.matrix(0);
        out.row(i) = pa.cwiseProduct(projected) * scale;
    });
    return out;
}

Matrix rp_krossfuse_shared(const Matrix& psi_feats, const Matrix& gamma_feats, double C, const RandomBasis& basis) {
    return RpKrossFuser(basis, C).shared(psi_feats, gamma_feats);
}

Matrix rp_krossfuse_missing(const Matrix& psi_feats, double C, Eigen::Index d_gamma, const RandomBasis& basis) {
    const RpKrossFuser fuser(basis, C);
    if (fuser.d_gamma() != d_gamma) throw InvalidArgument("rp missing: d_gamma does not match basis");
    return fuser.missing(psi_feats);
}

namespace {

Matrix kpomrp_impl(const Matrix& psi_feats, const Matrix& other, const RandomBasis& basis, std::size_t cap) {
    if (basis.size() < 2) throw InvalidArgument("kpomrp: basis needs two matrices");
    require_rows(basis.matrix(0), psi_feats.cols(), "kpomrp (psi)");
    require_rows(basis.matrix(1), other.cols(), "kpomrp (symmetrized gamma)");
    const Eigen::Index l = basis.l();
    check_element_cap(static_cast<std::size_t>(psi_feats.rows()), static_cast<std::size_t>(l * l), cap);
    const double scale = 1.0 / std::sqrt(static_cast<double>(l));
    Matrix out(psi_feats.rows(), l * l);
    parallel_for(static_cast<std::size_t>(psi_feats.rows()), [&](std::size_t ui) {
        const auto i = static_cast<Eigen::Index>(ui);
        Vector pa = (psi_feats.row(i) * basis.matrix(0)).transpose() * scale;
        Vector pb = (other.row(i) * basis.matrix(1)).transpose() * scale;
        out.row(i) = kron(pa, pb).transpose();
    });
    return out;
}

}  // namespace

Matrix kpomrp_shared(const Matrix& psi_feats, const Matrix& gamma_feats, double C, const RandomBasis& basis,
                     std::size_t element_cap) {
    require_nonnegative_C(C);
    if (psi_feats.rows() != gamma_feats.rows()) throw InvalidArgument("kpomrp: batches are not row-aligned");
    Matrix sym(gamma_feats.rows(), 2 * gamma_feats.cols());
    for (Eigen::Index i = 0; i < gamma_feats.rows(); ++i) {
        sym.row(i) = detail::symmetrize(gamma_feats.row(i).transpose(), C).transpose();
    }
    return kpomrp_impl(psi_feats, sym, basis, element_cap);
}

Matrix kpomrp_missing(const Matrix& psi_feats, double C, Eigen::Index d_gamma, const RandomBasis& basis,
                      std::size_t element_cap) {
    require_nonnegative_C(C);
    const Eigen::RowVectorXd constant = detail::missing_constant(C, d_gamma).transpose();
    Matrix other = constant.replicate(psi_feats.rows(), 1);
    return kpomrp_impl(psi_feats, other, basis, element_cap);
}

}  // namespace krossfuse
