#include "krossfuse/rff.hpp"

#include <cmath>

#include "krossfuse/counter_rng.hpp"
#include "krossfuse/parallel.hpp"

namespace krossfuse {
namespace {

Matrix gaussian_rows(Eigen::Index r, Eigen::Index d, double stddev, std::uint64_t seed, std::uint64_t stream) {
    Matrix w(r, d);
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            w(i, j) = stddev * rng::normal(seed, stream, static_cast<std::uint64_t>(i * d + j));
        }
    }
    return w;
}

void require_rbf_args(Eigen::Index d, Eigen::Index r, double B) {
    if (!(B > 0.0) || !std::isfinite(B)) throw InvalidArgument("rff: bandwidth B must be > 0");
    if (r < 1) throw InvalidArgument("rff: r must be >= 1");
    if (d < 1) throw InvalidArgument("rff: dimension must be >= 1");
}

double resolved_rbf(const KernelSpec& spec) {
    if (spec.kind != KernelKind::rbf) {
        throw InvalidArgument("rff: only rbf kernels are supported (got " + spec.to_string() + ")");
    }
    if (!spec.bandwidth) throw InvalidArgument("rff: rbf bandwidth unresolved");
    return *spec.bandwidth;
}

void require_nonnegative_C(double C) {
    if (!(C >= 0.0) || !std::isfinite(C)) throw InvalidArgument("C must be >= 0");
}

// Writes (1/sqrt r)(cos p_j, sin p_j) for phases p into out[2j], out[2j+1].
template <class Out>
void write_trig(const Eigen::VectorXd& phases, Out&& out) {
    const double s = 1.0 / std::sqrt(static_cast<double>(phases.size()));
    for (Eigen::Index j = 0; j < phases.size(); ++j) {
        out[2 * j] = s * std::cos(phases[j]);
        out[2 * j + 1] = s * std::sin(phases[j]);
    }
}

}  // namespace

FrequencySet sample_freqs_rbf(Eigen::Index d, Eigen::Index r, double B, std::uint64_t seed) {
    require_rbf_args(d, r, B);
    FrequencySet f;
    f.omega1 = gaussian_rows(r, d, std::sqrt(2.0 / B), seed, 0);
    f.kernel1 = KernelSpec::rbf(B);
    f.seed = seed;
    return f;
}

FrequencySet sample_joint_freqs_rbf(Eigen::Index d1, double B1, Eigen::Index d2, double B2, Eigen::Index r,
                                    std::uint64_t seed) {
    require_rbf_args(d2, r, B2);
    FrequencySet f = sample_freqs_rbf(d1, r, B1, seed);
    f.omega2 = gaussian_rows(r, d2, std::sqrt(2.0 / B2), seed, 1);
    f.kernel2 = KernelSpec::rbf(B2);
    return f;
}

FrequencySet sample_freqs(const KernelSpec& spec, Eigen::Index d, Eigen::Index r, std::uint64_t seed) {
    return sample_freqs_rbf(d, r, resolved_rbf(spec), seed);
}

FrequencySet sample_joint_freqs(const KernelSpec& spec1, Eigen::Index d1, const KernelSpec& spec2, Eigen::Index d2,
                                Eigen::Index r, std::uint64_t seed) {
    return sample_joint_freqs_rbf(d1, resolved_rbf(spec1), d2, resolved_rbf(spec2), r, seed);
}

Vector rff_single(const Vector& z, const FrequencySet& freqs) {
    if (z.size() != freqs.omega1.cols()) throw InvalidArgument("rff_single: dimension mismatch");
    Vector out(2 * freqs.r());
    write_trig(freqs.omega1 * z, out);
    return out;
}

Vector rff_joint(const Vector& z1, const Vector& z2, const FrequencySet& freqs) {
    if (!freqs.omega2) throw InvalidArgument("rff_joint: frequency set has no omega2");
    if (z1.size() != freqs.omega1.cols() || z2.size() != freqs.omega2->cols()) {
        throw InvalidArgument("rff_joint: dimension mismatch");
    }
    Vector out(2 * freqs.r());
    write_trig(freqs.omega1 * z1 + *freqs.omega2 * z2, out);
    return out;
}

Vector rff_krossfuse_shared(const Vector& gamma_cm_x, const Vector& psi_um_x, double C, const FrequencySet& freqs) {
    require_nonnegative_C(C);
    const Eigen::Index r2 = 2 * freqs.r();
    Vector out(2 * r2);
    out.head(r2) = std::sqrt(C) * rff_single(gamma_cm_x, freqs);
    out.tail(r2) = rff_joint(gamma_cm_x, psi_um_x, freqs);
    return out;
}

Vector rff_krossfuse_missing(const Vector& gamma_cm_t, double C, const FrequencySet& freqs) {
    require_nonnegative_C(C);
    const Eigen::Index r2 = 2 * freqs.r();
    Vector out = Vector::Zero(2 * r2);
    out.head(r2) = std::sqrt(C) * rff_single(gamma_cm_t, freqs);
    return out;
}

Matrix rff_single_batch(const Matrix& z, const FrequencySet& freqs) {
    Matrix out(z.rows(), 2 * freqs.r());
    parallel_for(static_cast<std::size_t>(z.rows()), [&](std::size_t ui) {
        const auto i = static_cast<Eigen::Index>(ui);
        out.row(i) = rff_single(z.row(i).transpose(), freqs).transpose();
    });
    return out;
}

Matrix rff_joint_batch(const Matrix& z1, const Matrix& z2, const FrequencySet& freqs) {
    if (z1.rows() != z2.rows()) throw InvalidArgument("rff_joint_batch: batches are not row-aligned");
    Matrix out(z1.rows(), 2 * freqs.r());
    parallel_for(static_cast<std::size_t>(z1.rows()), [&](std::size_t ui) {
        const auto i = static_cast<Eigen::Index>(ui);
        out.row(i) = rff_joint(z1.row(i).transpose(), z2.row(i).transpose(), freqs).transpose();
    });
    return out;
}

Matrix rff_krossfuse_shared_batch(const Matrix& gamma_cm, const Matrix& psi_um, double C, const FrequencySet& freqs) {
    if (gamma_cm.rows() != psi_um.rows()) throw InvalidArgument("rff shared: batches are not row-aligned");
    Matrix out(gamma_cm.rows(), 4 * freqs.r());
    parallel_for(static_cast<std::size_t>(gamma_cm.rows()), [&](std::size_t ui) {
        const auto i = static_cast<Eigen::Index>(ui);
        out.row(i) = rff_krossfuse_shared(gamma_cm.row(i).transpose(), psi_um.row(i).transpose(), C, freqs).transpose();
    });
    return out;
}

Matrix rff_krossfuse_missing_batch(const Matrix& gamma_cm, double C, const FrequencySet& freqs) {
    Matrix out(gamma_cm.rows(), 4 * freqs.r());
    parallel_for(static_cast<std::size_t>(gamma_cm.rows()), [&](std::size_t ui) {
        const auto i = static_cast<Eigen::Index>(ui);
        out.row(i) = rff_krossfuse_missing(gamma_cm.row(i).transpose(), C, freqs).transpose();
    });
    return out;
}

}  // namespace krossfuse
