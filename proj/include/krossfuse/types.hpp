#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace krossfuse {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Violated precondition on a value passed by the caller.
class InvalidArgument : public Error {
  public:
    using Error::Error;
};

/// Malformed or unsupported input file. `field()` names the offending header
/// field or location.
class FormatError : public Error {
  public:
    FormatError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

  private:
    std::string field_;
};

/// A materialized output would exceed the configured element cap.
class CapacityError : public Error {
  public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// EmbeddingMatrix
// ---------------------------------------------------------------------------

enum class Modality : std::uint8_t { shared, nonshared };

std::string_view to_string(Modality m) noexcept;

/// Rows are samples, columns are embedding dimensions. Every entry is finite.
class EmbeddingMatrix {
  public:
    explicit EmbeddingMatrix(Matrix data, Modality modality = Modality::shared, std::string name = {});

    const Matrix& data() const noexcept { return data_; }
    Modality modality() const noexcept { return modality_; }
    const std::string& name() const noexcept { return name_; }

    Eigen::Index rows() const noexcept { return data_.rows(); }
    Eigen::Index cols() const noexcept { return data_.cols(); }
    Vector row(Eigen::Index i) const { return data_.row(i).transpose(); }

  private:
    Matrix data_;
    Modality modality_;
    std::string name_;
};

// ---------------------------------------------------------------------------
// KernelSpec
// ---------------------------------------------------------------------------

enum class KernelKind : std::uint8_t { linear, cosine, rbf };

/// An rbf spec without a bandwidth means "median heuristic"; it must be
/// resolved against a batch (see resolve_bandwidth) before pointwise use.
struct KernelSpec {
    KernelKind kind = KernelKind::linear;
    std::optional<double> bandwidth;

    static KernelSpec linear() { return {KernelKind::linear, std::nullopt}; }
    static KernelSpec cosine() { return {KernelKind::cosine, std::nullopt}; }
    static KernelSpec rbf(double bandwidth);
    static KernelSpec rbf_median() { return {KernelKind::rbf, std::nullopt}; }

    /// Grammar: `linear`, `cosine`, `rbf:<B>`, `rbf:median`.
    static KernelSpec parse(std::string_view text);
    std::string to_string() const;

    bool has_finite_feature_map() const noexcept { return kind != KernelKind::rbf; }
    bool operator==(const KernelSpec&) const = default;
};

// ---------------------------------------------------------------------------
// Fusion configuration and output
// ---------------------------------------------------------------------------

struct FusionConfig {
    double C = 1.0;
    std::size_t l = 1024;
    std::size_t r = 1024;
    std::uint64_t seed = 0;
    std::vector<KernelSpec> kernels;

    void validate() const;
    /// FNV-1a over a canonical text rendering; stable across platforms.
    std::uint64_t digest() const;
    std::string canonical() const;
};

enum class FusionMethod : std::uint8_t { exact, rp, rff, kpomrp };

std::string_view to_string(FusionMethod m) noexcept;
FusionMethod parse_fusion_method(std::string_view text);

struct FusedEmbedding {
    EmbeddingMatrix matrix;
    FusionMethod method;
    std::uint64_t config_digest;
    std::uint64_t seed;
};

}  // namespace krossfuse
