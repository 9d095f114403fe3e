#include "krossfuse/types.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace krossfuse {

std::string_view to_string(Modality m) noexcept {
    return m == Modality::shared ? "shared" : "nonshared";
}

EmbeddingMatrix::EmbeddingMatrix(Matrix data, Modality modality, std::string name)
    : data_(std::move(data)), modality_(modality), name_(std::move(name)) {
    if (data_.rows() < 1 || data_.cols() < 1) {
        throw InvalidArgument("EmbeddingMatrix: rows and cols must be >= 1 (got " +
                              std::to_string(data_.rows()) + "x" + std::to_string(data_.cols()) + ")");
    }
    if (!data_.allFinite()) {
        throw InvalidArgument("EmbeddingMatrix: non-finite entry");
    }
}

KernelSpec KernelSpec::rbf(double bandwidth) {
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
        throw InvalidArgument("rbf bandwidth must be positive and finite");
    }
    return {KernelKind::rbf, bandwidth};
}

KernelSpec KernelSpec::parse(std::string_view text) {
    if (text == "linear") return linear();
    if (text == "cosine") return cosine();
    if (text.starts_with("rbf:")) {
        auto arg = text.substr(4);
        if (arg == "median") return rbf_median();
        double b = 0.0;
        auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), b);
        if (ec != std::errc{} || ptr != arg.data() + arg.size()) {
            throw InvalidArgument("kernel spec: bad rbf bandwidth '" + std::string(arg) + "'");
        }
        return rbf(b);
    }
    throw InvalidArgument("kernel spec: expected linear | cosine | rbf:<B> | rbf:median, got '" +
                          std::string(text) + "'");
}

std::string KernelSpec::to_string() const {
    switch (kind) {
        case KernelKind::linear: return "linear";
        case KernelKind::cosine: return "cosine";
        case KernelKind::rbf: {
            if (!bandwidth) return "rbf:median";
            char buf[64];
            std::snprintf(buf, sizeof buf, "rbf:%.17g", *bandwidth);
            return buf;
        }
    }
    return "?";
}

void FusionConfig::validate() const {
    if (!(C >= 0.0) || !std::isfinite(C)) throw InvalidArgument("FusionConfig: C must be finite and >= 0");
    if (l < 1) throw InvalidArgument("FusionConfig: l must be >= 1");
    if (r < 1) throw InvalidArgument("FusionConfig: r must be >= 1");
}

std::string FusionConfig::canonical() const {
    char buf[128];
    std::snprintf(buf, sizeof buf, "C=%.17g;l=%zu;r=%zu;seed=%llu;kernels=", C, l, r,
                  static_cast<unsigned long long>(seed));
    std::string out = buf;
    for (std::size_t i = 0; i < kernels.size(); ++i) {
        if (i) out += ',';
        out += kernels[i].to_string();
    }
    return out;
}

std::uint64_t FusionConfig::digest() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string_view to_string(FusionMethod m) noexcept {
    switch (m) {
        case FusionMethod::exact: return "exact";
        case FusionMethod::rp: return "rp";
        case FusionMethod::rff: return "rff";
        case FusionMethod::kpomrp: return "kpomrp";
    }
    return "?";
}

FusionMethod parse_fusion_method(std::string_view text) {
    if (text == "exact") return FusionMethod::exact;
    if (text == "rp") return FusionMethod::rp;
    if (text == "rff") return FusionMethod::rff;
    if (text == "kpomrp") return FusionMethod::kpomrp;
    throw InvalidArgument("unknown fusion method '" + std::string(text) + "'");
}

}  // namespace krossfuse
