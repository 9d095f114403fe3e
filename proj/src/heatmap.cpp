#include "krossfuse/heatmap.hpp"

#include <cmath>
#include <fstream>

#include "krossfuse/matrix_io.hpp"

namespace krossfuse {

std::string encode_pgm(const Matrix& k) {
    if (k.size() == 0) throw InvalidArgument("heatmap: empty matrix");
    if (!k.allFinite()) throw InvalidArgument("heatmap: non-finite entries");
    const double lo = k.minCoeff();
    const double span = k.maxCoeff() - lo;
    std::string out = "P5\n" + std::to_string(k.cols()) + " " + std::to_string(k.rows()) + "\n255\n";
    out.reserve(out.size() + static_cast<std::size_t>(k.size()));
    for (Eigen::Index i = 0; i < k.rows(); ++i) {
        for (Eigen::Index j = 0; j < k.cols(); ++j) {
            const double v = span > 0.0 ? (k(i, j) - lo) / span : 0.0;
            out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
        }
    }
    return out;
}

void heatmap_export(const Matrix& k, const std::filesystem::path& pgm_path) {
    const std::string bytes = encode_pgm(k);
    std::ofstream out(pgm_path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + pgm_path.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("write to '" + pgm_path.string() + "' failed");
    std::filesystem::path csv = pgm_path;
    csv.replace_extension(".csv");
    write_matrix(k, csv, MatrixFormat::csv);
}

}  // namespace krossfuse
