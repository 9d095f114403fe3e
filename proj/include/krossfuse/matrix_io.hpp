#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "krossfuse/types.hpp"

// Matrix files.
//
// KFMX (native): "KFMX" | u8 version = 1 | u8 dtype (0 = f32, 1 = f64) |
//                u64 rows | u64 cols | row-major payload. Little-endian.
// .npy:          format version 1.0, C order, 2-D, '<f4' or '<f8'.
// CSV:           headerless, one row per line, comma-separated reals.
//
// read_matrix detects the format from the leading bytes. All malformed input
// raises FormatError naming the offending field.

namespace krossfuse {

enum class MatrixFormat { kfmx, npy, csv };

/// From the extension: .kfmx, .npy, .csv (anything else -> kfmx).
MatrixFormat format_from_path(const std::filesystem::path& path);
MatrixFormat parse_matrix_format(std::string_view text);

Matrix read_matrix_data(const std::filesystem::path& path);
EmbeddingMatrix read_matrix(const std::filesystem::path& path, Modality modality = Modality::shared);

/// Writes float64. CSV uses 17 significant digits.
void write_matrix(const Matrix& m, const std::filesystem::path& path, MatrixFormat format);
void write_matrix(const EmbeddingMatrix& e, const std::filesystem::path& path, MatrixFormat format);
inline void write_matrix(const Matrix& m, const std::filesystem::path& path) {
    write_matrix(m, path, format_from_path(path));
}

/// Integer labels from a single-column (or single-row) matrix file.
std::vector<int> read_labels(const std::filesystem::path& path);
void write_labels(std::span<const int> labels, const std::filesystem::path& path);

// In-memory codecs (used by the file functions and by tests).
std::string encode_kfmx(const Matrix& m);
std::string encode_npy(const Matrix& m);
std::string encode_csv(const Matrix& m);
Matrix decode_matrix(std::string_view bytes);

}  // namespace krossfuse
