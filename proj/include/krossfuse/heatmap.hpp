#pragma once

#include <filesystem>
#include <string>

#include "krossfuse/types.hpp"

// Grayscale rendering of a kernel matrix: binary PGM (P5, 8-bit) with
// min-max normalization. A constant matrix renders as all zeros.

namespace krossfuse {

std::string encode_pgm(const Matrix& k);

/// Writes `pgm_path` and a CSV of the raw values next to it (same stem, .csv).
void heatmap_export(const Matrix& k, const std::filesystem::path& pgm_path);

}  // namespace krossfuse
