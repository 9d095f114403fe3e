#include "krossfuse/matrix_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace krossfuse {
namespace {

constexpr char kKfmxMagic[4] = {'K', 'F', 'M', 'X'};
constexpr char kNpyMagic[6] = {'\x93', 'N', 'U', 'M', 'P', 'Y'};
constexpr std::size_t kKfmxHeaderSize = 4 + 1 + 1 + 8 + 8;

std::uint64_t read_u64_le(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

void append_u64_le(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

double read_f64_le(const unsigned char* p) {
    const std::uint64_t bits = read_u64_le(p);
    double d;
    std::memcpy(&d, &bits, sizeof d);
    return d;
}

float read_f32_le(const unsigned char* p) {
    std::uint32_t bits = 0;
    for (int i = 3; i >= 0; --i) bits = (bits << 8) | p[i];
    float f;
    std::memcpy(&f, &bits, sizeof f);
    return f;
}

void append_f64_le(std::string& out, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof bits);
    append_u64_le(out, bits);
}

std::size_t checked_count(std::uint64_t rows, std::uint64_t cols, const char* where) {
    if (rows == 0) throw FormatError(std::string(where) + " rows", "must be >= 1");
    if (cols == 0) throw FormatError(std::string(where) + " cols", "must be >= 1");
    if (rows > std::numeric_limits<std::size_t>::max() / 8 / cols) {
        throw FormatError(std::string(where) + " shape", "rows*cols overflows");
    }
    return static_cast<std::size_t>(rows * cols);
}

Matrix decode_payload(const unsigned char* p, std::size_t available, std::uint64_t rows, std::uint64_t cols,
                      int width, const char* where) {
    const std::size_t count = checked_count(rows, cols, where);
    const std::size_t need = count * static_cast<std::size_t>(width);
    if (available != need) {
        throw FormatError(std::string(where) + " payload", "expected " + std::to_string(need) + " bytes for " +
                                                               std::to_string(rows) + "x" + std::to_string(cols) +
                                                               ", found " + std::to_string(available));
    }
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    double* out = m.data();
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = width == 8 ? read_f64_le(p + 8 * i) : static_cast<double>(read_f32_le(p + 4 * i));
    }
    return m;
}

Matrix decode_kfmx(std::string_view bytes) {
    if (bytes.size() < kKfmxHeaderSize) throw FormatError("KFMX header", "truncated");
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    if (std::memcmp(p, kKfmxMagic, 4) != 0) throw FormatError("KFMX magic", "bad magic");
    if (p[4] != 1) throw FormatError("KFMX version", "unsupported version " + std::to_string(p[4]));
    const int dtype = p[5];
    if (dtype != 0 && dtype != 1) throw FormatError("KFMX dtype", "unsupported dtype code " + std::to_string(dtype));
    const std::uint64_t rows = read_u64_le(p + 6);
    const std::uint64_t cols = read_u64_le(p + 14);
    return decode_payload(p + kKfmxHeaderSize, bytes.size() - kKfmxHeaderSize, rows, cols, dtype == 1 ? 8 : 4, "KFMX");
}

// Value of `key` in a Python dict literal such as
// {'descr': '<f8', 'fortran_order': False, 'shape': (2, 3), }
std::string npy_field(std::string_view header, std::string_view key) {
    const std::string quoted = "'" + std::string(key) + "'";
    auto pos = header.find(quoted);
    if (pos == std::string_view::npos) throw FormatError("npy " + std::string(key), "missing from header");
    pos = header.find(':', pos + quoted.size());
    if (pos == std::string_view::npos) throw FormatError("npy " + std::string(key), "malformed header");
    ++pos;
    while (pos < header.size() && header[pos] == ' ') ++pos;
    if (pos >= header.size()) throw FormatError("npy " + std::string(key), "malformed header");
    std::size_t end;
    if (header[pos] == '\'') {
        end = header.find('\'', pos + 1);
        if (end == std::string_view::npos) throw FormatError("npy " + std::string(key), "unterminated string");
        return std::string(header.substr(pos + 1, end - pos - 1));
    }
    if (header[pos] == '(') {
        end = header.find(')', pos);
        if (end == std::string_view::npos) throw FormatError("npy " + std::string(key), "unterminated tuple");
        return std::string(header.substr(pos, end - pos + 1));
    }
    end = header.find_first_of(",}", pos);
    if (end == std::string_view::npos) throw FormatError("npy " + std::string(key), "malformed header");
    return std::string(header.substr(pos, end - pos));
}

std::vector<std::uint64_t> parse_shape(const std::string& tuple) {
    std::vector<std::uint64_t> dims;
    std::size_t i = 1;  // skip '('
    while (i < tuple.size()) {
        while (i < tuple.size() && (tuple[i] == ' ' || tuple[i] == ',')) ++i;
        if (i >= tuple.size() || tuple[i] == ')') break;
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(tuple.data() + i, tuple.data() + tuple.size(), v);
        if (ec != std::errc{}) throw FormatError("npy shape", "bad dimension in " + tuple);
        i = static_cast<std::size_t>(ptr - tuple.data());
        dims.push_back(v);
        while (i < tuple.size() && tuple[i] == 'L') ++i;
    }
    return dims;
}

Matrix decode_npy(std::string_view bytes) {
    if (bytes.size() < 10) throw FormatError("npy header", "truncated");
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    if (p[6] != 1 || p[7] != 0) {
        throw FormatError("npy version", "only format version 1.0 is supported (got " + std::to_string(p[6]) + "." +
                                             std::to_string(p[7]) + ")");
    }
    const std::size_t header_len = p[8] | (static_cast<std::size_t>(p[9]) << 8);
    if (bytes.size() < 10 + header_len) throw FormatError("npy header", "truncated");
    const std::string_view header = bytes.substr(10, header_len);

    const std::string descr = npy_field(header, "descr");
    int width;
    if (descr == "<f8") {
        width = 8;
    } else if (descr == "<f4") {
        width = 4;
    } else {
        throw FormatError("npy descr", "unsupported dtype '" + descr + "' (need little-endian float32/float64)");
    }
    const std::string order = npy_field(header, "fortran_order");
    if (order == "True") throw FormatError("npy fortran_order", "column-major unsupported");
    if (order != "False") throw FormatError("npy fortran_order", "unrecognized value '" + order + "'");
    const auto shape = parse_shape(npy_field(header, "shape"));
    if (shape.size() != 2) {
        throw FormatError("npy shape", "only 2-D arrays are supported (got " + std::to_string(shape.size()) + "-D)");
    }
    return decode_payload(p + 10 + header_len, bytes.size() - 10 - header_len, shape[0], shape[1], width, "npy");
}

Matrix decode_csv(std::string_view bytes) {
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= bytes.size()) {
        std::size_t end = bytes.find('\n', start);
        if (end == std::string_view::npos) end = bytes.size();
        std::string_view line = bytes.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t") == std::string_view::npos) {
            if (end == bytes.size()) break;
            continue;
        }
        std::vector<double> row;
        std::size_t col = 0;
        std::size_t pos = 0;
        while (true) {
            std::size_t comma = line.find(',', pos);
            std::string_view cell = line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
            while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
            while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) cell.remove_suffix(1);
            ++col;
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size()) {
                throw FormatError("csv line " + std::to_string(line_no) + " column " + std::to_string(col),
                                  "not a real number: '" + std::string(cell) + "'");
            }
            row.push_back(v);
            if (comma == std::string_view::npos) break;
            pos = comma + 1;
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw FormatError("csv line " + std::to_string(line_no),
                              "ragged row: expected " + std::to_string(rows.front().size()) + " columns, got " +
                                  std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
        if (end == bytes.size()) break;
    }
    if (rows.empty()) throw FormatError("csv", "no data rows");
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("file", "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("write to '" + path.string() + "' failed");
}

}  // namespace

MatrixFormat format_from_path(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".npy") return MatrixFormat::npy;
    if (ext == ".csv") return MatrixFormat::csv;
    return MatrixFormat::kfmx;
}

MatrixFormat parse_matrix_format(std::string_view text) {
    if (text == "kfmx") return MatrixFormat::kfmx;
    if (text == "npy") return MatrixFormat::npy;
    if (text == "csv") return MatrixFormat::csv;
    throw InvalidArgument("unknown matrix format '" + std::string(text) + "' (kfmx | npy | csv)");
}

std::string encode_kfmx(const Matrix& m) {
    std::string out(kKfmxMagic, 4);
    out.push_back(1);
    out.push_back(1);
    append_u64_le(out, static_cast<std::uint64_t>(m.rows()));
    append_u64_le(out, static_cast<std::uint64_t>(m.cols()));
    out.reserve(out.size() + static_cast<std::size_t>(m.size()) * 8);
    for (Eigen::Index i = 0; i < m.size(); ++i) append_f64_le(out, m.data()[i]);
    return out;
}

std::string encode_npy(const Matrix& m) {
    std::string dict = "{'descr': '<f8', 'fortran_order': False, 'shape': (" + std::to_string(m.rows()) + ", " +
                       std::to_string(m.cols()) + "), }";
    // Pad so that magic + version + length + header is a multiple of 64.
    const std::size_t unpadded = 10 + dict.size() + 1;
    dict.append((64 - unpadded % 64) % 64, ' ');
    dict.push_back('\n');
    std::string out(kNpyMagic, 6);
    out.push_back(1);
    out.push_back(0);
    out.push_back(static_cast<char>(dict.size() & 0xff));
    out.push_back(static_cast<char>((dict.size() >> 8) & 0xff));
    out += dict;
    for (Eigen::Index i = 0; i < m.size(); ++i) append_f64_le(out, m.data()[i]);
    return out;
}

std::string encode_csv(const Matrix& m) {
    std::string out;
    char buf[40];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
            if (j) out.push_back(',');
            out += buf;
        }
        out.push_back('\n');
    }
    return out;
}

Matrix decode_matrix(std::string_view bytes) {
    if (bytes.empty()) throw FormatError("file", "empty");
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), kKfmxMagic, 4) == 0) return decode_kfmx(bytes);
    if (bytes.size() >= 6 && std::memcmp(bytes.data(), kNpyMagic, 6) == 0) return decode_npy(bytes);
    if (static_cast<unsigned char>(bytes.front()) < 0x09 || static_cast<unsigned char>(bytes.front()) >= 0x80) {
        throw FormatError("magic", "unrecognized binary format (expected KFMX or .npy)");
    }
    return decode_csv(bytes);
}

Matrix read_matrix_data(const std::filesystem::path& path) { return decode_matrix(read_file(path)); }

EmbeddingMatrix read_matrix(const std::filesystem::path& path, Modality modality) {
    Matrix m = read_matrix_data(path);
    if (!m.allFinite()) throw FormatError("payload", "non-finite entry in '" + path.string() + "'");
    return EmbeddingMatrix(std::move(m), modality, path.stem().string());
}

void write_matrix(const Matrix& m, const std::filesystem::path& path, MatrixFormat format) {
    switch (format) {
        case MatrixFormat::kfmx: write_file(path, encode_kfmx(m)); return;
        case MatrixFormat::npy: write_file(path, encode_npy(m)); return;
        case MatrixFormat::csv: write_file(path, encode_csv(m)); return;
    }
}

void write_matrix(const EmbeddingMatrix& e, const std::filesystem::path& path, MatrixFormat format) {
    write_matrix(e.data(), path, format);
}

std::vector<int> read_labels(const std::filesystem::path& path) {
    const Matrix m = read_matrix_data(path);
    if (m.rows() != 1 && m.cols() != 1) throw FormatError("labels shape", "expected a single row or column");
    std::vector<int> out(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        const double v = m.data()[i];
        if (!(v >= 0.0) || v != std::floor(v) || v > std::numeric_limits<int>::max()) {
            throw FormatError("labels entry " + std::to_string(i), "not a non-negative integer");
        }
        out[static_cast<std::size_t>(i)] = static_cast<int>(v);
    }
    return out;
}

void write_labels(std::span<const int> labels, const std::filesystem::path& path) {
    std::string out;
    for (int v : labels) out += std::to_string(v) + '\n';
    write_file(path, out);
}

}  // namespace krossfuse
