#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <fstream>

#include "krossfuse/heatmap.hpp"
#include "krossfuse/matrix_io.hpp"
#include "oracle.hpp"

using namespace krossfuse;

namespace {

std::string kfmx_header(std::uint8_t version, std::uint8_t dtype, std::uint64_t rows, std::uint64_t cols) {
    std::string h = "KFMX";
    h.push_back(static_cast<char>(version));
    h.push_back(static_cast<char>(dtype));
    for (std::uint64_t v : {rows, cols})
        for (int i = 0; i < 8; ++i) h.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    return h;
}

template <typename T>
std::string raw(const std::vector<T>& values) {
    std::string out(values.size() * sizeof(T), '\0');
    std::memcpy(out.data(), values.data(), out.size());
    return out;
}

std::string npy(const std::string& dict, const std::string& payload, char major = 1) {
    std::string h = dict;
    while ((10 + h.size() + 1) % 64 != 0) h.push_back(' ');
    h.push_back('\n');
    std::string out = "\x93NUMPY";
    out.push_back(major);
    out.push_back(0);
    out.push_back(static_cast<char>(h.size() & 0xff));
    out.push_back(static_cast<char>(h.size() >> 8));
    return out + h + payload;
}

std::string field_of(const std::string& bytes) {
    try {
        decode_matrix(bytes);
    } catch (const FormatError& e) {
        return e.field();
    }
    return "<accepted>";
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("KFMX decoding from hand-built bytes") {
    const Matrix m = decode_matrix(kfmx_header(1, 1, 2, 3) + raw<double>({1, 2, 3, 4, 5, 6}));
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 3);
    CHECK(m(0, 2) == 3.0);
    CHECK(m(1, 0) == 4.0);

    const Matrix f = decode_matrix(kfmx_header(1, 0, 1, 2) + raw<float>({0.1f, -2.5f}));
    CHECK(f(0, 0) == static_cast<double>(0.1f));
    CHECK(f(0, 1) == -2.5);
}

TEST_CASE("round trips") {
    const Matrix m = oracle::gaussian(7, 5, 1, 1e3);
    CHECK(decode_matrix(encode_kfmx(m)) == m);
    CHECK(decode_matrix(encode_npy(m)) == m);
    CHECK((decode_matrix(encode_csv(m)) - m).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(encode_npy(m).find("'fortran_order': False") != std::string::npos);
    CHECK((encode_npy(m).size() - 7 * 5 * 8) % 64 == 0);

    const auto dir = oracle::scratch_dir("io");
    for (const char* name : {"m.kfmx", "m.npy", "m.csv", "m.bin"}) {
        write_matrix(m, dir / name);
        const Matrix back = read_matrix(dir / name).data();
        CHECK((back - m).cwiseAbs().maxCoeff() <= 1e-9);
    }
    write_matrix(m, dir / "again.kfmx");
    CHECK(slurp(dir / "m.kfmx") == slurp(dir / "again.kfmx"));

    const std::vector<int> labels = {0, 3, 1, 1, 2};
    write_labels(labels, dir / "y.csv");
    CHECK(read_labels(dir / "y.csv") == labels);
    std::filesystem::remove_all(dir);
}

TEST_CASE(".npy float32 is widened and the header is parsed") {
    const Matrix m = decode_matrix(
        npy("{'descr': '<f4', 'fortran_order': False, 'shape': (2, 2), }", raw<float>({1.5f, 2, 3, 4})));
    CHECK(m(0, 0) == 1.5);
    CHECK(m(1, 1) == 4.0);
}

TEST_CASE("malformed inputs raise errors naming the field") {
    CHECK(field_of("") == "file");
    CHECK(field_of(kfmx_header(2, 1, 1, 1) + raw<double>({1})) == "KFMX version");
    CHECK(field_of(kfmx_header(1, 7, 1, 1) + raw<double>({1})) == "KFMX dtype");
    CHECK(field_of(kfmx_header(1, 1, 2, 2) + raw<double>({1, 2, 3})) == "KFMX payload");
    CHECK(field_of(kfmx_header(1, 1, 0, 2)) == "KFMX rows");
    CHECK(field_of(kfmx_header(1, 1, 1ull << 62, 1ull << 62)) == "KFMX shape");
    CHECK(field_of("KFMX\x01") == "KFMX header");
    CHECK(field_of(std::string("\x00\x01\x02\x03", 4)) == "magic");

    CHECK(field_of(npy("{'descr': '<f8', 'fortran_order': True, 'shape': (1, 1), }", raw<double>({1}))) ==
          "npy fortran_order");
    try {
        decode_matrix(npy("{'descr': '<f8', 'fortran_order': True, 'shape': (1, 1), }", raw<double>({1})));
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("column-major unsupported") != std::string::npos);
    }
    CHECK(field_of(npy("{'descr': '<i8', 'fortran_order': False, 'shape': (1, 1), }", raw<double>({1}))) ==
          "npy descr");
    CHECK(field_of(npy("{'descr': '>f8', 'fortran_order': False, 'shape': (1, 1), }", raw<double>({1}))) ==
          "npy descr");
    CHECK(field_of(npy("{'descr': '<f8', 'fortran_order': False, 'shape': (4,), }", raw<double>({1, 2, 3, 4}))) ==
          "npy shape");
    CHECK(field_of(npy("{'descr': '<f8', 'fortran_order': False, 'shape': (1, 1, 1), }", raw<double>({1}))) ==
          "npy shape");
    CHECK(field_of(npy("{'descr': '<f8', 'fortran_order': False, 'shape': (2, 2), }", raw<double>({1}))) ==
          "npy payload");
    CHECK(field_of(npy("{'descr': '<f8', 'fortran_order': False, 'shape': (1, 1), }", raw<double>({1}), 2)) ==
          "npy version");
    CHECK(field_of(npy("{'fortran_order': False, 'shape': (1, 1), }", raw<double>({1}))) == "npy descr");

    CHECK(field_of("1,2,3\n4,5\n") == "csv line 2");
    CHECK(field_of("1,2\n3,x\n") == "csv line 2 column 2");
    CHECK(field_of("1,,2\n") == "csv line 1 column 2");
    CHECK(field_of("\n\n") == "csv");
    CHECK(field_of("1,2\r\n3,4\r\n\n") == "<accepted>");
}

TEST_CASE("read_matrix rejects non-finite values and labels must be integral") {
    const auto dir = oracle::scratch_dir("io_bad");
    {
        std::ofstream(dir / "nan.csv") << "1,nan\n";
        std::ofstream(dir / "frac.csv") << "0\n1.5\n";
        std::ofstream(dir / "neg.csv") << "0\n-1\n";
        std::ofstream(dir / "wide.csv") << "0,1\n1,0\n";
    }
    CHECK_THROWS_AS(read_matrix(dir / "nan.csv"), FormatError);
    CHECK_THROWS_AS(read_labels(dir / "frac.csv"), FormatError);
    CHECK_THROWS_AS(read_labels(dir / "neg.csv"), FormatError);
    CHECK_THROWS_AS(read_labels(dir / "wide.csv"), FormatError);
    CHECK_THROWS_AS(read_matrix(dir / "absent.kfmx"), FormatError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("heatmap PGM and CSV") {
    const std::string id = encode_pgm(Matrix::Identity(2, 2));
    const std::string header = "P5\n2 2\n255\n";
    REQUIRE(id.size() == header.size() + 4);
    CHECK(id.compare(0, header.size(), header) == 0);
    const auto* px = reinterpret_cast<const unsigned char*>(id.data() + header.size());
    CHECK(px[0] == 255);
    CHECK(px[1] == 0);
    CHECK(px[2] == 0);
    CHECK(px[3] == 255);

    const std::string flat = encode_pgm(Matrix::Constant(3, 3, 0.7));
    for (std::size_t i = flat.size() - 9; i < flat.size(); ++i) CHECK(flat[i] == 0);

    const auto dir = oracle::scratch_dir("heatmap");
    const Matrix k = oracle::gram(oracle::gaussian(6, 3, 2));
    heatmap_export(k, dir / "k.pgm");
    CHECK(std::filesystem::file_size(dir / "k.pgm") == header.size() + 36);
    CHECK((read_matrix(dir / "k.csv").data() - k).cwiseAbs().maxCoeff() <= 1e-9);
    std::filesystem::remove_all(dir);
}
