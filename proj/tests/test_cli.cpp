#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "krossfuse/cli.hpp"
#include "krossfuse/matrix_io.hpp"
#include "oracle.hpp"

using namespace krossfuse;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli_main(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

double metric(const std::string& text, const std::string& name) {
    const auto pos = text.find(name + " ");
    REQUIRE(pos != std::string::npos);
    return std::stod(text.substr(pos + name.size() + 1));
}

struct Fixture {
    std::filesystem::path dir = oracle::scratch_dir("cli");
    std::string p(const std::string& name) const { return (dir / name).string(); }
    Fixture() {
        REQUIRE(run({"synth", "--out-a", p("a.kfmx"), "--out-b", p("b.kfmx"), "--labels", p("y.csv")}).code == 0);
    }
    ~Fixture() { std::filesystem::remove_all(dir); }
};

}  // namespace

TEST_CASE("usage errors exit with code 2") {
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"frobnicate"}).code == kExitUsage);
    CHECK(run({"fuse", "--bogus"}).code == kExitUsage);
    CHECK(run({"cluster", "--k", "x", "--gram", "g", "--labels", "l"}).code == kExitUsage);
    CHECK(run({"fuse", "--method", "magic", "--cross", "a", "--uni", "b", "--out", "c"}).code == kExitUsage);
    CHECK(run({"validate"}).code == kExitUsage);
    const Run help = run({"--help"});
    CHECK(help.code == kExitOk);
    CHECK(help.out.find("fuse") != std::string::npos);
}

TEST_CASE_FIXTURE(Fixture, "synth -> fuse rp -> cluster recovers the four cells") {
    const Run f = run({"fuse", "--method", "rp", "--cross", p("a.kfmx"), "--uni", p("b.kfmx"), "--kernel", "cosine",
                       "--C", "0", "--l", "1024", "--seed", "1", "--out", p("f.kfmx")});
    REQUIRE(f.code == 0);
    const Run c = run({"cluster", "--features", p("f.kfmx"), "--k", "4", "--labels", p("y.csv")});
    REQUIRE(c.code == 0);
    CHECK(metric(c.out, "ARI") >= 0.9);
    CHECK(metric(c.out, "NMI") >= 0.9);
    CHECK(metric(c.out, "AMI") >= 0.9);

    // The same pipeline through an explicit Gram file.
    REQUIRE(run({"kernel", "--in", p("f.kfmx"), "--kernel", "linear", "--out", p("g.npy")}).code == 0);
    const Run g = run({"cluster", "--gram", p("g.npy"), "--k", "4", "--labels", p("y.csv"), "--out", p("pred.csv")});
    REQUIRE(g.code == 0);
    CHECK(g.out == c.out);
    CHECK(read_labels(p("pred.csv")).size() == 200);
}

TEST_CASE_FIXTURE(Fixture, "every fusion method writes both modalities and a provenance sidecar") {
    for (const std::string method : {"exact", "rp", "rff", "kpomrp"}) {
        CAPTURE(method);
        const std::string kernel = method == "rff" ? "rbf:median" : "cosine";
        const Run r = run({"fuse", "--method", method, "--cross", p("a.kfmx"), "--uni", p("b.kfmx"), "--missing",
                           p("a.kfmx"), "--kernel", kernel, "--C", "1", "--l", "16", "--r", "32", "--seed", "4",
                           "--out", p(method + ".npy")});
        REQUIRE(r.code == 0);
        const Matrix x = read_matrix(p(method + ".npy")).data();
        const Matrix t = read_matrix(p(method + ".missing.npy")).data();
        CHECK(x.rows() == 200);
        CHECK(t.rows() == 200);
        const auto meta = nlohmann::json::parse(slurp(p(method + ".npy.json")));
        CHECK(meta["method"] == method);
        CHECK(meta["modality"] == "shared");
        CHECK(meta["seed"] == 4);
        CHECK(meta["cols"] == x.cols());
        CHECK(nlohmann::json::parse(slurp(p(method + ".missing.npy.json")))["modality"] == "nonshared");
    }
    CHECK(read_matrix(p("exact.npy")).cols() == 16 * 32);
    CHECK(read_matrix(p("rp.npy")).cols() == 16);
    CHECK(read_matrix(p("rff.npy")).cols() == 4 * 32);
    CHECK(read_matrix(p("kpomrp.npy")).cols() == 16 * 16);
}

TEST_CASE_FIXTURE(Fixture, "outputs are bit-identical across runs and thread counts") {
    for (const std::string method : {"exact", "rp", "rff"}) {
        const std::string kernel = method == "rff" ? "rbf:median" : "linear";
        std::vector<std::string> outputs;
        for (const char* threads : {"1", "4", "1"}) {
            const std::string out = p(method + "_" + std::to_string(outputs.size()) + ".kfmx");
            REQUIRE(run({"--threads", threads, "fuse", "--method", method, "--cross", p("a.kfmx"), "--uni",
                         p("b.kfmx"), "--kernel", kernel, "--l", "64", "--r", "64", "--seed", "9", "--out", out})
                        .code == 0);
            outputs.push_back(slurp(out));
        }
        CHECK(outputs[0] == outputs[1]);
        CHECK(outputs[0] == outputs[2]);
    }
    const Run c1 = run({"--threads", "1", "cluster", "--features", p("a.kfmx"), "--k", "4", "--labels", p("y.csv")});
    const Run c4 = run({"--threads", "4", "cluster", "--features", p("a.kfmx"), "--k", "4", "--labels", p("y.csv")});
    CHECK(c1.out == c4.out);
}

TEST_CASE_FIXTURE(Fixture, "exact fusion refuses outputs above the element cap") {
    write_matrix(Matrix::Ones(512, 768), p("big_a.kfmx"));
    write_matrix(Matrix::Ones(512, 768), p("big_b.kfmx"));
    const Run r = run({"fuse", "--method", "exact", "--cross", p("big_a.kfmx"), "--uni", p("big_b.kfmx"), "--kernel",
                       "linear", "--out", p("big.kfmx")});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("--method rp") != std::string::npos);
    CHECK_FALSE(std::filesystem::exists(p("big.kfmx")));

    const Run rbf = run({"fuse", "--method", "exact", "--cross", p("a.kfmx"), "--uni", p("b.kfmx"), "--kernel",
                         "rbf:median", "--out", p("x.kfmx")});
    CHECK(rbf.code == kExitUsage);
    CHECK(rbf.err.find("--method rff") != std::string::npos);
}

TEST_CASE_FIXTURE(Fixture, "malformed input files exit with code 2") {
    {
        std::ofstream(p("ragged.csv")) << "1,2\n3\n";
        std::ofstream(p("junk.kfmx"), std::ios::binary) << std::string("\x01\x02\x03\x04garbage", 11);
        std::ofstream(p("trunc.kfmx"), std::ios::binary) << slurp(p("a.kfmx")).substr(0, 40);
        std::ofstream(p("fortran.npy"), std::ios::binary)
            << std::string("\x93NUMPY\x01\x00", 8) << std::string("\x36\x00", 2)
            << "{'descr': '<f8', 'fortran_order': True, 'shape': (1, 1), }    \n" << std::string(8, '\0');
    }
    for (const char* bad : {"ragged.csv", "junk.kfmx", "trunc.kfmx", "fortran.npy", "absent.kfmx"}) {
        CAPTURE(bad);
        const Run r = run({"fuse", "--cross", p(bad), "--uni", p("b.kfmx"), "--out", p("o.kfmx")});
        CHECK(r.code == kExitUsage);
        CHECK(r.err.rfind("error: ", 0) == 0);
        CHECK(run({"kernel", "--in", p(bad), "--out", p("o.kfmx")}).code == kExitUsage);
        CHECK(run({"cluster", "--gram", p(bad), "--k", "2", "--labels", p("y.csv")}).code == kExitUsage);
    }
    CHECK(run({"cluster", "--features", p("a.kfmx"), "--k", "4", "--labels", p("ragged.csv")}).code == kExitUsage);
    CHECK(run({"fuse", "--cross", p("a.kfmx"), "--uni", p("fortran.npy"), "--out", p("o.kfmx")}).err.find(
              "column-major unsupported") != std::string::npos);
}

TEST_CASE_FIXTURE(Fixture, "kernel, probe and sweep commands") {
    const Run k = run({"kernel", "--in", p("a.kfmx"), "--kernel", "rbf:median", "--out", p("k.kfmx"), "--heatmap",
                       p("k.pgm")});
    REQUIRE(k.code == 0);
    CHECK(std::filesystem::exists(p("k.pgm")));
    CHECK(read_matrix(p("k.csv")).rows() == 200);

    REQUIRE(run({"fuse", "--method", "exact", "--cross", p("a.kfmx"), "--uni", p("b.kfmx"), "--kernel", "cosine",
                 "--out", p("e.kfmx")})
                .code == 0);
    const Run pr = run({"probe", "--train", p("e.kfmx"), "--train-labels", p("y.csv"), "--test", p("e.kfmx"),
                        "--test-labels", p("y.csv"), "--lambda", "0.01"});
    REQUIRE(pr.code == 0);
    CHECK(metric(pr.out, "accuracy") >= 0.95);

    const Run sw = run({"sweep", "l", "--n-per-cell", "10", "--l", "8", "32", "--seeds", "2"});
    REQUIRE(sw.code == 0);
    CHECK(sw.out.rfind("l,mean_rms_dev,ari_rp,ari_exact\n", 0) == 0);
    CHECK(std::count(sw.out.begin(), sw.out.end(), '\n') == 3);
    CHECK(run({"sweep", "C", "--n-per-cell", "10", "--C", "0.1", "10", "--out", p("c.csv")}).code == 0);
    CHECK(slurp(p("c.csv")).rfind("C,ari_exact,probe_accuracy\n", 0) == 0);
    CHECK(run({"sweep", "kernel", "--n-per-cell", "10"}).code == 0);
}

TEST_CASE("validate exit codes follow the criteria") {
    const Run ok = run({"validate", "prop2", "--instances", "30"});
    CHECK(ok.code == kExitOk);
    CHECK(ok.out.find("RESULT PASS") != std::string::npos);
    CHECK(run({"validate", "schur", "--trials", "2"}).code == kExitOk);
    CHECK(run({"validate", "product"}).code == kExitOk);

    // At l = 16 the RP Gram deviation is far above the concentration bound.
    const Run bad = run({"validate", "thm1", "--l", "16", "32", "--seeds", "5"});
    CHECK(bad.code == kExitCriterion);
    CHECK(bad.out.find("FAIL l=16") != std::string::npos);
}
