#include <doctest.h>

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fdl/cli.hpp"
#include "fdl/io.hpp"

using namespace fdl;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "fdl");
    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("fdl_cli_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("usage errors exit with 1") {
    CHECK(run({}).code == 1);
    CHECK(run({"frobnicate"}).code == 1);
    CHECK(run({"gen", "-o", "x"}).code == 1);
    CHECK(run({"gen", "--fixture", "nope", "-o", "x"}).code == 1);
    CHECK(run({"optimize", "-o", "x"}).code == 1);
    const Run help = run({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("optimize") != std::string::npos);
}

TEST_CASE("gen is byte-for-byte reproducible") {
    TempDir dir;
    for (const char* sub : {"a", "b"})
        REQUIRE(run({"gen", "--fixture", "multi_plane", "--dataset", "PR", "--count", "2", "--seed", "9", "-o",
                     dir / sub})
                    .code == 0);
    for (const char* f : {"left_0000.pgm", "right_0001.pgm", "disparity_0001.pfm", "metadata.csv"})
        CHECK(read_file(dir / (std::string("a/") + f)) == read_file(dir / (std::string("b/") + f)));
    const CsvTable meta = read_csv(dir / "a/metadata.csv");
    CHECK(meta.rows.size() == 2);
    CHECK(meta.rows[0][meta.column("pitch")] != "0");
}

TEST_CASE("pipeline subcommands") {
    TempDir dir;
    REQUIRE(run({"gen", "--fixture", "textured_shift", "--count", "1", "-o", dir.path.string()}).code == 0);
    const std::string left = dir / "left_0000.pgm";
    const std::string truth = dir / "disparity_0000.pfm";
    // the right view's ground truth equals the left one for a fronto-parallel shift
    const std::vector<std::string> inputs{left, dir / "right_0000.pgm", truth, truth};
    // integer disparities sit on bilinear cell boundaries, so grad-check uses an optimised pair
    REQUIRE(run({"optimize", "--fixture", "textured_shift", "--steps", "5", "-o", dir / "opt"}).code == 0);

    SUBCASE("mask") {
        const Run r = run({"mask", left, "-o", dir / "mask.pgm"});
        CHECK(r.code == 0);
        CHECK(r.out.find("texturedness") != std::string::npos);
        CHECK(fs::exists(dir / "mask.pgm"));
    }
    SUBCASE("fill") {
        CHECK(run({"fill", truth, left, "-o", dir / "filled.pfm"}).code == 0);
        CHECK(read_disparity(dir / "filled.pfm")(10, 10) == doctest::Approx(4.0));
    }
    SUBCASE("loss with zero weights") {
        std::vector<std::string> args{"loss"};
        args.insert(args.end(), inputs.begin(), inputs.end());
        for (const char* w : {"--alpha-ap", "--alpha-ds", "--alpha-lr", "--alpha-fd"}) {
            args.emplace_back(w);
            args.emplace_back("0");
        }
        args.insert(args.end(), {"-o", dir / "loss.csv"});
        const Run r = run(args);
        CHECK(r.code == 0);
        CHECK(r.out == "total 0\n");
        CHECK(read_csv(dir / "loss.csv").rows.size() == 5);
    }
    SUBCASE("grad-check") {
        const std::vector<std::string> args{"grad-check", left, dir / "right_0000.pgm", dir / "opt/disp_left.pfm",
                                            dir / "opt/disp_right.pfm", "--samples", "20", "-o", dir / "gc.csv"};
        const Run r = run(args);
        INFO(r.out << r.err);
        CHECK(r.code == 0);
        const CsvTable t = read_csv(dir / "gc.csv");
        CHECK(t.rows.size() > 0);
        CHECK(t.header[5] == "rel_error");
    }
    SUBCASE("metrics of the ground truth against itself") {
        const Run r = run({"metrics", truth, truth, "-o", dir / "m.csv"});
        CHECK(r.code == 0);
        const CsvTable t = read_csv(dir / "m.csv");
        CHECK(t.rows[0][t.column("abs_rel")] == "0");
        CHECK(t.rows[0][t.column("delta_1")] == "1");
    }
    SUBCASE("bin") {
        write_file_atomic(dir / "manifest.csv",
                          "prediction,ground_truth,left,texturedness\ndisparity_0000.pfm,disparity_0000.pfm,"
                          "left_0000.pgm,0.9\n");
        const Run r = run({"bin", "--covariate", "texturedness", "--edges", "0,0.5,1", "--region", "active",
                           dir / "manifest.csv", "-o", dir / "bins.csv"});
        INFO(r.err);
        CHECK(r.code == 0);
        const CsvTable t = read_csv(dir / "bins.csv");
        REQUIRE(t.rows.size() == 2);
        CHECK(t.rows[1][t.column("samples")] == "1");
        CHECK(run({"bin", "--covariate", "roll", "--edges", "0,1", dir / "manifest.csv", "-o", dir / "x.csv"}).code ==
              2);
        CHECK(run({"bin", "--covariate", "texturedness", "--edges", "0,x", dir / "manifest.csv", "-o",
                   dir / "x.csv"})
                  .code == 1);
    }
    SUBCASE("optimize") {
        const Run r = run({"optimize", "--fixture", "textured_shift", "--steps", "3", "-o", dir / "run"});
        INFO(r.err);
        CHECK(r.code == 0);
        CHECK(r.out.find("active abs_rel") != std::string::npos);
        CHECK(read_csv(dir / "run/trace.csv").rows.size() == 3);
        CHECK(fs::exists(dir / "run/disp_left.pfm"));
        CHECK(fs::exists(dir / "run/metrics.csv"));
        const Run pair = run({"optimize", "--left", left, "--right", dir / "right_0000.pgm", "--steps", "2", "-o",
                              dir / "run2"});
        CHECK(pair.code == 0);
        CHECK(!fs::exists(dir / "run2/metrics.csv"));
    }
    SUBCASE("runtime failures exit with 2") {
        const Run r = run({"metrics", left, truth, "-o", dir / "m.csv"});
        CHECK(r.code == 2);
        CHECK(r.err.rfind("error: ", 0) == 0);
    }
}
