#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <matern/io.hpp>
#include <matern/shapes.hpp>

#include "commands.hpp"
#include "helpers.hpp"

using namespace matern;
namespace fs = std::filesystem;

namespace {

struct Workspace {
    fs::path dir;
    std::string cloud, gt;
    Workspace() {
        dir = fs::temp_directory_path() / ("matern_cli_" + std::to_string(::getpid()));
        fs::create_directories(dir);
        cloud = (dir / "sphere.ply").string();
        gt = (dir / "sphere_gt.obj").string();
        io::save_cloud(test::sphere_cloud(300, 0.3, 1), cloud);
        io::save_mesh(shapes::sphere_mesh(0.3, 48, 96), gt);
    }
    ~Workspace() { fs::remove_all(dir); }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

int run(std::vector<std::string> args, std::string& out, std::string& err) {
    args.insert(args.begin(), "matern_recon");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream o, e;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), o, e);
    out = o.str();
    err = e.str();
    return code;
}

std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

int count(const std::string& s, const std::string& needle) {
    int n = 0;
    for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
    return n;
}

}  // namespace

TEST_CASE("reconstruct and benchmark") {
    Workspace ws;
    std::string out, err;
    const auto mesh = ws.path("out.obj");
    REQUIRE(run({"reconstruct", ws.cloud, mesh, "--resolution", "32"}, out, err) == cli::kExitOk);
    CHECK(fs::exists(mesh));
    CHECK(out.find("assembly") != std::string::npos);
    CHECK(out.find("residual") != std::string::npos);
    CHECK(err.find("kernel=matern32") != std::string::npos);

    const auto csv = ws.path("m.csv");
    REQUIRE(run({"benchmark", ws.gt, ws.gt, "--samples", "5000", "--csv", csv}, out, err) == cli::kExitOk);
    CHECK(count(out, "chamfer_x1000") == 1);
    CHECK(count(slurp(csv), "chamfer_x1000") == 1);
    std::istringstream rows(out);
    std::string header, row;
    std::getline(rows, header);
    std::getline(rows, row);
    CHECK(row.rfind("0,0,1,", 0) == 0);

    CHECK(run({"benchmark", ws.path("none.obj"), ws.gt}, out, err) == cli::kExitUsage);
}

TEST_CASE("usage failures") {
    Workspace ws;
    std::string out, err;
    CHECK(run({"reconstruct", ws.path("missing.ply"), ws.path("o.obj")}, out, err) == cli::kExitUsage);
    CHECK(err.find("input not found") != std::string::npos);
    CHECK(run({"reconstruct", ws.cloud, ws.path("o.obj"), "--kernel", "matern72"}, out, err) == cli::kExitUsage);
    CHECK(run({"analyze", "bogus"}, out, err) == cli::kExitUsage);
    CHECK(run({}, out, err) == cli::kExitUsage);
}

TEST_CASE("taper engages the sparse solver") {
    Workspace ws;
    std::string out, err;
    REQUIRE(run({"reconstruct", ws.cloud, ws.path("t.obj"), "--kernel", "matern12", "--taper-h", "0.2", "--h", "0.2",
                 "--resolution", "32"},
                out, err) == cli::kExitOk);
    CHECK(out.find("solver: sparse") != std::string::npos);
}

TEST_CASE("identical runs give identical bytes across thread counts") {
    Workspace ws;
    std::string out, err;
    std::vector<std::string> blobs;
    for (const char* threads : {"1", "4", "1", "4"}) {
        const auto p = ws.path(std::string("d") + std::to_string(blobs.size()) + ".ply");
        REQUIRE(run({"--threads", threads, "reconstruct", ws.cloud, p, "--resolution", "40"}, out, err) == 0);
        blobs.push_back(slurp(p));
    }
    for (const auto& b : blobs) CHECK(b == blobs[0]);
}

TEST_CASE("sweep and analyze") {
    Workspace ws;
    std::string out, err;
    REQUIRE(run({"sweep", ws.cloud, ws.gt, "--h-list", "0.5,1", "--lambdas", "0,1e-10", "--resolution", "32",
                 "--samples", "3000"},
                out, err) == 0);
    CHECK(count(out, "\n") == 5);
    REQUIRE(run({"sweep", ws.cloud, ws.gt, "--h-list", "1", "--resolution", "32", "--samples", "3000"}, out, err) == 0);
    CHECK(count(out, "\n") == 2);

    REQUIRE(run({"analyze", "spectrum", "--kernel", "matern32", "--h", "1"}, out, err) == 0);
    std::istringstream s(out);
    std::string line;
    std::getline(s, line);
    double prev = 1e300;
    while (std::getline(s, line)) {
        const double v = std::stod(line.substr(line.find(',') + 1));
        CHECK(v < prev);
        prev = v;
    }
    REQUIRE(run({"analyze", "edr", "--kernel", "matern12", "--d", "1", "--n", "300"}, out, err) == 0);
    CHECK(out.find("slope") != std::string::npos);
    REQUIRE(run({"analyze", "rff", "--kernel", "matern12", "--pairs", "3", "--features", "1000"}, out, err) == 0);
    CHECK(count(out, "\n") == 4);
    REQUIRE(run({"analyze", "bound", "--nu", "0.5"}, out, err) == 0);
    CHECK(out.find("h_star_closed") != std::string::npos);
}
