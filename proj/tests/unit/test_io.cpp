#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <unistd.h>

#include <matern/error.hpp>
#include <matern/io.hpp>
#include <matern/shapes.hpp>

#include "helpers.hpp"

using namespace matern;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("matern_io_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name, const std::string& text = {}) const {
        const auto p = (path / name).string();
        if (!text.empty()) std::ofstream(p) << text;
        return p;
    }
};

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::Numeric;
}

std::string message_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("xyz clouds") {
    TempDir dir;
    const auto c = io::load_cloud(dir.file("a.xyz", "0 0 0 0 0 1\n1 0 0 0 2 0\n0 1 0 1 0 0\n"));
    CHECK(c.size() == 3);
    CHECK(c.normals(1, 1) == doctest::Approx(1.0));
    CHECK(message_of([&] { io::load_cloud(dir.file("b.xyz", "0 0 0\n")); }).find("normals required") != std::string::npos);
    CHECK(kind_of([&] { io::load_cloud(dir.file("c.xyz", "0 0 0 0 0 1\n1 nan 0 0 0 1\n")); }) == ErrorKind::Parse);
    CHECK(kind_of([&] { io::load_cloud(dir.file("d.xyz", "0 0 0 0 0 1\n0 0 x 0 0 1\n")); }) == ErrorKind::Parse);
    CHECK(message_of([&] { io::load_cloud(dir.file("d.xyz", "0 0 0 0 0 1\n0 0 x 0 0 1\n")); }).find(":2") != std::string::npos);
    CHECK(kind_of([&] { io::load_cloud((dir.path / "missing.xyz").string()); }) == ErrorKind::Io);
}

TEST_CASE("ply clouds") {
    TempDir dir;
    const std::string no_normals =
        "ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nproperty float y\nproperty float z\nend_header\n"
        "0 0 0\n1 1 1\n";
    CHECK(message_of([&] { io::load_cloud(dir.file("a.ply", no_normals)); }).find("normals required") != std::string::npos);
    const std::string ascii =
        "ply\nformat ascii 1.0\ncomment x\nelement vertex 2\nproperty double x\nproperty double y\nproperty double z\n"
        "property uchar red\nproperty float nx\nproperty float ny\nproperty float nz\nend_header\n"
        "0 0 0 255 0 0 2\n1 1 1 0 0 3 0\n";
    const auto c = io::load_cloud(dir.file("b.ply", ascii));
    CHECK(c.size() == 2);
    CHECK(c.normals(0, 2) == doctest::Approx(1.0));
    CHECK(c.normals(1, 1) == doctest::Approx(1.0));
    CHECK(kind_of([&] { io::load_cloud(dir.file("c.ply", "ply\nformat ascii 1.0\nelement vertex x\nend_header\n")); }) ==
          ErrorKind::Parse);

    const auto cloud = test::sphere_cloud(500, 0.3, 1);
    const auto path = dir.file("d.ply");
    io::save_cloud(cloud, path);
    const auto back = io::load_cloud(path);
    CHECK((back.points - cloud.points).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.normals - cloud.normals).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("obj clouds") {
    TempDir dir;
    const auto c = io::load_cloud(dir.file("a.obj", "v 0 0 0\nvn 0 0 1\nv 1 0 0\nvn 1 0 0\n"));
    CHECK(c.size() == 2);
    CHECK(kind_of([&] { io::load_cloud(dir.file("b.obj", "v 0 0 0\nv 1 0 0\nvn 1 0 0\n")); }) == ErrorKind::Parse);
}

TEST_CASE("mesh writers and readers") {
    TempDir dir;
    TriangleMesh tri;
    tri.vertices.resize(3, 3);
    tri.vertices << 0, 0, 0, 1, 0, 0, 0, 1, 0;
    tri.faces.resize(1, 3);
    tri.faces << 0, 1, 2;
    const auto obj = dir.file("tri.obj");
    io::save_mesh(tri, obj);
    std::ifstream in(obj);
    int v = 0, f = 0, vn = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("v ", 0) == 0) ++v;
        if (line.rfind("vn ", 0) == 0) ++vn;
        if (line.rfind("f ", 0) == 0) {
            ++f;
            CHECK(line == "f 1//1 2//2 3//3");
        }
    }
    CHECK(v == 3);
    CHECK(vn == 3);
    CHECK(f == 1);

    const auto mesh = shapes::torus_mesh(0.3, 0.1, 32, 16);
    for (const char* name : {"t.obj", "t.ply"}) {
        const auto p = dir.file(name);
        io::save_mesh(mesh, p);
        const auto back = io::load_mesh(p);
        REQUIRE(back.vertex_count() == mesh.vertex_count());
        CHECK((back.vertices - mesh.vertices).cwiseAbs().maxCoeff() <= 1e-6);
        CHECK((back.faces - mesh.faces).cwiseAbs().maxCoeff() == 0);
        CHECK(back.vertex_normals.rows() == mesh.vertex_count());
    }
    CHECK(kind_of([&] { io::save_mesh(TriangleMesh{}, dir.file("e.obj")); }) == ErrorKind::InvalidInput);
    CHECK(kind_of([&] { io::save_mesh(tri, dir.file("e.stl")); }) == ErrorKind::Parse);
    CHECK(kind_of([&] { io::save_mesh(tri, (dir.path / "no" / "such" / "dir.obj").string()); }) == ErrorKind::Io);
}

TEST_CASE("obj face handling") {
    TempDir dir;
    const auto quad = io::load_mesh(dir.file("q.obj", "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvt 0 0\nf 1/1 2/1 3/1 4/1\n"));
    CHECK(quad.face_count() == 2);
    const auto neg = io::load_mesh(dir.file("n.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3 -2 -1\n"));
    CHECK(neg.faces(0, 2) == 2);
    const auto bad = dir.file("b.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 4\n");
    CHECK(kind_of([&] { io::load_mesh(bad); }) == ErrorKind::Parse);
    CHECK(message_of([&] { io::load_mesh(bad); }).find(":4") != std::string::npos);
    CHECK(kind_of([&] { io::load_mesh(dir.file("u.obj", "v 0 0 0\nbogus 1\n")); }) == ErrorKind::Parse);
}
