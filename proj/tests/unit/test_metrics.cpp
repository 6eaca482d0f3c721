#include <doctest.h>

#include <cmath>
#include <random>

#include <matern/error.hpp>
#include <matern/kdtree.hpp>
#include <matern/metrics.hpp>
#include <matern/shapes.hpp>

#include "helpers.hpp"

using namespace matern;

namespace {

SampledSurface points_only(const PointMatrix& p) {
    SampledSurface s;
    s.points = p;
    s.normals = PointMatrix::Zero(p.rows(), 3);
    s.normals.col(2).setOnes();
    return s;
}

SampledSurface transformed(const SampledSurface& s, const Eigen::Matrix3d& r, const Vec3& t, double scale = 1.0) {
    SampledSurface out = s;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        out.points.row(i) = (scale * (r * row3(s.points, i)) + t).transpose();
        out.normals.row(i) = (r * row3(s.normals, i)).transpose();
    }
    return out;
}

TriangleMesh two_triangles() {
    TriangleMesh m;
    m.vertices.resize(6, 3);
    m.vertices << 0, 0, 0, 3, 0, 0, 0, 2, 0, 5, 0, 0, 6, 0, 0, 5, 2, 0;
    m.faces.resize(2, 3);
    m.faces << 0, 1, 2, 3, 4, 5;
    return m;
}

}  // namespace

TEST_CASE("kd tree matches brute force") {
    const auto pts = test::random_points(500, 3, 1);
    const auto queries = test::random_points(500, 3, 2, -0.2, 1.2);
    KdTree3 tree(pts);
    for (int q = 0; q < queries.rows(); ++q) {
        const Vec3 x = row3(queries, q);
        double best = std::numeric_limits<double>::infinity();
        std::int64_t idx = -1;
        for (int i = 0; i < pts.rows(); ++i) {
            const double d = (row3(pts, i) - x).norm();
            if (d < best) {
                best = d;
                idx = i;
            }
        }
        const auto hit = tree.nearest(x);
        CHECK(hit.index == idx);
        CHECK(hit.distance == doctest::Approx(best).epsilon(1e-15));

        std::vector<std::int64_t> brute;
        for (int i = 0; i < pts.rows(); ++i)
            if ((row3(pts, i) - x).norm() <= 0.15) brute.push_back(i);
        CHECK(tree.within(x, 0.15) == brute);
    }
    const auto self = tree.nearest_excluding(row3(pts, 7), 7);
    CHECK(self.index != 7);
}

TEST_CASE("sample_mesh") {
    TriangleMesh tri;
    tri.vertices.resize(3, 3);
    tri.vertices << 0, 0, 0, std::sqrt(2.0), 0, 0, 0, std::sqrt(2.0), 0;
    tri.faces.resize(1, 3);
    tri.faces << 0, 1, 2;
    const auto s = sample_mesh(tri, 1000, 3);
    REQUIRE(s.size() == 1000);
    for (int i = 0; i < 1000; ++i) {
        CHECK(s.points(i, 0) >= 0.0);
        CHECK(s.points(i, 1) >= 0.0);
        CHECK(s.points(i, 0) + s.points(i, 1) <= std::sqrt(2.0) + 1e-12);
        CHECK(s.points(i, 2) == 0.0);
        CHECK(s.normals(i, 2) == 1.0);
    }
    const auto again = sample_mesh(tri, 1000, 3);
    CHECK((again.points - s.points).cwiseAbs().maxCoeff() == 0.0);

    const auto two = sample_mesh(two_triangles(), 100000, 4);
    int left = 0;
    for (int i = 0; i < two.size(); ++i) left += two.points(i, 0) < 4.0 ? 1 : 0;
    const double ratio = double(left) / double(two.size() - left);
    CHECK(ratio == doctest::Approx(3.0).epsilon(0.02));

    TriangleMesh flat = tri;
    flat.vertices.row(2) = flat.vertices.row(1);
    CHECK_THROWS_AS(sample_mesh(flat, 10, 1), Error);
}

TEST_CASE("distance metrics") {
    PointMatrix a(1, 3), b(1, 3);
    a << 0, 0, 0;
    b << 1, 0, 0;
    CHECK(chamfer(points_only(a), points_only(b)) == doctest::Approx(1.0));
    CHECK(chamfer(points_only(a), points_only(a)) == 0.0);

    PointMatrix a2(2, 3);
    a2 << 0, 0, 0, 2, 0, 0;
    CHECK(hausdorff(points_only(a2), points_only(a)) == doctest::Approx(2.0));
    CHECK(hausdorff(points_only(a2), points_only(a2)) == 0.0);

    const auto s1 = shapes::sphere_samples(2000, 0.3, 1);
    const auto s2 = shapes::sphere_samples(1500, 0.32, 2);
    CHECK(chamfer(s1, s2) == chamfer(s2, s1));
    CHECK(hausdorff(s1, s2) >= chamfer(s1, s2));

    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    const Eigen::Matrix3d r = Eigen::Quaterniond(g(rng), g(rng), g(rng), g(rng)).normalized().toRotationMatrix();
    const Vec3 t(0.4, -1.3, 2.2);
    const auto r1 = transformed(s1, r, t), r2 = transformed(s2, r, t);
    CHECK(test::rel_err(chamfer(r1, r2), chamfer(s1, s2)) <= 1e-9);
    CHECK(test::rel_err(hausdorff(r1, r2), hausdorff(s1, s2)) <= 1e-9);
    CHECK(test::rel_err(normal_consistency(r1, r2), normal_consistency(s1, s2)) <= 1e-9);
    CHECK(f_score(r1, r2, 0.03) == f_score(s1, s2, 0.03));
    const auto k1 = transformed(s1, Eigen::Matrix3d::Identity(), Vec3::Zero(), 3.0);
    const auto k2 = transformed(s2, Eigen::Matrix3d::Identity(), Vec3::Zero(), 3.0);
    CHECK(test::rel_err(chamfer(k1, k2), 3.0 * chamfer(s1, s2)) <= 1e-9);
    CHECK(test::rel_err(hausdorff(k1, k2), 3.0 * hausdorff(s1, s2)) <= 1e-9);

    double prev = 0.0;
    for (double th : {0.001, 0.005, 0.01, 0.02, 0.05}) {
        const double f = f_score(s1, s2, th);
        CHECK(f >= prev);
        prev = f;
    }
}

TEST_CASE("f-score and normal consistency") {
    const auto s = shapes::sphere_samples(400, 0.3, 9);
    CHECK(f_score(s, s, 0.01) == 1.0);
    auto far = s;
    far.points.col(0).array() += 10.0;
    CHECK(f_score(s, far, 0.01) == 0.0);

    SampledSurface half;
    half.points = s.points.topRows(200);
    half.normals = s.normals.topRows(200);
    CHECK(f_score(half, s, 1e-9) == doctest::Approx(2.0 / 3.0));

    CHECK(normal_consistency(s, s) == doctest::Approx(1.0));
    auto flipped = s;
    flipped.normals *= -1.0;
    CHECK(normal_consistency(s, flipped) == doctest::Approx(1.0));
    auto rotated = s;
    for (int i = 0; i < s.size(); ++i) {
        const Vec3 n = row3(s.normals, i);
        rotated.normals.row(i) = n.cross(n.unitOrthogonal()).normalized().transpose();
    }
    CHECK(normal_consistency(s, rotated) == doctest::Approx(0.0).epsilon(1e-12));

    const auto rep = compare(s, s);
    CHECK(rep.chamfer_x1000 == 0.0);
    CHECK(rep.f_score == 1.0);
    CHECK(MetricsReport::csv_header().find("chamfer_x1000") != std::string::npos);
}

TEST_CASE("benchmark of identical meshes") {
    const auto m = shapes::sphere_mesh(0.3, 24, 48);
    const auto rep = benchmark_meshes(m, m, 20000, 1);
    CHECK(rep.chamfer_x1000 == 0.0);
    CHECK(rep.hausdorff == 0.0);
    CHECK(rep.f_score == 1.0);
    CHECK(rep.normal_consistency == doctest::Approx(1.0));
    CHECK(rep.sample_count == 20000);
}

TEST_CASE("exact point to mesh distance") {
    const auto mesh = shapes::torus_mesh(0.3, 0.1, 24, 12);
    const auto pts = test::random_points(300, 3, 12, -0.5, 0.5);
    const auto d = point_mesh_distances(pts, mesh);
    for (int i = 0; i < pts.rows(); ++i) {
        const Vec3 p = row3(pts, i);
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index f = 0; f < mesh.face_count(); ++f) {
            const Vec3 c = closest_point_on_triangle(p, row3(mesh.vertices, mesh.faces(f, 0)),
                                                     row3(mesh.vertices, mesh.faces(f, 1)),
                                                     row3(mesh.vertices, mesh.faces(f, 2)));
            best = std::min(best, (c - p).norm());
        }
        CHECK(d(i) == doctest::Approx(best).epsilon(1e-14));
    }
    const Vec3 a(0, 0, 0), b(1, 0, 0), c(0, 1, 0);
    CHECK((closest_point_on_triangle(Vec3(0.2, 0.2, 5), a, b, c) - Vec3(0.2, 0.2, 0)).norm() <= 1e-15);
    CHECK((closest_point_on_triangle(Vec3(-1, -1, 0), a, b, c) - a).norm() <= 1e-15);
    CHECK((closest_point_on_triangle(Vec3(1, 1, 0), a, b, c) - Vec3(0.5, 0.5, 0)).norm() <= 1e-15);
    CHECK((closest_point_on_triangle(Vec3(0.5, -2, 1), a, b, c) - Vec3(0.5, 0, 0)).norm() <= 1e-15);
}
