#include <doctest.h>

#include <cmath>
#include <limits>

#include <matern/analysis.hpp>
#include <matern/error.hpp>
#include <matern/field.hpp>
#include <matern/krr.hpp>

#include "helpers.hpp"

using namespace matern;

namespace {

OrientedPointCloud single_point() {
    PointMatrix p(1, 3), n(1, 3);
    p << 0, 0, 0;
    n << 0, 0, 1;
    return OrientedPointCloud::make(p, n);
}

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::Io;
}

}  // namespace

TEST_CASE("cloud ingestion") {
    PointMatrix p(2, 3), n(2, 3);
    p << 0, 0, 0, 1, 1, 1;
    n << 0, 0, 2, 3, 0, 4;
    const auto c = OrientedPointCloud::make(p, n);
    CHECK(c.normals.row(0).norm() == doctest::Approx(1.0));
    CHECK(c.normals(1, 0) == doctest::Approx(0.6));
    p(1, 2) = std::numeric_limits<double>::quiet_NaN();
    CHECK(kind_of([&] { OrientedPointCloud::make(p, n); }) == ErrorKind::InvalidInput);
    p(1, 2) = 1;
    n.row(1).setZero();
    CHECK(kind_of([&] { OrientedPointCloud::make(p, n); }) == ErrorKind::InvalidInput);
}

TEST_CASE("build_system layout") {
    const auto sys = build_system(single_point(), 0.005, 0.0);
    REQUIRE(sys.size() == 2);
    CHECK(sys.centers(0, 2) == doctest::Approx(0.005));
    CHECK(sys.centers(1, 2) == doctest::Approx(-0.005));
    CHECK(sys.centers(0, 0) == 0.0);
    CHECK(sys.targets(0) == 0.005);
    CHECK(sys.targets(1) == -0.005);

    PointMatrix p(2, 3), n(2, 3);
    p << 0, 0, 0, 1, 0, 0;
    n << 1, 0, 0, 0, 1, 0;
    const auto s2 = build_system(OrientedPointCloud::make(p, n), 0.01, 1e-10);
    REQUIRE(s2.size() == 4);
    CHECK(s2.targets(0) == 0.01);
    CHECK(s2.targets(1) == 0.01);
    CHECK(s2.targets(2) == -0.01);
    CHECK(s2.targets(3) == -0.01);
    CHECK(s2.centers(3, 1) == doctest::Approx(-0.01));

    // Same point with opposite normals: the plus center of one is the minus center of the other.
    n << 1, 0, 0, -1, 0, 0;
    p.row(1) = p.row(0);
    const auto dup = build_system(OrientedPointCloud::make(p, n), 0.005, 0.0);
    CHECK(dup.size() == 4);
    CHECK(dup.min_center_distance == 0.0);
    CHECK(kind_of([&] { solve_dense(dup, KernelSpec::matern(1.5, 1.0)); }) == ErrorKind::SingularSystem);
}

TEST_CASE("two-center closed form") {
    const auto sys = build_system(single_point(), 0.005, 0.0);
    const auto sol = solve_dense(sys, KernelSpec::matern(0.5, 1.0));
    const double a = std::exp(-0.01);
    const double expect = 0.005 / (1.0 - a);
    CHECK(sol.field.alpha(0) == doctest::Approx(expect).epsilon(1e-10));
    CHECK(sol.field.alpha(1) == doctest::Approx(-expect).epsilon(1e-10));
    CHECK(sol.report.relative_residual <= 1e-8);
}

TEST_CASE("dense solve residual and interpolation on a sphere") {
    const auto cloud = test::sphere_cloud(500, 0.3, 1);
    const auto sys = build_system(cloud, 0.005, 1e-10);
    const auto sol = solve_dense(sys, KernelSpec::matern(1.5, 1.0));
    CHECK(sol.report.relative_residual <= 1e-8);
    CHECK(relative_residual(sys, sol.field.spec, sol.field.alpha) <= 1e-8);
    double worst_center = 0.0, worst_point = 0.0;
    for (Eigen::Index i = 0; i < sys.size(); ++i) {
        worst_center = std::max(worst_center, std::abs(eval(sol.field, row3(sys.centers, i)) - sys.targets(i)));
    }
    for (Eigen::Index i = 0; i < cloud.size(); ++i) {
        worst_point = std::max(worst_point, std::abs(eval(sol.field, row3(cloud.points, i))));
    }
    CHECK(worst_center <= 1e-3 * 0.005);
    CHECK(worst_point <= 1e-2 * 0.005);
}

TEST_CASE("rkhs norm identity and monotonicity in lambda") {
    const auto cloud = test::sphere_cloud(150, 0.3, 2);
    const auto spec = KernelSpec::matern(1.5, 1.0);
    const auto sol = solve_dense(build_system(cloud, 0.005, 1e-10), spec);
    double direct = 0.0;
    const auto& c = sol.field.centers;
    for (Eigen::Index i = 0; i < c.rows(); ++i)
        for (Eigen::Index j = 0; j < c.rows(); ++j)
            direct += sol.field.alpha(i) * sol.field.alpha(j) * eval_kernel(spec, row_span(c, i), row_span(c, j));
    CHECK(test::rel_err(rkhs_norm(sol.field), direct) <= 1e-10);

    double prev = std::numeric_limits<double>::infinity();
    for (double lambda : {1e-13, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8, 1e-7}) {
        const auto s = solve_dense(build_system(cloud, 0.005, lambda), spec);
        const double norm = rkhs_norm(s.field);
        CHECK(norm <= prev * (1 + 1e-9));
        prev = norm;
    }
}

TEST_CASE("capacity limit") {
    const auto sys = build_system(test::sphere_cloud(20, 0.3, 3), 0.005, 1e-10);
    CHECK(kind_of([&] { solve_dense(sys, KernelSpec::matern(1.5, 1.0), DenseOptions{10}); }) ==
          ErrorKind::Capacity);
}

TEST_CASE("sparse solve agrees with dense on the tapered kernel") {
    for (int m : {20, 100, 250}) {
        const auto sys = build_system(test::sphere_cloud(m, 0.3, 10 + m), 0.005, 1e-10);
        for (const auto& spec : {KernelSpec::matern(0.5, 0.2).with_taper(0.3), KernelSpec::matern(1.5, 0.5).with_taper(2.0)}) {
            const auto dense = solve_dense(sys, spec);
            const auto sparse = solve_sparse(sys, spec);
            CHECK(sparse.report.sparse);
            CHECK(sparse.report.iterations > 0);
            const double scale = dense.field.alpha.cwiseAbs().maxCoeff();
            CHECK((sparse.field.alpha - dense.field.alpha).cwiseAbs().maxCoeff() <= 1e-6 * scale);
        }
    }
}

TEST_CASE("taper below the center spacing gives a diagonal system") {
    const auto sys = build_system(test::sphere_cloud(50, 0.3, 4), 0.005, 0.25);
    const auto spec = KernelSpec::matern(0.5, 1.0).with_taper(0.5 * sys.min_center_distance);
    const auto sol = solve_sparse(sys, spec);
    CHECK(sol.report.nonzeros == static_cast<std::size_t>(sys.size()));
    for (Eigen::Index i = 0; i < sys.size(); ++i) {
        CHECK(sol.field.alpha(i) == doctest::Approx(sys.targets(i) / 1.25).epsilon(1e-12));
    }
}

TEST_CASE("sparse solver failure modes") {
    const auto sys = build_system(test::sphere_cloud(200, 0.3, 5), 0.005, 0.0);
    const auto spec = KernelSpec::matern(1.5, 1.0).with_taper(1.5);
    try {
        solve_sparse(sys, spec, SparseOptions{1e-12, 1});
        FAIL("expected failure");
    } catch (const IterativeFailure& e) {
        CHECK(e.kind() == ErrorKind::IterativeFailure);
        CHECK(e.iterations() == 1);
        CHECK(e.residual() > 1e-12);
    }
    CHECK(kind_of([&] { solve_sparse(sys, KernelSpec::matern(1.5, 1.0)); }) == ErrorKind::InvalidInput);
    CHECK(solve(sys, spec).report.sparse);
    CHECK_FALSE(solve(build_system(test::sphere_cloud(20, 0.3, 5)), KernelSpec::matern(1.5, 1.0)).report.sparse);
}
