#include "matern/shapes.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "matern/error.hpp"

namespace matern::shapes {

SampledSurface sphere_samples(std::int64_t n, double radius, std::uint64_t seed, const Vec3& center) {
    if (n < 1 || !(radius > 0.0)) fail(ErrorKind::InvalidInput, "sphere_samples: bad arguments");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    SampledSurface s;
    s.points.resize(n, 3);
    s.normals.resize(n, 3);
    for (std::int64_t i = 0; i < n; ++i) {
        Vec3 v;
        do {
            v = Vec3(gauss(rng), gauss(rng), gauss(rng));
        } while (v.norm() < 1e-12);
        v.normalize();
        s.normals.row(i) = v.transpose();
        s.points.row(i) = (center + radius * v).transpose();
    }
    return s;
}

SampledSurface torus_samples(std::int64_t n, double ring_radius, double tube_radius,
                             std::uint64_t seed, const Vec3& center) {
    if (n < 1 || !(tube_radius > 0.0) || !(ring_radius > tube_radius)) {
        fail(ErrorKind::InvalidInput, "torus_samples: need ring radius > tube radius > 0");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double two_pi = 2.0 * std::numbers::pi;
    SampledSurface s;
    s.points.resize(n, 3);
    s.normals.resize(n, 3);
    for (std::int64_t i = 0; i < n; ++i) {
        // Area element is proportional to R + r cos(theta); rejection-sample theta.
        double theta = 0.0;
        while (true) {
            theta = two_pi * uni(rng);
            const double accept = (ring_radius + tube_radius * std::cos(theta)) / (ring_radius + tube_radius);
            if (uni(rng) <= accept) break;
        }
        const double phi = two_pi * uni(rng);
        const Vec3 normal(std::cos(theta) * std::cos(phi), std::cos(theta) * std::sin(phi), std::sin(theta));
        const Vec3 ring(ring_radius * std::cos(phi), ring_radius * std::sin(phi), 0.0);
        s.points.row(i) = (center + ring + tube_radius * normal).transpose();
        s.normals.row(i) = normal.transpose();
    }
    return s;
}

OrientedPointCloud to_cloud(const SampledSurface& s) {
    return OrientedPointCloud::make(s.points, s.normals);
}

TriangleMesh sphere_mesh(double radius, int rings, int segments) {
    if (rings < 2 || segments < 3) fail(ErrorKind::InvalidInput, "sphere_mesh: too coarse");
    const double pi = std::numbers::pi;
    const int ring_verts = (rings - 1) * segments;
    TriangleMesh m;
    m.vertices.resize(ring_verts + 2, 3);
    m.vertex_normals.resize(ring_verts + 2, 3);
    for (int r = 1; r < rings; ++r) {
        const double theta = pi * r / rings;
        for (int s = 0; s < segments; ++s) {
            const double phi = 2.0 * pi * s / segments;
            const Vec3 n(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
            const int v = (r - 1) * segments + s;
            m.vertices.row(v) = (radius * n).transpose();
            m.vertex_normals.row(v) = n.transpose();
        }
    }
    const int north = ring_verts;
    const int south = ring_verts + 1;
    m.vertices.row(north) << 0.0, 0.0, radius;
    m.vertices.row(south) << 0.0, 0.0, -radius;
    m.vertex_normals.row(north) << 0.0, 0.0, 1.0;
    m.vertex_normals.row(south) << 0.0, 0.0, -1.0;

    std::vector<std::array<int, 3>> f;
    for (int s = 0; s < segments; ++s) {
        const int s1 = (s + 1) % segments;
        f.push_back({north, s, s1});
        const int base = (rings - 2) * segments;
        f.push_back({south, base + s1, base + s});
    }
    for (int r = 0; r + 1 < rings - 1; ++r) {
        for (int s = 0; s < segments; ++s) {
            const int s1 = (s + 1) % segments;
            const int a = r * segments + s;
            const int b = r * segments + s1;
            const int c = (r + 1) * segments + s;
            const int d = (r + 1) * segments + s1;
            f.push_back({a, c, b});
            f.push_back({b, c, d});
        }
    }
    m.faces.resize(static_cast<Eigen::Index>(f.size()), 3);
    for (std::size_t i = 0; i < f.size(); ++i) {
        for (int c = 0; c < 3; ++c) m.faces(static_cast<Eigen::Index>(i), c) = f[i][static_cast<std::size_t>(c)];
    }
    return m;
}

TriangleMesh torus_mesh(double ring_radius, double tube_radius, int rings, int segments) {
    if (rings < 3 || segments < 3) fail(ErrorKind::InvalidInput, "torus_mesh: too coarse");
    const double two_pi = 2.0 * std::numbers::pi;
    TriangleMesh m;
    m.vertices.resize(rings * segments, 3);
    m.vertex_normals.resize(rings * segments, 3);
    for (int i = 0; i < rings; ++i) {
        const double phi = two_pi * i / rings;
        for (int j = 0; j < segments; ++j) {
            const double theta = two_pi * j / segments;
            const Vec3 n(std::cos(theta) * std::cos(phi), std::cos(theta) * std::sin(phi), std::sin(theta));
            const Vec3 ring(ring_radius * std::cos(phi), ring_radius * std::sin(phi), 0.0);
            m.vertices.row(i * segments + j) = (ring + tube_radius * n).transpose();
            m.vertex_normals.row(i * segments + j) = n.transpose();
        }
    }
    m.faces.resize(2 * rings * segments, 3);
    Eigen::Index f = 0;
    for (int i = 0; i < rings; ++i) {
        const int i1 = (i + 1) % rings;
        for (int j = 0; j < segments; ++j) {
            const int j1 = (j + 1) % segments;
            const int a = i * segments + j;
            const int b = i1 * segments + j;
            const int c = i1 * segments + j1;
            const int d = i * segments + j1;
            m.faces.row(f++) << a, b, c;
            m.faces.row(f++) << a, c, d;
        }
    }
    return m;
}

}  // namespace matern::shapes
