#pragma once

#include <cstdint>

#include "matern/krr.hpp"
#include "matern/mesh.hpp"
#include "matern/metrics.hpp"

namespace matern::shapes {

/// Uniform samples on the sphere |x - center| = radius with outward normals.
SampledSurface sphere_samples(std::int64_t n, double radius, std::uint64_t seed,
                              const Vec3& center = Vec3::Zero());

/// Area-uniform samples on a torus around the z axis (ring radius R, tube radius r).
SampledSurface torus_samples(std::int64_t n, double ring_radius, double tube_radius,
                             std::uint64_t seed, const Vec3& center = Vec3::Zero());

OrientedPointCloud to_cloud(const SampledSurface& s);

/// Latitude/longitude sphere mesh with `rings` latitude bands.
TriangleMesh sphere_mesh(double radius, int rings, int segments);
TriangleMesh torus_mesh(double ring_radius, double tube_radius, int rings, int segments);

}  // namespace matern::shapes
