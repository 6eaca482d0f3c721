#pragma once

#include <cstdint>
#include <string>

#include "matern/mesh.hpp"
#include "matern/types.hpp"

namespace matern {

/// Points on a surface with unit normals.
struct SampledSurface {
    PointMatrix points = PointMatrix(0, 3);
    PointMatrix normals = PointMatrix(0, 3);

    Eigen::Index size() const { return points.rows(); }
};

struct MetricsReport {
    double chamfer_x1000 = 0.0;
    double hausdorff = 0.0;
    double f_score = 0.0;
    double normal_consistency = 0.0;
    std::int64_t sample_count = 0;

    static std::string csv_header();
    std::string csv_row() const;
};

inline constexpr double kDefaultFScoreThreshold = 0.01;
inline constexpr std::int64_t kDefaultMetricSamples = 100000;

/// Area-weighted uniform samples; normals are the face normals. Deterministic in seed.
SampledSurface sample_mesh(const TriangleMesh& mesh, std::int64_t n, std::uint64_t seed);

/// Half the sum of the two mean nearest-neighbor distances (unsquared).
double chamfer(const SampledSurface& a, const SampledSurface& b);
/// Symmetric maximum nearest-neighbor distance.
double hausdorff(const SampledSurface& a, const SampledSurface& b);
/// Harmonic mean of precision and recall at the distance threshold; 0 when both vanish.
double f_score(const SampledSurface& pred, const SampledSurface& gt,
               double threshold = kDefaultFScoreThreshold);
/// Symmetrized mean |n_pred . n_nn| over nearest-neighbor pairs.
double normal_consistency(const SampledSurface& pred, const SampledSurface& gt);

/// All four metrics in one pass over the nearest-neighbor queries.
MetricsReport compare(const SampledSurface& pred, const SampledSurface& gt,
                      double threshold = kDefaultFScoreThreshold);
MetricsReport benchmark_meshes(const TriangleMesh& pred, const TriangleMesh& gt,
                               std::int64_t samples = kDefaultMetricSamples, std::uint64_t seed = 0);

/// Nearest-neighbor distance and index from every point of `from` into `to`.
struct NearestResult {
    Eigen::VectorXd distance;
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1> index;
};
NearestResult nearest_neighbors(const PointMatrix& from, const PointMatrix& to);

/// Exact Euclidean distance from each point to the closest point on the mesh surface.
Eigen::VectorXd point_mesh_distances(const PointMatrix& points, const TriangleMesh& mesh);

/// Closest point to p on triangle (a, b, c).
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

}  // namespace matern
