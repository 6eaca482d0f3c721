#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace matern {

/// n×d coordinates, one point per row. Row-major so a row is a contiguous span.
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec3 = Eigen::Vector3d;

inline std::span<const double> row_span(const PointMatrix& m, Eigen::Index i) {
    return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

inline Vec3 row3(const PointMatrix& m, Eigen::Index i) {
    return {m(i, 0), m(i, 1), m(i, 2)};
}

/// Isotropic scale + translation mapping world coordinates to normalized ones:
/// normalized = scale * world + translation.
struct SimilarityTransform {
    double scale = 1.0;
    Vec3 translation = Vec3::Zero();

    Vec3 to_normalized(const Vec3& world) const { return scale * world + translation; }
    Vec3 to_world(const Vec3& normalized) const { return (normalized - translation) / scale; }

    static SimilarityTransform identity() { return {}; }
};

}  // namespace matern
