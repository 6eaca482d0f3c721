#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "matern/types.hpp"

namespace matern {

using FaceMatrix = Eigen::Matrix<std::int32_t, Eigen::Dynamic, 3, Eigen::RowMajor>;

struct TriangleMesh {
    PointMatrix vertices = PointMatrix(0, 3);
    FaceMatrix faces = FaceMatrix(0, 3);
    /// Unit per-vertex normals; empty when unknown.
    PointMatrix vertex_normals = PointMatrix(0, 3);

    Eigen::Index vertex_count() const { return vertices.rows(); }
    Eigen::Index face_count() const { return faces.rows(); }
    bool empty() const { return faces.rows() == 0; }

    /// Index bounds, finite vertices, no zero-area faces. Throws InvalidInput.
    void validate() const;

    /// Area-weighted face-normal average per vertex.
    PointMatrix face_averaged_normals() const;

    double face_area(Eigen::Index f) const;
    Vec3 face_normal(Eigen::Index f) const;

    /// V - E + F, counting undirected edges.
    std::int64_t euler_characteristic() const;
    /// Every undirected edge is shared by exactly two faces.
    bool is_closed_manifold() const;
};

}  // namespace matern
