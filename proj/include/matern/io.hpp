#pragma once

#include <string>

#include "matern/krr.hpp"
#include "matern/mesh.hpp"

namespace matern::io {

enum class CloudFormat { Auto, Ply, Obj, Xyz };
enum class MeshFormat { Auto, Obj, Ply };

/// Reads points with normals. PLY (ascii or binary little-endian), OBJ (v/vn
/// paired by order) and XYZ (six columns). Normals are rescaled to unit length.
/// Throws Io for missing files and Parse for malformed or normal-less input.
OrientedPointCloud load_cloud(const std::string& path, CloudFormat format = CloudFormat::Auto);

/// Binary little-endian PLY with double-precision x,y,z,nx,ny,nz.
void save_cloud(const OrientedPointCloud& cloud, const std::string& path);

/// OBJ: v/vn/f with f i//i records. PLY: binary little-endian, float32
/// vertices and normals, uchar/int32 face lists. Rejects empty meshes.
void save_mesh(const TriangleMesh& mesh, const std::string& path, MeshFormat format = MeshFormat::Auto);

/// Polygons are fan-split into triangles. Per-vertex normals are kept when
/// every vertex has one.
TriangleMesh load_mesh(const std::string& path, MeshFormat format = MeshFormat::Auto);

CloudFormat cloud_format_from_path(const std::string& path);
MeshFormat mesh_format_from_path(const std::string& path);

}  // namespace matern::io
