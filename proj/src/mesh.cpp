#include "matern/mesh.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "matern/error.hpp"

namespace matern {

namespace {

std::uint64_t edge_key(std::int32_t a, std::int32_t b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
}

std::unordered_map<std::uint64_t, int> edge_use_counts(const FaceMatrix& faces) {
    std::unordered_map<std::uint64_t, int> counts;
    counts.reserve(static_cast<std::size_t>(faces.rows()) * 2);
    for (Eigen::Index f = 0; f < faces.rows(); ++f) {
        for (int e = 0; e < 3; ++e) ++counts[edge_key(faces(f, e), faces(f, (e + 1) % 3))];
    }
    return counts;
}

}  // namespace

Vec3 TriangleMesh::face_normal(Eigen::Index f) const {
    const Vec3 a = row3(vertices, faces(f, 0));
    const Vec3 b = row3(vertices, faces(f, 1));
    const Vec3 c = row3(vertices, faces(f, 2));
    return (b - a).cross(c - a).normalized();
}

double TriangleMesh::face_area(Eigen::Index f) const {
    const Vec3 a = row3(vertices, faces(f, 0));
    const Vec3 b = row3(vertices, faces(f, 1));
    const Vec3 c = row3(vertices, faces(f, 2));
    return 0.5 * (b - a).cross(c - a).norm();
}

void TriangleMesh::validate() const {
    if (vertices.cols() != 3) fail(ErrorKind::InvalidInput, "mesh vertices must be V x 3");
    const Eigen::Index nv = vertices.rows();
    for (Eigen::Index v = 0; v < nv; ++v) {
        if (!vertices.row(v).allFinite()) {
            std::ostringstream os;
            os << "mesh vertex " << v << " is not finite";
            fail(ErrorKind::InvalidInput, os.str());
        }
    }
    for (Eigen::Index f = 0; f < faces.rows(); ++f) {
        for (int c = 0; c < 3; ++c) {
            if (faces(f, c) < 0 || faces(f, c) >= nv) {
                std::ostringstream os;
                os << "face " << f << " references vertex " << faces(f, c) << " of " << nv;
                fail(ErrorKind::InvalidInput, os.str());
            }
        }
        if (!(face_area(f) > 0.0)) {
            std::ostringstream os;
            os << "face " << f << " is degenerate (zero area)";
            fail(ErrorKind::InvalidInput, os.str());
        }
    }
    if (vertex_normals.rows() != 0 && vertex_normals.rows() != nv) {
        fail(ErrorKind::InvalidInput, "vertex normal count does not match vertex count");
    }
}

PointMatrix TriangleMesh::face_averaged_normals() const {
    PointMatrix n = PointMatrix::Zero(vertices.rows(), 3);
    for (Eigen::Index f = 0; f < faces.rows(); ++f) {
        const Vec3 a = row3(vertices, faces(f, 0));
        const Vec3 b = row3(vertices, faces(f, 1));
        const Vec3 c = row3(vertices, faces(f, 2));
        const Vec3 w = (b - a).cross(c - a);  // length = 2 * area
        for (int k = 0; k < 3; ++k) n.row(faces(f, k)) += w.transpose();
    }
    for (Eigen::Index v = 0; v < n.rows(); ++v) {
        const double len = n.row(v).norm();
        if (len > 0.0) n.row(v) /= len;
    }
    return n;
}

std::int64_t TriangleMesh::euler_characteristic() const {
    const auto edges = static_cast<std::int64_t>(edge_use_counts(faces).size());
    return static_cast<std::int64_t>(vertices.rows()) - edges + static_cast<std::int64_t>(faces.rows());
}

bool TriangleMesh::is_closed_manifold() const {
    if (faces.rows() == 0) return false;
    const auto counts = edge_use_counts(faces);
    return std::all_of(counts.begin(), counts.end(), [](const auto& kv) { return kv.second == 2; });
}

}  // namespace matern
