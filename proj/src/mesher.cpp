#include "matern/mesher.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <vector>

#include <spdlog/spdlog.h>

#include "matern/error.hpp"
#include "mc_tables.hpp"

namespace matern {

std::pair<OrientedPointCloud, SimilarityTransform> normalize(const OrientedPointCloud& cloud,
                                                             double padding) {
    if (cloud.size() < 1) fail(ErrorKind::InvalidInput, "cannot normalize an empty cloud");
    if (cloud.dim() != 3) fail(ErrorKind::InvalidInput, "normalize expects 3-D points");
    if (!(padding >= 0.0 && padding < 0.5)) {
        fail(ErrorKind::InvalidInput, "padding must lie in [0, 0.5)");
    }
    const Vec3 lo = cloud.points.colwise().minCoeff().transpose();
    const Vec3 hi = cloud.points.colwise().maxCoeff().transpose();
    const double extent = (hi - lo).maxCoeff();
    SimilarityTransform t;
    if (extent > 0.0) {
        t.scale = (1.0 - 2.0 * padding) / extent;
    } else if (cloud.size() > 1) {
        fail(ErrorKind::InvalidInput, "degenerate cloud: all points are identical");
    }
    t.translation = -t.scale * 0.5 * (lo + hi);

    OrientedPointCloud out = cloud;
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        out.points.row(i) = t.to_normalized(row3(cloud.points, i)).transpose();
    }
    return {std::move(out), t};
}

ScalarGrid FunctionSurfaceField::sample(const GridSpec& grid) const {
    ScalarGrid out;
    out.spec = grid;
    out.values.resize(grid.node_count());
    const int nx = grid.resolution[0];
    const int ny = grid.resolution[1];
    const int nz = grid.resolution[2];
    for (int k = 0; k < nz; ++k) {
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) out.values[out.index(i, j, k)] = value_(grid.node(i, j, k));
        }
    }
    return out;
}

namespace {

// Global id of the lattice edge leaving node (i, j, k) along `axis`.
std::uint64_t lattice_edge_id(const ScalarGrid& g, int i, int j, int k, int axis) {
    return 3 * static_cast<std::uint64_t>(g.index(i, j, k)) + static_cast<std::uint64_t>(axis);
}

}  // namespace

TriangleMesh marching_cubes(const ScalarGrid& grid, double iso) {
    using detail::kCornerOffsets;
    using detail::kEdgeCorners;
    const int nx = grid.spec.resolution[0];
    const int ny = grid.spec.resolution[1];
    const int nz = grid.spec.resolution[2];
    if (grid.values.size() != grid.spec.node_count()) {
        fail(ErrorKind::InvalidInput, "grid value count does not match its resolution");
    }

    std::unordered_map<std::uint64_t, std::int32_t> edge_vertex;
    std::vector<Vec3> verts;
    std::vector<std::array<std::int32_t, 3>> tris;

    auto vertex_on_edge = [&](int i, int j, int k, int corner_a, int corner_b) {
        // Canonical orientation: a is the corner with the smaller offset.
        const auto& oa = kCornerOffsets[static_cast<std::size_t>(corner_a)];
        const auto& ob = kCornerOffsets[static_cast<std::size_t>(corner_b)];
        int ai = i + oa[0], aj = j + oa[1], ak = k + oa[2];
        int bi = i + ob[0], bj = j + ob[1], bk = k + ob[2];
        if (ai + aj + ak > bi + bj + bk) {
            std::swap(ai, bi);
            std::swap(aj, bj);
            std::swap(ak, bk);
        }
        const int axis = (bi != ai) ? 0 : (bj != aj ? 1 : 2);
        const std::uint64_t id = lattice_edge_id(grid, ai, aj, ak, axis);
        const auto it = edge_vertex.find(id);
        if (it != edge_vertex.end()) return it->second;
        const double va = grid.at(ai, aj, ak);
        const double vb = grid.at(bi, bj, bk);
        const double t = (va == vb) ? 0.5 : (iso - va) / (vb - va);
        const Vec3 pa = grid.spec.node(ai, aj, ak);
        const Vec3 pb = grid.spec.node(bi, bj, bk);
        const auto idx = static_cast<std::int32_t>(verts.size());
        verts.push_back(pa + t * (pb - pa));
        edge_vertex.emplace(id, idx);
        return idx;
    };

    for (int k = 0; k + 1 < nz; ++k) {
        for (int j = 0; j + 1 < ny; ++j) {
            for (int i = 0; i + 1 < nx; ++i) {
                int cube = 0;
                for (int c = 0; c < 8; ++c) {
                    const auto& o = kCornerOffsets[static_cast<std::size_t>(c)];
                    if (grid.at(i + o[0], j + o[1], k + o[2]) < iso) cube |= 1 << c;
                }
                if (detail::kEdgeTable[static_cast<std::size_t>(cube)] == 0) continue;
                std::array<std::int32_t, 12> ev{};
                const int mask = detail::kEdgeTable[static_cast<std::size_t>(cube)];
                for (int e = 0; e < 12; ++e) {
                    if (mask & (1 << e)) {
                        const auto& ec = kEdgeCorners[static_cast<std::size_t>(e)];
                        ev[static_cast<std::size_t>(e)] = vertex_on_edge(i, j, k, ec[0], ec[1]);
                    }
                }
                const auto& row = detail::kTriTable[static_cast<std::size_t>(cube)];
                for (int t = 0; row[static_cast<std::size_t>(t)] != -1; t += 3) {
                    // Table winding faces the low side; swap to face increasing f.
                    tris.push_back({ev[static_cast<std::size_t>(row[static_cast<std::size_t>(t)])],
                                    ev[static_cast<std::size_t>(row[static_cast<std::size_t>(t + 2)])],
                                    ev[static_cast<std::size_t>(row[static_cast<std::size_t>(t + 1)])]});
                }
            }
        }
    }

    // Drop zero-area triangles (vertices landing on lattice nodes) and compact.
    std::vector<std::array<std::int32_t, 3>> kept;
    kept.reserve(tris.size());
    for (const auto& t : tris) {
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) continue;
        const Vec3& a = verts[static_cast<std::size_t>(t[0])];
        const Vec3& b = verts[static_cast<std::size_t>(t[1])];
        const Vec3& c = verts[static_cast<std::size_t>(t[2])];
        if (!((b - a).cross(c - a).norm() > 0.0)) continue;
        kept.push_back(t);
    }
    std::vector<std::int32_t> remap(verts.size(), -1);
    std::int32_t next = 0;
    for (const auto& t : kept) {
        for (std::int32_t v : t) {
            if (remap[static_cast<std::size_t>(v)] < 0) remap[static_cast<std::size_t>(v)] = next++;
        }
    }

    TriangleMesh mesh;
    mesh.vertices.resize(next, 3);
    for (std::size_t v = 0; v < verts.size(); ++v) {
        if (remap[v] >= 0) mesh.vertices.row(remap[v]) = verts[v].transpose();
    }
    mesh.faces.resize(static_cast<Eigen::Index>(kept.size()), 3);
    for (std::size_t f = 0; f < kept.size(); ++f) {
        for (int c = 0; c < 3; ++c) {
            mesh.faces(static_cast<Eigen::Index>(f), c) =
                remap[static_cast<std::size_t>(kept[f][static_cast<std::size_t>(c)])];
        }
    }
    return mesh;
}

TriangleMesh extract_surface(const SurfaceField& field, int resolution, double iso) {
    if (resolution < 16 || resolution > 1024) {
        fail(ErrorKind::InvalidInput, "extraction resolution must lie in [16, 1024]");
    }
    const GridSpec spec = GridSpec::cube(-kExtractionHalfWidth, kExtractionHalfWidth, resolution);
    const ScalarGrid grid = field.sample(spec);
    const auto [lo_it, hi_it] = std::minmax_element(grid.values.begin(), grid.values.end());
    if (!(*lo_it < iso && *hi_it >= iso)) {
        std::ostringstream os;
        os << "field has no sign change around iso=" << iso << " (min " << *lo_it << ", max "
           << *hi_it << ")";
        fail(ErrorKind::EmptySurface, os.str());
    }

    TriangleMesh mesh = marching_cubes(grid, iso);
    if (mesh.empty()) fail(ErrorKind::EmptySurface, "marching cubes produced no triangles");

    const PointMatrix fallback = mesh.face_averaged_normals();
    mesh.vertex_normals.resize(mesh.vertices.rows(), 3);
#pragma omp parallel for schedule(dynamic, 64)
    for (Eigen::Index v = 0; v < mesh.vertices.rows(); ++v) {
        const Vec3 g = field.gradient(row3(mesh.vertices, v));
        const double len = g.norm();
        if (len > 0.0 && std::isfinite(len)) {
            mesh.vertex_normals.row(v) = (g / len).transpose();
        } else {
            mesh.vertex_normals.row(v) = fallback.row(v);
        }
    }

    const SimilarityTransform t = field.transform();
    for (Eigen::Index v = 0; v < mesh.vertices.rows(); ++v) {
        mesh.vertices.row(v) = t.to_world(row3(mesh.vertices, v)).transpose();
    }
    return mesh;
}

TriangleMesh extract_surface(const ImplicitField& field, int resolution, double iso) {
    return extract_surface(KernelSurfaceField(field), resolution, iso);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <class Fn>
auto run_stage(const char* stage, Fn&& fn) {
    try {
        return fn();
    } catch (const IterativeFailure& e) {
        throw IterativeFailure(std::string(stage) + ": " + e.what(), e.residual(), e.iterations());
    } catch (const Error& e) {
        throw Error(e.kind(), std::string(stage) + ": " + e.what());
    }
}

}  // namespace

Reconstruction reconstruct(const OrientedPointCloud& cloud, const KernelSpec& spec,
                           const ReconstructOptions& options) {
    Reconstruction out;
    KernelSpec used = spec;
    run_stage("config", [&] {
        used.validate();
        return 0;
    });

    auto t0 = Clock::now();
    auto [normalized, transform] = run_stage("normalize", [&] {
        return normalize(OrientedPointCloud::make(cloud.points, cloud.normals), options.padding);
    });
    out.timings.normalize_s = seconds_since(t0);

    t0 = Clock::now();
    const RidgeSystem system =
        run_stage("assembly", [&] { return build_system(normalized, options.epsilon, options.lambda); });
    out.timings.assembly_s = seconds_since(t0);

    if (!used.taper && system.size() > options.dense.max_centers) {
        used = used.with_taper();
        spdlog::info("{} centers exceed the dense limit {}; switching to the tapered sparse solver "
                     "(nu'={}, h'={})",
                     system.size(), options.dense.max_centers, used.taper->nu_prime, used.taper->h_prime);
    }
    if (used.taper) spdlog::info("sparse solver engaged (taper h'={})", used.taper->h_prime);

    t0 = Clock::now();
    Solution sol = run_stage("solve", [&] { return solve(system, used, options.dense, options.sparse); });
    out.timings.solve_s = seconds_since(t0);
    sol.field.transform = transform;

    t0 = Clock::now();
    out.mesh = run_stage("extraction", [&] { return extract_surface(sol.field, options.resolution); });
    out.timings.extraction_s = seconds_since(t0);

    out.field = std::move(sol.field);
    out.solve = sol.report;
    spdlog::debug("reconstruct: normalize {:.3f}s assembly {:.3f}s solve {:.3f}s extraction {:.3f}s",
                  out.timings.normalize_s, out.timings.assembly_s, out.timings.solve_s,
                  out.timings.extraction_s);
    return out;
}

}  // namespace matern
