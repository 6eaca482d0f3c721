#include "matern/field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "matern/error.hpp"
#include "profiles.hpp"

namespace matern {

namespace {

// Centers are processed in tiles of this many; the per-node summation order
// stays center-ascending so tiling never changes the result.
constexpr Eigen::Index kCenterBlock = 1024;
constexpr std::size_t kNodeBlock = 256;

// Kernel values for a lane block first (vectorized where the kernel allows),
// then a sequential sum, so every caller adds in the same order.
template <class Kernel>
void accumulate(const Kernel& kernel, const double* q, const detail::CenterColumns& centers,
                const double* alpha, Eigen::Index begin, Eigen::Index end, double& acc) {
    double k[detail::kLaneBlock];
    for (Eigen::Index b = begin; b < end; b += detail::kLaneBlock) {
        const Eigen::Index count = std::min(detail::kLaneBlock, end - b);
        kernel.block(q, centers, b, count, k);
        for (Eigen::Index i = 0; i < count; ++i) acc += alpha[b + i] * k[i];
    }
}

void require_3d(const ImplicitField& field) {
    if (field.centers.cols() != 3) fail(ErrorKind::InvalidInput, "field evaluation expects 3-D centers");
    if (field.alpha.size() != field.centers.rows()) {
        fail(ErrorKind::InvalidInput, "field: alpha length does not match center count");
    }
}

Vec3 to_local(const ImplicitField& field, const Vec3& x, bool in_world_coords) {
    if (!x.allFinite()) fail(ErrorKind::InvalidInput, "query point must be finite");
    return in_world_coords ? field.transform.to_normalized(x) : x;
}

double eval_local(const ImplicitField& field, const Vec3& q) {
    const double p[3] = {q.x(), q.y(), q.z()};
    const detail::CenterColumns centers(field.centers);
    const double* alpha = field.alpha.data();
    const Eigen::Index n = field.centers.rows();
    return detail::dispatch3(field.spec, [&](const auto& kernel) {
        double acc = 0.0;
        for (Eigen::Index b = 0; b < n; b += kCenterBlock) {
            accumulate(kernel, p, centers, alpha, b, std::min(n, b + kCenterBlock), acc);
        }
        return acc;
    });
}

}  // namespace

GridSpec GridSpec::cube(double lo, double hi, int resolution) {
    if (resolution < 2) fail(ErrorKind::InvalidInput, "grid resolution must be >= 2");
    if (!(hi > lo)) fail(ErrorKind::InvalidInput, "grid bounds must satisfy hi > lo");
    GridSpec g;
    g.resolution = {resolution, resolution, resolution};
    g.origin = Vec3::Constant(lo);
    g.spacing = (hi - lo) / (resolution - 1);
    return g;
}

Vec3 GridSpec::node(int i, int j, int k) const {
    return {origin.x() + spacing * i, origin.y() + spacing * j, origin.z() + spacing * k};
}

double eval(const ImplicitField& field, const Vec3& x, bool in_world_coords) {
    require_3d(field);
    return eval_local(field, to_local(field, x, in_world_coords));
}

ScalarGrid eval_grid(const ImplicitField& field, const GridSpec& grid, GridOptions options) {
    require_3d(field);
    for (int r : grid.resolution) {
        if (r < 2) fail(ErrorKind::InvalidInput, "grid resolution must be >= 2 per axis");
    }
    if (!(grid.spacing > 0.0)) fail(ErrorKind::InvalidInput, "grid spacing must be positive");
    const std::size_t total = grid.node_count();
    if (total > options.max_nodes) {
        std::ostringstream os;
        os << "grid of " << total << " nodes exceeds the configured cap of " << options.max_nodes;
        fail(ErrorKind::Capacity, os.str());
    }

    ScalarGrid out;
    out.spec = grid;
    out.values.assign(total, 0.0);
    const auto nx = static_cast<std::size_t>(grid.resolution[0]);
    const auto ny = static_cast<std::size_t>(grid.resolution[1]);
    const detail::CenterColumns centers(field.centers);
    const double* alpha = field.alpha.data();
    const Eigen::Index n = field.centers.rows();
    const auto blocks = static_cast<std::int64_t>((total + kNodeBlock - 1) / kNodeBlock);

    detail::dispatch3(field.spec, [&](const auto& kernel) {
#pragma omp parallel for schedule(dynamic, 4)
        for (std::int64_t blk = 0; blk < blocks; ++blk) {
            const std::size_t first = static_cast<std::size_t>(blk) * kNodeBlock;
            const std::size_t last = std::min(total, first + kNodeBlock);
            double pts[kNodeBlock][3];
            double acc[kNodeBlock];
            for (std::size_t v = first; v < last; ++v) {
                const auto i = static_cast<int>(v % nx);
                const auto j = static_cast<int>((v / nx) % ny);
                const auto k = static_cast<int>(v / (nx * ny));
                const Vec3 p = grid.node(i, j, k);
                pts[v - first][0] = p.x();
                pts[v - first][1] = p.y();
                pts[v - first][2] = p.z();
                acc[v - first] = 0.0;
            }
            for (Eigen::Index b = 0; b < n; b += kCenterBlock) {
                const Eigen::Index e = std::min(n, b + kCenterBlock);
                for (std::size_t v = 0; v < last - first; ++v) {
                    accumulate(kernel, pts[v], centers, alpha, b, e, acc[v]);
                }
            }
            std::copy(acc, acc + (last - first), out.values.begin() + static_cast<std::ptrdiff_t>(first));
        }
    });
    return out;
}

Vec3 gradient(const ImplicitField& field, const Vec3& x, GradientMode mode, double step,
              bool in_world_coords) {
    require_3d(field);
    const Vec3 q = to_local(field, x, in_world_coords);
    Vec3 g = Vec3::Zero();
    if (mode == GradientMode::Analytic) {
        if (!field.spec.has_analytic_gradient()) {
            fail(ErrorKind::UnsupportedGradient,
                 "analytic gradient unavailable for kernel '" + field.spec.key() +
                     "'; use central differences");
        }
        for (Eigen::Index i = 0; i < field.centers.rows(); ++i) {
            const Vec3 d = q - row3(field.centers, i);
            g += field.alpha[i] * radial_derivative_over_tau(field.spec, d.norm()) * d;
        }
    } else {
        if (!(step > 0.0)) fail(ErrorKind::InvalidInput, "finite-difference step must be positive");
        for (int a = 0; a < 3; ++a) {
            Vec3 hi = q;
            Vec3 lo = q;
            hi[a] += step;
            lo[a] -= step;
            g[a] = (eval_local(field, hi) - eval_local(field, lo)) / (2.0 * step);
        }
    }
    // Chain rule through normalized = scale * world + t.
    return in_world_coords ? Vec3(g * field.transform.scale) : g;
}

Vec3 gradient_auto(const ImplicitField& field, const Vec3& x, bool in_world_coords) {
    const GradientMode mode =
        field.spec.has_analytic_gradient() ? GradientMode::Analytic : GradientMode::CentralDiff;
    return gradient(field, x, mode, kDefaultDiffStep, in_world_coords);
}

}  // namespace matern
