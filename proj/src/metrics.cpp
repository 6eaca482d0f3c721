#include "matern/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>
#include <vector>

#include "matern/error.hpp"
#include "matern/kdtree.hpp"

namespace matern {

std::string MetricsReport::csv_header() {
    return "chamfer_x1000,hausdorff,f_score,normal_consistency,sample_count";
}

std::string MetricsReport::csv_row() const {
    std::ostringstream os;
    os << std::setprecision(10) << chamfer_x1000 << ',' << hausdorff << ',' << f_score << ','
       << normal_consistency << ',' << sample_count;
    return os.str();
}

SampledSurface sample_mesh(const TriangleMesh& mesh, std::int64_t n, std::uint64_t seed) {
    if (n < 1) fail(ErrorKind::InvalidInput, "sample count must be >= 1");
    const Eigen::Index nf = mesh.faces.rows();
    std::vector<double> cumulative(static_cast<std::size_t>(nf));
    double total = 0.0;
    for (Eigen::Index f = 0; f < nf; ++f) {
        total += mesh.face_area(f);
        cumulative[static_cast<std::size_t>(f)] = total;
    }
    if (!(total > 0.0)) fail(ErrorKind::InvalidInput, "cannot sample a zero-area mesh");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    SampledSurface out;
    out.points.resize(n, 3);
    out.normals.resize(n, 3);
    for (std::int64_t s = 0; s < n; ++s) {
        const double pick = uni(rng) * total;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
        if (it == cumulative.end()) --it;
        const auto f = static_cast<Eigen::Index>(it - cumulative.begin());
        double u = uni(rng);
        double v = uni(rng);
        if (u + v > 1.0) {
            u = 1.0 - u;
            v = 1.0 - v;
        }
        const Vec3 a = row3(mesh.vertices, mesh.faces(f, 0));
        const Vec3 b = row3(mesh.vertices, mesh.faces(f, 1));
        const Vec3 c = row3(mesh.vertices, mesh.faces(f, 2));
        out.points.row(s) = (a + u * (b - a) + v * (c - a)).transpose();
        out.normals.row(s) = mesh.face_normal(f).transpose();
    }
    return out;
}

NearestResult nearest_neighbors(const PointMatrix& from, const PointMatrix& to) {
    if (to.rows() == 0) fail(ErrorKind::InvalidInput, "nearest-neighbor target set is empty");
    const KdTree3 tree(to);
    NearestResult r;
    r.distance.resize(from.rows());
    r.index.resize(from.rows());
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < from.rows(); ++i) {
        const auto hit = tree.nearest(row3(from, i));
        r.distance[i] = hit.distance;
        r.index[i] = hit.index;
    }
    return r;
}

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    // Voronoi-region walk over vertices, edges and the face.
    const Vec3 ab = b - a;
    const Vec3 ac = c - a;
    const Vec3 ap = p - a;
    const double d1 = ab.dot(ap);
    const double d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) return a;
    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp);
    const double d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) return b;
    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;
    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp);
    const double d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) return c;
    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;
    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
    }
    const double denom = 1.0 / (va + vb + vc);
    return a + ab * (vb * denom) + ac * (vc * denom);
}

Eigen::VectorXd point_mesh_distances(const PointMatrix& points, const TriangleMesh& mesh) {
    if (mesh.empty()) fail(ErrorKind::InvalidInput, "point_mesh_distances: mesh has no faces");
    const Eigen::Index nf = mesh.faces.rows();
    PointMatrix centroids(nf, 3);
    double reach = 0.0;
    for (Eigen::Index f = 0; f < nf; ++f) {
        const Vec3 a = row3(mesh.vertices, mesh.faces(f, 0));
        const Vec3 b = row3(mesh.vertices, mesh.faces(f, 1));
        const Vec3 c = row3(mesh.vertices, mesh.faces(f, 2));
        const Vec3 g = (a + b + c) / 3.0;
        centroids.row(f) = g.transpose();
        reach = std::max({reach, (a - g).norm(), (b - g).norm(), (c - g).norm()});
    }
    const KdTree3 centroid_tree(centroids);
    const KdTree3 vertex_tree(mesh.vertices);
    Eigen::VectorXd out(points.rows());
#pragma omp parallel for schedule(dynamic, 256)
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        const Vec3 p = row3(points, i);
        // The nearest vertex bounds the answer; any face within that bound has
        // its centroid within bound + reach.
        const double bound = vertex_tree.nearest(p).distance;
        double best = bound;
        for (std::int64_t f : centroid_tree.within(p, bound + reach)) {
            const Vec3 q = closest_point_on_triangle(p, row3(mesh.vertices, mesh.faces(f, 0)),
                                                     row3(mesh.vertices, mesh.faces(f, 1)),
                                                     row3(mesh.vertices, mesh.faces(f, 2)));
            best = std::min(best, (p - q).norm());
        }
        out[i] = best;
    }
    return out;
}

namespace {

void require_nonempty(const SampledSurface& a, const SampledSurface& b) {
    if (a.size() == 0 || b.size() == 0) fail(ErrorKind::InvalidInput, "metric inputs must be nonempty");
}

double nc_one_way(const SampledSurface& from, const SampledSurface& to, const NearestResult& nn) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < from.size(); ++i) {
        s += std::abs(from.normals.row(i).dot(to.normals.row(nn.index[i])));
    }
    return s / static_cast<double>(from.size());
}

double fscore_from(const NearestResult& ab, const NearestResult& ba, double threshold) {
    const auto within = [threshold](const Eigen::VectorXd& d) {
        return static_cast<double>((d.array() < threshold).count()) / static_cast<double>(d.size());
    };
    const double precision = within(ab.distance);
    const double recall = within(ba.distance);
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

}  // namespace

double chamfer(const SampledSurface& a, const SampledSurface& b) {
    require_nonempty(a, b);
    return 0.5 * (nearest_neighbors(a.points, b.points).distance.mean() +
                  nearest_neighbors(b.points, a.points).distance.mean());
}

double hausdorff(const SampledSurface& a, const SampledSurface& b) {
    require_nonempty(a, b);
    return std::max(nearest_neighbors(a.points, b.points).distance.maxCoeff(),
                    nearest_neighbors(b.points, a.points).distance.maxCoeff());
}

double f_score(const SampledSurface& pred, const SampledSurface& gt, double threshold) {
    require_nonempty(pred, gt);
    if (!(threshold > 0.0)) fail(ErrorKind::InvalidInput, "F-score threshold must be positive");
    return fscore_from(nearest_neighbors(pred.points, gt.points),
                       nearest_neighbors(gt.points, pred.points), threshold);
}

double normal_consistency(const SampledSurface& pred, const SampledSurface& gt) {
    require_nonempty(pred, gt);
    const auto pg = nearest_neighbors(pred.points, gt.points);
    const auto gp = nearest_neighbors(gt.points, pred.points);
    return 0.5 * (nc_one_way(pred, gt, pg) + nc_one_way(gt, pred, gp));
}

MetricsReport compare(const SampledSurface& pred, const SampledSurface& gt, double threshold) {
    require_nonempty(pred, gt);
    if (!(threshold > 0.0)) fail(ErrorKind::InvalidInput, "F-score threshold must be positive");
    const auto pg = nearest_neighbors(pred.points, gt.points);
    const auto gp = nearest_neighbors(gt.points, pred.points);
    MetricsReport r;
    r.chamfer_x1000 = 1000.0 * 0.5 * (pg.distance.mean() + gp.distance.mean());
    r.hausdorff = std::max(pg.distance.maxCoeff(), gp.distance.maxCoeff());
    r.f_score = fscore_from(pg, gp, threshold);
    r.normal_consistency = 0.5 * (nc_one_way(pred, gt, pg) + nc_one_way(gt, pred, gp));
    r.sample_count = static_cast<std::int64_t>(pred.size());
    return r;
}

MetricsReport benchmark_meshes(const TriangleMesh& pred, const TriangleMesh& gt, std::int64_t samples,
                               std::uint64_t seed) {
    // Same stream for both, so identical meshes give identical samples.
    const SampledSurface a = sample_mesh(pred, samples, seed);
    const SampledSurface b = sample_mesh(gt, samples, seed);
    return compare(a, b);
}

}  // namespace matern
