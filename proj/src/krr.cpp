#include "matern/krr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/SparseCore>
#include <spdlog/spdlog.h>

#include "matern/error.hpp"
#include "matern/kdtree.hpp"

namespace matern {

OrientedPointCloud OrientedPointCloud::make(PointMatrix points, PointMatrix normals) {
    if (points.rows() < 1) fail(ErrorKind::InvalidInput, "point cloud is empty");
    if (points.rows() != normals.rows() || points.cols() != normals.cols()) {
        fail(ErrorKind::InvalidInput, "points and normals must have the same shape");
    }
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        if (!points.row(i).allFinite() || !normals.row(i).allFinite()) {
            std::ostringstream os;
            os << "non-finite coordinate or normal at point " << i;
            fail(ErrorKind::InvalidInput, os.str());
        }
        const double len = normals.row(i).norm();
        if (!(len > 0.0)) {
            std::ostringstream os;
            os << "zero-length normal at point " << i;
            fail(ErrorKind::InvalidInput, os.str());
        }
        normals.row(i) /= len;
    }
    return OrientedPointCloud{std::move(points), std::move(normals)};
}

void ImplicitField::validate() const {
    if (alpha.size() != centers.rows()) {
        fail(ErrorKind::InvalidInput, "field: alpha length does not match center count");
    }
    if (!alpha.allFinite()) fail(ErrorKind::InvalidInput, "field: non-finite coefficients");
    spec.validate();
}

namespace {

double min_pairwise_distance(const PointMatrix& c) {
    const Eigen::Index n = c.rows();
    if (n < 2) return std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    if (c.cols() == 3) {
        const KdTree3 tree(c);
        for (Eigen::Index i = 0; i < n; ++i) {
            best = std::min(best, tree.nearest_excluding(row3(c, i), i).distance);
        }
        return best;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) best = std::min(best, (c.row(i) - c.row(j)).norm());
    }
    return best;
}

}  // namespace

RidgeSystem build_system(const OrientedPointCloud& cloud, double epsilon, double lambda) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        fail(ErrorKind::InvalidInput, "epsilon must be positive");
    }
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        fail(ErrorKind::InvalidInput, "lambda must be nonnegative");
    }
    const Eigen::Index m = cloud.size();
    if (m < 1) fail(ErrorKind::InvalidInput, "point cloud is empty");
    RidgeSystem sys;
    sys.epsilon = epsilon;
    sys.lambda = lambda;
    sys.centers.resize(2 * m, cloud.dim());
    sys.targets.resize(2 * m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double len = cloud.normals.row(i).norm();
        if (!(len > 0.0)) {
            std::ostringstream os;
            os << "zero-length normal at point " << i;
            fail(ErrorKind::InvalidInput, os.str());
        }
        const auto n = cloud.normals.row(i) / len;
        sys.centers.row(i) = cloud.points.row(i) + epsilon * n;
        sys.centers.row(m + i) = cloud.points.row(i) - epsilon * n;
        sys.targets[i] = epsilon;
        sys.targets[m + i] = -epsilon;
    }
    sys.min_center_distance = min_pairwise_distance(sys.centers);
    if (sys.min_center_distance <= 1e-12) {
        spdlog::warn("ridge system has coincident centers (min pairwise distance {:.3g}); "
                     "a positive lambda is needed",
                     sys.min_center_distance);
    }
    return sys;
}

double relative_residual(const RidgeSystem& system, const KernelSpec& spec,
                         const Eigen::VectorXd& alpha) {
    Eigen::MatrixXd k = gram_matrix(spec, system.centers);
    k.diagonal().array() += system.lambda;
    const double ny = system.targets.norm();
    return (k * alpha - system.targets).norm() / (ny > 0.0 ? ny : 1.0);
}

Solution solve_dense(const RidgeSystem& system, const KernelSpec& spec, DenseOptions options) {
    spec.validate();
    const Eigen::Index n = system.size();
    if (n > options.max_centers) {
        std::ostringstream os;
        os << "dense solve limited to " << options.max_centers << " centers, system has " << n
           << "; use the sparse solver (set a taper)";
        fail(ErrorKind::Capacity, os.str());
    }
    Eigen::MatrixXd k = gram_matrix(spec, system.centers);
    k.diagonal().array() += system.lambda;

    // Eigen's threaded GEMM picks block sizes from the thread count, which would
    // make the factorization depend on --threads.
    Eigen::setNbThreads(1);
    const Eigen::LLT<Eigen::MatrixXd> llt(k);
    if (llt.info() != Eigen::Success) {
        std::ostringstream os;
        os << "Cholesky factorization failed (matrix not positive definite with lambda="
           << system.lambda << "); try a larger lambda";
        fail(ErrorKind::SingularSystem, os.str());
    }
    Eigen::VectorXd alpha = llt.solve(system.targets);
    const double ny = system.targets.norm() > 0.0 ? system.targets.norm() : 1.0;
    Eigen::VectorXd r = system.targets - k * alpha;
    double rel = r.norm() / ny;
    for (int step = 0; step < 5 && rel > 1e-12; ++step) {
        alpha += llt.solve(r);
        r = system.targets - k * alpha;
        const double next = r.norm() / ny;
        if (!(next < rel)) {
            rel = next;
            break;
        }
        rel = next;
    }
    if (!alpha.allFinite()) {
        fail(ErrorKind::SingularSystem, "dense solve produced non-finite coefficients; try a larger lambda");
    }
    if (rel > 1e-8) {
        spdlog::warn("dense solve relative residual {:.3g} exceeds 1e-8 (ill-conditioned system)", rel);
    }
    Solution out;
    out.field = ImplicitField{system.centers, std::move(alpha), spec, SimilarityTransform::identity()};
    out.report.relative_residual = rel;
    out.report.nonzeros = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    return out;
}

namespace {

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, std::int64_t>;

struct CellKey {
    std::int64_t x, y, z;
    bool operator==(const CellKey&) const = default;
};

struct CellHash {
    std::size_t operator()(const CellKey& k) const noexcept {
        std::uint64_t h = static_cast<std::uint64_t>(k.x) * 0x9E3779B97F4A7C15ULL;
        h ^= static_cast<std::uint64_t>(k.y) * 0xC2B2AE3D27D4EB4FULL + (h << 6) + (h >> 2);
        h ^= static_cast<std::uint64_t>(k.z) * 0x165667B19E3779F9ULL + (h << 6) + (h >> 2);
        return static_cast<std::size_t>(h);
    }
};

// Uniform hash grid of cell size h'; every pair closer than h' lies in adjacent cells.
SparseRowMatrix assemble_tapered(const RidgeSystem& system, const KernelSpec& spec) {
    const PointMatrix& c = system.centers;
    const Eigen::Index n = c.rows();
    const Eigen::Index d = c.cols();
    if (d > 3) fail(ErrorKind::InvalidInput, "sparse assembly supports up to 3 dimensions");
    const double cell = spec.taper->h_prime;

    auto coord = [&](Eigen::Index i, int a) { return a < d ? c(i, a) : 0.0; };
    auto key_of = [&](Eigen::Index i) {
        return CellKey{static_cast<std::int64_t>(std::floor(coord(i, 0) / cell)),
                       static_cast<std::int64_t>(std::floor(coord(i, 1) / cell)),
                       static_cast<std::int64_t>(std::floor(coord(i, 2) / cell))};
    };

    std::unordered_map<CellKey, std::vector<Eigen::Index>, CellHash> cells;
    for (Eigen::Index i = 0; i < n; ++i) cells[key_of(i)].push_back(i);

    std::vector<std::vector<std::pair<Eigen::Index, double>>> rows(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic, 64)
    for (Eigen::Index i = 0; i < n; ++i) {
        auto& row = rows[static_cast<std::size_t>(i)];
        const CellKey k = key_of(i);
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
            for (std::int64_t dy = (d > 1 ? -1 : 0); dy <= (d > 1 ? 1 : 0); ++dy) {
                for (std::int64_t dz = (d > 2 ? -1 : 0); dz <= (d > 2 ? 1 : 0); ++dz) {
                    const auto it = cells.find(CellKey{k.x + dx, k.y + dy, k.z + dz});
                    if (it == cells.end()) continue;
                    for (Eigen::Index j : it->second) {
                        double v = eval_kernel(spec, row_span(c, i), row_span(c, j));
                        if (i == j) v += system.lambda;
                        if (v != 0.0) row.emplace_back(j, v);
                    }
                }
            }
        }
        std::sort(row.begin(), row.end());
    }

    std::size_t nnz = 0;
    for (const auto& row : rows) nnz += row.size();
    SparseRowMatrix a(n, n);
    a.reserve(static_cast<Eigen::Index>(nnz));
    for (Eigen::Index i = 0; i < n; ++i) {
        a.startVec(i);
        for (const auto& [j, v] : rows[static_cast<std::size_t>(i)]) a.insertBack(i, j) = v;
    }
    a.finalize();
    return a;
}

void spmv(const SparseRowMatrix& a, const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    const auto* outer = a.outerIndexPtr();
    const auto* inner = a.innerIndexPtr();
    const auto* vals = a.valuePtr();
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (auto p = outer[i]; p < outer[i + 1]; ++p) s += vals[p] * x[inner[p]];
        y[i] = s;
    }
}

}  // namespace

Solution solve_sparse(const RidgeSystem& system, const KernelSpec& spec, SparseOptions options) {
    spec.validate();
    if (!spec.taper) {
        fail(ErrorKind::InvalidInput, "sparse solve requires a tapered kernel (compact support)");
    }
    if (!(options.cg_tol > 0.0) || options.cg_max_iters < 1) {
        fail(ErrorKind::InvalidInput, "cg_tol must be positive and cg_max_iters >= 1");
    }
    const SparseRowMatrix a = assemble_tapered(system, spec);
    const Eigen::Index n = a.rows();
    const Eigen::VectorXd& b = system.targets;

    Eigen::VectorXd inv_diag(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double dii = a.coeff(i, i);
        if (!(dii > 0.0)) fail(ErrorKind::SingularSystem, "non-positive diagonal in tapered system");
        inv_diag[i] = 1.0 / dii;
    }

    const double nb = b.norm() > 0.0 ? b.norm() : 1.0;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd r = b;
    Eigen::VectorXd z = inv_diag.cwiseProduct(r);
    Eigen::VectorXd p = z;
    Eigen::VectorXd ap(n);
    double rz = r.dot(z);
    double rel = r.norm() / nb;
    int it = 0;
    while (rel > options.cg_tol && it < options.cg_max_iters) {
        spmv(a, p, ap);
        const double pap = p.dot(ap);
        if (!(pap > 0.0)) {
            throw IterativeFailure("conjugate gradients broke down (matrix not positive definite)", rel, it);
        }
        const double step = rz / pap;
        x += step * p;
        r -= step * ap;
        ++it;
        rel = r.norm() / nb;
        if (rel <= options.cg_tol) break;
        z = inv_diag.cwiseProduct(r);
        const double rz_next = r.dot(z);
        p = z + (rz_next / rz) * p;
        rz = rz_next;
    }
    // Recompute the true residual; the recursive one drifts.
    spmv(a, x, ap);
    const double true_rel = (b - ap).norm() / nb;
    if (rel > options.cg_tol) {
        std::ostringstream os;
        os << "conjugate gradients did not converge in " << it << " iterations (relative residual "
           << true_rel << ", tolerance " << options.cg_tol << ")";
        throw IterativeFailure(os.str(), true_rel, it);
    }
    Solution out;
    out.field = ImplicitField{system.centers, std::move(x), spec, SimilarityTransform::identity()};
    out.report.relative_residual = true_rel;
    out.report.iterations = it;
    out.report.nonzeros = static_cast<std::size_t>(a.nonZeros());
    out.report.sparse = true;
    return out;
}

Solution solve(const RidgeSystem& system, const KernelSpec& spec, DenseOptions dense,
               SparseOptions sparse) {
    if (spec.taper) return solve_sparse(system, spec, sparse);
    return solve_dense(system, spec, dense);
}

}  // namespace matern
