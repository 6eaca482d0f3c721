#pragma once

#include <cstddef>

#include <Eigen/Core>

#include "matern/kernel.hpp"
#include "matern/types.hpp"

namespace matern {

/// Surface samples with unit normals, one per row.
struct OrientedPointCloud {
    PointMatrix points;
    PointMatrix normals;

    /// Validates finiteness and shape, and rescales normals to unit length.
    /// Throws InvalidInput naming the first offending row.
    static OrientedPointCloud make(PointMatrix points, PointMatrix normals);

    Eigen::Index size() const { return points.rows(); }
    Eigen::Index dim() const { return points.cols(); }
};

/// Finite-difference ridge system: centers p_i + eps n_i (targets +eps) followed
/// by p_i - eps n_i (targets -eps).
struct RidgeSystem {
    PointMatrix centers;
    Eigen::VectorXd targets;
    double epsilon = 0.005;
    double lambda = 1e-10;
    /// Smallest distance between two distinct centers (0 when some coincide).
    double min_center_distance = 0.0;

    Eigen::Index size() const { return centers.rows(); }
};

/// f(x) = sum_i alpha_i k(T x, c_i), with T the world-to-normalized transform.
struct ImplicitField {
    PointMatrix centers;
    Eigen::VectorXd alpha;
    KernelSpec spec;
    SimilarityTransform transform;

    void validate() const;
};

struct SolveReport {
    double relative_residual = 0.0;
    int iterations = 0;
    std::size_t nonzeros = 0;
    bool sparse = false;
};

struct Solution {
    ImplicitField field;
    SolveReport report;
};

inline constexpr double kDefaultEpsilon = 0.005;
inline constexpr double kDefaultLambda = 1e-10;
inline constexpr Eigen::Index kDefaultDenseLimit = 20000;

RidgeSystem build_system(const OrientedPointCloud& cloud, double epsilon = kDefaultEpsilon,
                         double lambda = kDefaultLambda);

struct DenseOptions {
    Eigen::Index max_centers = kDefaultDenseLimit;
};

/// Cholesky solve of (K + lambda I) alpha = y with a few steps of iterative
/// refinement. Throws SingularSystem when factorization fails and Capacity when
/// the system exceeds the dense limit.
Solution solve_dense(const RidgeSystem& system, const KernelSpec& spec, DenseOptions options = {});

struct SparseOptions {
    double cg_tol = 1e-12;
    int cg_max_iters = 20000;
};

/// Jacobi-preconditioned conjugate gradients on the tapered (sparse) system.
/// Throws IterativeFailure carrying the final residual when it does not converge.
Solution solve_sparse(const RidgeSystem& system, const KernelSpec& spec, SparseOptions options = {});

/// Convenience: sparse when the spec has a taper, dense otherwise.
Solution solve(const RidgeSystem& system, const KernelSpec& spec, DenseOptions dense = {},
               SparseOptions sparse = {});

/// Relative residual ||(K + lambda I) alpha - y|| / ||y|| recomputed from scratch.
double relative_residual(const RidgeSystem& system, const KernelSpec& spec,
                         const Eigen::VectorXd& alpha);

}  // namespace matern
