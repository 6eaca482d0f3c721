#pragma once

#include <functional>
#include <utility>

#include "matern/field.hpp"
#include "matern/kernel.hpp"
#include "matern/krr.hpp"
#include "matern/mesh.hpp"

namespace matern {

inline constexpr double kDefaultPadding = 0.05;
inline constexpr int kDefaultResolution = 128;
/// Half-width of the sampled cube in normalized coordinates.
inline constexpr double kExtractionHalfWidth = 0.55;

/// Scales and centers a cloud isotropically so its bounding box fits in
/// [-0.5 + padding, 0.5 - padding]^3. Normals are unchanged.
/// A single point is translated to the origin with unit scale.
std::pair<OrientedPointCloud, SimilarityTransform> normalize(const OrientedPointCloud& cloud,
                                                             double padding = kDefaultPadding);

/// Anything Marching Cubes can mesh: lattice sampling plus a gradient for
/// vertex normals, both in normalized coordinates.
class SurfaceField {
public:
    virtual ~SurfaceField() = default;
    virtual ScalarGrid sample(const GridSpec& grid) const = 0;
    virtual Vec3 gradient(const Vec3& normalized) const = 0;
    virtual SimilarityTransform transform() const { return SimilarityTransform::identity(); }
};

/// Adapter over a solved kernel expansion.
class KernelSurfaceField final : public SurfaceField {
public:
    explicit KernelSurfaceField(const ImplicitField& field) : field_(field) {}
    ScalarGrid sample(const GridSpec& grid) const override { return eval_grid(field_, grid); }
    Vec3 gradient(const Vec3& x) const override { return gradient_auto(field_, x); }
    SimilarityTransform transform() const override { return field_.transform; }

private:
    const ImplicitField& field_;
};

/// Closed-form field given by two callables (used for analytic test surfaces).
class FunctionSurfaceField final : public SurfaceField {
public:
    FunctionSurfaceField(std::function<double(const Vec3&)> value,
                         std::function<Vec3(const Vec3&)> grad,
                         SimilarityTransform transform = SimilarityTransform::identity())
        : value_(std::move(value)), grad_(std::move(grad)), transform_(transform) {}

    ScalarGrid sample(const GridSpec& grid) const override;
    Vec3 gradient(const Vec3& x) const override { return grad_(x); }
    SimilarityTransform transform() const override { return transform_; }

private:
    std::function<double(const Vec3&)> value_;
    std::function<Vec3(const Vec3&)> grad_;
    SimilarityTransform transform_;
};

/// Marching Cubes on a lattice with linear edge interpolation. Vertices are in
/// lattice coordinates (grid.spec.node space); triangles wind counter-clockwise
/// when seen from the side where the field exceeds iso. No vertex normals.
TriangleMesh marching_cubes(const ScalarGrid& grid, double iso = 0.0);

/// Samples [-0.55, 0.55]^3 at `resolution` nodes per axis, meshes the iso level,
/// maps the result to world coordinates and attaches normals along grad f.
/// Throws EmptySurface when the field never crosses iso.
TriangleMesh extract_surface(const SurfaceField& field, int resolution = kDefaultResolution,
                             double iso = 0.0);
TriangleMesh extract_surface(const ImplicitField& field, int resolution = kDefaultResolution,
                             double iso = 0.0);

struct ReconstructOptions {
    double epsilon = kDefaultEpsilon;
    double lambda = kDefaultLambda;
    int resolution = kDefaultResolution;
    double padding = kDefaultPadding;
    DenseOptions dense;
    SparseOptions sparse;
};

struct StageTimings {
    double normalize_s = 0.0;
    double assembly_s = 0.0;
    double solve_s = 0.0;
    double extraction_s = 0.0;
};

struct Reconstruction {
    TriangleMesh mesh;
    ImplicitField field;
    SolveReport solve;
    StageTimings timings;
};

/// normalize -> build_system -> solve (sparse when tapered, dense otherwise)
/// -> extract_surface. Errors are re-raised with the failing stage in the message.
Reconstruction reconstruct(const OrientedPointCloud& cloud, const KernelSpec& spec,
                           const ReconstructOptions& options = {});

}  // namespace matern
