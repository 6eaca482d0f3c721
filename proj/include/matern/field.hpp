#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "matern/krr.hpp"
#include "matern/types.hpp"

namespace matern {

/// Regular lattice with isotropic spacing; node (i, j, k) sits at
/// origin + spacing * (i, j, k).
struct GridSpec {
    std::array<int, 3> resolution{2, 2, 2};
    Vec3 origin = Vec3::Zero();
    double spacing = 1.0;

    /// Cube [lo, hi]^3 sampled with `resolution` nodes per axis.
    static GridSpec cube(double lo, double hi, int resolution);

    std::size_t node_count() const {
        return static_cast<std::size_t>(resolution[0]) * static_cast<std::size_t>(resolution[1]) *
               static_cast<std::size_t>(resolution[2]);
    }

    /// Out of line so callers share the library's rounding of origin + spacing * i.
    Vec3 node(int i, int j, int k) const;
};

/// Field samples in x-fastest order.
struct ScalarGrid {
    GridSpec spec;
    std::vector<double> values;

    std::size_t index(int i, int j, int k) const {
        const auto nx = static_cast<std::size_t>(spec.resolution[0]);
        const auto ny = static_cast<std::size_t>(spec.resolution[1]);
        return static_cast<std::size_t>(i) + nx * (static_cast<std::size_t>(j) + ny * static_cast<std::size_t>(k));
    }
    double at(int i, int j, int k) const { return values[index(i, j, k)]; }
};

struct GridOptions {
    /// Upper bound on the number of lattice nodes (memory cap).
    std::size_t max_nodes = std::size_t{1100} * 1100 * 1100;
};

/// f(x). When in_world_coords is set, x is first mapped through field.transform.
double eval(const ImplicitField& field, const Vec3& x, bool in_world_coords = false);

/// Evaluates the field at every node of a lattice given in normalized coordinates.
/// Bit-identical to calling eval() on each node.
ScalarGrid eval_grid(const ImplicitField& field, const GridSpec& grid, GridOptions options = {});

enum class GradientMode { Analytic, CentralDiff };

inline constexpr double kDefaultDiffStep = 1e-4;

/// Gradient with respect to the coordinates x is given in.
/// Analytic mode throws UnsupportedGradient for Matern 1/2 and arc-cosine kernels.
Vec3 gradient(const ImplicitField& field, const Vec3& x, GradientMode mode = GradientMode::Analytic,
              double step = kDefaultDiffStep, bool in_world_coords = false);

/// Analytic gradient when the kernel has one, central differences otherwise.
Vec3 gradient_auto(const ImplicitField& field, const Vec3& x, bool in_world_coords = false);

}  // namespace matern
