#pragma once

// Inlined kernel evaluators shared by the kernel module and the field
// evaluator. Each functor maps (query, center) in R^3 to k(query, center).

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Core>

#include "matern/kernel.hpp"

namespace matern::detail {

/// Centers split into coordinate columns so blocks of them vectorize.
struct CenterColumns {
    std::vector<double> x, y, z;

    explicit CenterColumns(const PointMatrix& c) {
        const auto n = static_cast<std::size_t>(c.rows());
        x.resize(n);
        y.resize(n);
        z.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto r = static_cast<Eigen::Index>(i);
            x[i] = c(r, 0);
            y[i] = c(r, 1);
            z[i] = c(r, 2);
        }
    }
};

inline constexpr Eigen::Index kLaneBlock = 256;
using LaneArray = Eigen::Array<double, Eigen::Dynamic, 1, 0, kLaneBlock, 1>;
using ConstLaneMap = Eigen::Map<const Eigen::Array<double, Eigen::Dynamic, 1>>;

inline LaneArray block_distances(const double* q, const CenterColumns& c, Eigen::Index begin,
                                 Eigen::Index count) {
    const auto b = static_cast<std::size_t>(begin);
    const LaneArray dx = ConstLaneMap(c.x.data() + b, count) - q[0];
    const LaneArray dy = ConstLaneMap(c.y.data() + b, count) - q[1];
    const LaneArray dz = ConstLaneMap(c.z.data() + b, count) - q[2];
    return (dx.square() + dy.square() + dz.square()).sqrt();
}

/// Scalar fallback: out[i] = k(q, c_{begin+i}).
template <class Kernel>
void scalar_block(const Kernel& kernel, const double* q, const CenterColumns& c, Eigen::Index begin,
                  Eigen::Index count, double* out) {
    for (Eigen::Index i = 0; i < count; ++i) {
        const auto k = static_cast<std::size_t>(begin + i);
        const double p[3] = {c.x[k], c.y[k], c.z[k]};
        out[i] = kernel(q, p);
    }
}

inline double dist3(const double* q, const double* c) {
    const double dx = q[0] - c[0];
    const double dy = q[1] - c[1];
    const double dz = q[2] - c[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

struct Matern12 {
    double h;
    double radial(double tau) const { return std::exp(-tau / h); }
    LaneArray radial(const LaneArray& tau) const { return (-tau / h).exp(); }
};

struct Matern32 {
    double h;
    double radial(double tau) const {
        const double a = 1.7320508075688772 * tau / h;
        return std::exp(-a) * (1.0 + a);
    }
    LaneArray radial(const LaneArray& tau) const {
        const LaneArray a = 1.7320508075688772 * tau / h;
        return (-a).exp() * (1.0 + a);
    }
};

struct Matern52 {
    double h;
    double radial(double tau) const {
        const double a = 2.23606797749979 * tau / h;
        return std::exp(-a) * (1.0 + a + a * a / 3.0);
    }
    LaneArray radial(const LaneArray& tau) const {
        const LaneArray a = 2.23606797749979 * tau / h;
        return (-a).exp() * (1.0 + a + a.square() / 3.0);
    }
};

struct Gaussian {
    double h;
    double radial(double tau) const {
        const double r = tau / h;
        return std::exp(-0.5 * r * r);
    }
    LaneArray radial(const LaneArray& tau) const { return (-0.5 * (tau / h).square()).exp(); }
};

template <class Radial>
struct Stationary {
    Radial profile;
    double operator()(const double* q, const double* c) const { return profile.radial(dist3(q, c)); }
    void block(const double* q, const CenterColumns& c, Eigen::Index begin, Eigen::Index count,
               double* out) const {
        Eigen::Map<Eigen::Array<double, Eigen::Dynamic, 1>>(out, count) =
            profile.radial(block_distances(q, c, begin, count));
    }
};

template <class Radial>
struct TaperedStationary {
    Radial profile;
    double nu_prime;
    double h_prime;
    double operator()(const double* q, const double* c) const {
        const double tau = dist3(q, c);
        if (tau >= h_prime) return 0.0;
        return profile.radial(tau) * std::pow(1.0 - tau / h_prime, nu_prime);
    }
    void block(const double* q, const CenterColumns& c, Eigen::Index begin, Eigen::Index count,
               double* out) const {
        scalar_block(*this, q, c, begin, count, out);
    }
};

/// First-order arc-cosine kernel from xx = |x|^2, yy = |y|^2, wedge = |x ^ y| and
/// dot = x . y: (|x||y| sin(theta) + (pi - theta) x . y) / pi with
/// |x||y| sin(theta) = wedge. Near theta = pi the two terms cancel, so that branch
/// uses phi = pi - theta and the series of sin(phi) - phi cos(phi).
inline double arc_cosine_value(double xx, double yy, double wedge, double dot) {
    if (dot >= 0.0) return (wedge + (std::numbers::pi - std::atan2(wedge, dot)) * dot) / std::numbers::pi;
    const double phi = std::atan2(wedge, -dot);
    if (phi >= 0.25) return (wedge + phi * dot) / std::numbers::pi;
    const double p2 = phi * phi;
    // sum_k (-1)^(k+1) 2k / (2k+1)! phi^(2k+1), k = 1..7
    double s = -14.0 / 1307674368000.0;
    s = s * p2 + 12.0 / 6227020800.0;
    s = s * p2 - 10.0 / 39916800.0;
    s = s * p2 + 8.0 / 362880.0;
    s = s * p2 - 6.0 / 5040.0;
    s = s * p2 + 4.0 / 120.0;
    s = s * p2 - 2.0 / 6.0;
    return std::sqrt(xx) * std::sqrt(yy) / std::numbers::pi * (-s * p2 * phi);
}

struct ArcCosine3 {
    double operator()(const double* q, const double* c) const {
        const double xx = q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
        const double yy = c[0] * c[0] + c[1] * c[1] + c[2] * c[2];
        if (xx == 0.0 || yy == 0.0) return 0.0;
        const double xy = q[0] * c[0] + q[1] * c[1] + q[2] * c[2];
        const double w0 = q[1] * c[2] - q[2] * c[1];
        const double w1 = q[2] * c[0] - q[0] * c[2];
        const double w2 = q[0] * c[1] - q[1] * c[0];
        const double wedge = std::sqrt(w2 * w2 + w1 * w1 + w0 * w0);
        return arc_cosine_value(xx, yy, wedge, xy);
    }
    void block(const double* q, const CenterColumns& c, Eigen::Index begin, Eigen::Index count,
               double* out) const {
        scalar_block(*this, q, c, begin, count, out);
    }
};

struct TaperedArcCosine3 {
    double nu_prime;
    double h_prime;
    double operator()(const double* q, const double* c) const {
        const double tau = dist3(q, c);
        if (tau >= h_prime) return 0.0;
        return ArcCosine3{}(q, c) * std::pow(1.0 - tau / h_prime, nu_prime);
    }
    void block(const double* q, const CenterColumns& c, Eigen::Index begin, Eigen::Index count,
               double* out) const {
        scalar_block(*this, q, c, begin, count, out);
    }
};

/// Calls fn with the concrete evaluator for a 3-D spec.
template <class Fn>
decltype(auto) dispatch3(const KernelSpec& spec, Fn&& fn) {
    auto with_radial = [&](auto radial) -> decltype(auto) {
        using R = decltype(radial);
        if (spec.taper) {
            return fn(TaperedStationary<R>{radial, spec.taper->nu_prime, spec.taper->h_prime});
        }
        return fn(Stationary<R>{radial});
    };
    switch (spec.family) {
        case KernelFamily::ArcCosine:
            if (spec.taper) return fn(TaperedArcCosine3{spec.taper->nu_prime, spec.taper->h_prime});
            return fn(ArcCosine3{});
        case KernelFamily::Gaussian:
            return with_radial(Gaussian{spec.h});
        case KernelFamily::Matern:
            break;
    }
    if (spec.nu < 1.0) return with_radial(Matern12{spec.h});
    if (spec.nu < 2.0) return with_radial(Matern32{spec.h});
    return with_radial(Matern52{spec.h});
}

}  // namespace matern::detail
