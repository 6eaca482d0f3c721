#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include <matern/krr.hpp>
#include <matern/shapes.hpp>
#include <matern/types.hpp>

namespace test {

inline matern::PointMatrix random_points(int n, int d, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    matern::PointMatrix p(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) p(i, j) = u(rng);
    return p;
}

inline matern::OrientedPointCloud sphere_cloud(int n, double radius, std::uint64_t seed) {
    return matern::shapes::to_cloud(matern::shapes::sphere_samples(n, radius, seed));
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline std::string data_path(const std::string& name) { return std::string(MATERN_TEST_DATA) + "/" + name; }

}  // namespace test
