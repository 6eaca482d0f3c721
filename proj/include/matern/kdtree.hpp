#pragma once

#include <cstdint>
#include <vector>

#include "matern/types.hpp"

namespace matern {

/// Static 3-D k-d tree over a point set for exact nearest-neighbor queries.
/// Leaves hold up to kLeafSize points; splits are on the widest axis at the median.
class KdTree3 {
public:
    struct Hit {
        std::int64_t index = -1;
        double distance = 0.0;
    };

    explicit KdTree3(const PointMatrix& points);

    /// Exact nearest neighbor; ties resolve to the lowest index.
    Hit nearest(const Vec3& query) const;

    /// Nearest neighbor other than `self` (for closest-pair style checks).
    Hit nearest_excluding(const Vec3& query, std::int64_t self) const;

    /// Indices of all points within `radius` (inclusive), ascending.
    std::vector<std::int64_t> within(const Vec3& query, double radius) const;

    std::int64_t size() const { return static_cast<std::int64_t>(order_.size()); }

private:
    static constexpr int kLeafSize = 8;

    struct Node {
        double lo[3];
        double hi[3];
        std::int32_t begin = 0;
        std::int32_t end = 0;
        std::int32_t left = -1;
        std::int32_t right = -1;
    };

    std::int32_t build(std::int32_t begin, std::int32_t end);
    void search(std::int32_t node, const double* q, std::int64_t exclude, Hit& best,
                double& best_d2) const;
    void collect(std::int32_t node, const double* q, double r2, std::vector<std::int64_t>& out) const;

    std::vector<double> coords_;  // x,y,z per point in original index order
    std::vector<std::int32_t> order_;
    std::vector<Node> nodes_;
};

}  // namespace matern
