#include "matern/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "matern/error.hpp"

namespace matern {

KdTree3::KdTree3(const PointMatrix& points) {
    if (points.cols() != 3) fail(ErrorKind::InvalidInput, "KdTree3 expects n x 3 points");
    if (points.rows() > std::numeric_limits<std::int32_t>::max()) {
        fail(ErrorKind::Capacity, "KdTree3: too many points");
    }
    const auto n = static_cast<std::int32_t>(points.rows());
    coords_.assign(points.data(), points.data() + 3 * static_cast<std::size_t>(n));
    order_.resize(static_cast<std::size_t>(n));
    for (std::int32_t i = 0; i < n; ++i) order_[static_cast<std::size_t>(i)] = i;
    if (n > 0) {
        nodes_.reserve(static_cast<std::size_t>(2 * (n / kLeafSize + 1)));
        build(0, n);
    }
}

std::int32_t KdTree3::build(std::int32_t begin, std::int32_t end) {
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.emplace_back();
    Node node;
    node.begin = begin;
    node.end = end;
    for (int a = 0; a < 3; ++a) {
        node.lo[a] = std::numeric_limits<double>::infinity();
        node.hi[a] = -std::numeric_limits<double>::infinity();
    }
    for (std::int32_t i = begin; i < end; ++i) {
        const double* p = &coords_[3 * static_cast<std::size_t>(order_[static_cast<std::size_t>(i)])];
        for (int a = 0; a < 3; ++a) {
            node.lo[a] = std::min(node.lo[a], p[a]);
            node.hi[a] = std::max(node.hi[a], p[a]);
        }
    }
    if (end - begin > kLeafSize) {
        int axis = 0;
        for (int a = 1; a < 3; ++a) {
            if (node.hi[a] - node.lo[a] > node.hi[axis] - node.lo[axis]) axis = a;
        }
        const std::int32_t mid = begin + (end - begin) / 2;
        auto first = order_.begin() + begin;
        std::nth_element(first, order_.begin() + mid, order_.begin() + end,
                         [&](std::int32_t a, std::int32_t b) {
                             const double va = coords_[3 * static_cast<std::size_t>(a) + axis];
                             const double vb = coords_[3 * static_cast<std::size_t>(b) + axis];
                             return va < vb || (va == vb && a < b);
                         });
        node.left = build(begin, mid);
        node.right = build(mid, end);
    }
    nodes_[static_cast<std::size_t>(id)] = node;
    return id;
}

namespace {

double box_distance2(const double* lo, const double* hi, const double* q) {
    double d2 = 0.0;
    for (int a = 0; a < 3; ++a) {
        double d = 0.0;
        if (q[a] < lo[a]) d = lo[a] - q[a];
        else if (q[a] > hi[a]) d = q[a] - hi[a];
        d2 += d * d;
    }
    return d2;
}

}  // namespace

void KdTree3::search(std::int32_t id, const double* q, std::int64_t exclude, Hit& best,
                     double& best_d2) const {
    const Node& node = nodes_[static_cast<std::size_t>(id)];
    if (box_distance2(node.lo, node.hi, q) > best_d2) return;
    if (node.left < 0) {
        for (std::int32_t i = node.begin; i < node.end; ++i) {
            const std::int32_t idx = order_[static_cast<std::size_t>(i)];
            if (idx == exclude) continue;
            const double* p = &coords_[3 * static_cast<std::size_t>(idx)];
            const double dx = p[0] - q[0];
            const double dy = p[1] - q[1];
            const double dz = p[2] - q[2];
            const double d2 = dx * dx + dy * dy + dz * dz;
            if (d2 < best_d2 || (d2 == best_d2 && idx < best.index)) {
                best_d2 = d2;
                best.index = idx;
            }
        }
        return;
    }
    const Node& l = nodes_[static_cast<std::size_t>(node.left)];
    const Node& r = nodes_[static_cast<std::size_t>(node.right)];
    const double dl = box_distance2(l.lo, l.hi, q);
    const double dr = box_distance2(r.lo, r.hi, q);
    if (dl <= dr) {
        search(node.left, q, exclude, best, best_d2);
        search(node.right, q, exclude, best, best_d2);
    } else {
        search(node.right, q, exclude, best, best_d2);
        search(node.left, q, exclude, best, best_d2);
    }
}

KdTree3::Hit KdTree3::nearest(const Vec3& query) const { return nearest_excluding(query, -1); }

KdTree3::Hit KdTree3::nearest_excluding(const Vec3& query, std::int64_t self) const {
    Hit best;
    if (nodes_.empty()) return best;
    double best_d2 = std::numeric_limits<double>::infinity();
    const double q[3] = {query.x(), query.y(), query.z()};
    search(0, q, self, best, best_d2);
    best.distance = std::sqrt(best_d2);
    return best;
}

void KdTree3::collect(std::int32_t id, const double* q, double r2, std::vector<std::int64_t>& out) const {
    const Node& node = nodes_[static_cast<std::size_t>(id)];
    if (box_distance2(node.lo, node.hi, q) > r2) return;
    if (node.left < 0) {
        for (std::int32_t i = node.begin; i < node.end; ++i) {
            const std::int32_t idx = order_[static_cast<std::size_t>(i)];
            const double* p = &coords_[3 * static_cast<std::size_t>(idx)];
            const double dx = p[0] - q[0];
            const double dy = p[1] - q[1];
            const double dz = p[2] - q[2];
            if (dx * dx + dy * dy + dz * dz <= r2) out.push_back(idx);
        }
        return;
    }
    collect(node.left, q, r2, out);
    collect(node.right, q, r2, out);
}

std::vector<std::int64_t> KdTree3::within(const Vec3& query, double radius) const {
    std::vector<std::int64_t> out;
    if (nodes_.empty() || !(radius >= 0.0)) return out;
    const double q[3] = {query.x(), query.y(), query.z()};
    collect(0, q, radius * radius, out);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace matern
