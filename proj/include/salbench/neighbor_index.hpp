#pragma once

#include <salbench/core.hpp>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <span>
#include <vector>

namespace salbench {

struct Neighbor {
  std::uint32_t index = 0;
  double dist2 = 0.0;

  friend bool operator<(const Neighbor& a, const Neighbor& b) {
    return a.dist2 < b.dist2 || (a.dist2 == b.dist2 && a.index < b.index);
  }
};

/// Static k-d tree over a point set. Read-only after construction, so one
/// instance can be shared across threads.
///
/// Result lists are sorted by (distance, index). Queries by point index
/// exclude that point from the result.
class NeighborIndex {
 public:
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

  explicit NeighborIndex(std::span<const Vec3> points) : points_(points.begin(), points.end()) {
    if (points_.empty()) throw Error("cannot build a neighbor index over an empty point set");
    order_.resize(points_.size());
    std::iota(order_.begin(), order_.end(), 0u);
    nodes_.reserve(2 * points_.size() / kLeafSize + 2);
    build(0, static_cast<std::uint32_t>(order_.size()));
  }

  std::size_t size() const { return points_.size(); }
  const Vec3& point(std::size_t i) const { return points_[i]; }
  std::span<const Vec3> points() const { return points_; }

  /// Every point with ‖p − query‖ < radius.
  std::vector<Neighbor> radius_search(const Vec3& query, double radius,
                                      std::uint32_t exclude = kNone) const {
    std::vector<Neighbor> out;
    if (radius <= 0.0) return out;
    radius_recurse(0, query, radius * radius, exclude, out);
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<Neighbor> radius_search(std::uint32_t i, double radius) const {
    return radius_search(points_[i], radius, i);
  }

  /// The k closest points (fewer if the set is smaller).
  std::vector<Neighbor> knn(const Vec3& query, std::size_t k, std::uint32_t exclude = kNone) const {
    std::vector<Neighbor> heap;
    if (k == 0) return heap;
    heap.reserve(k + 1);
    knn_recurse(0, query, k, exclude, heap);
    std::sort_heap(heap.begin(), heap.end());
    return heap;
  }

  std::vector<Neighbor> knn(std::uint32_t i, std::size_t k) const { return knn(points_[i], k, i); }

  Neighbor nearest(const Vec3& query) const {
    auto r = knn(query, 1);
    return r.front();
  }

 private:
  static constexpr std::uint32_t kLeafSize = 8;

  struct Node {
    std::uint32_t begin = 0, end = 0;   // range into order_ (leaves)
    std::uint32_t left = 0, right = 0;  // children (internal nodes)
    int axis = -1;                      // -1 marks a leaf
    double split = 0.0;
  };

  std::uint32_t build(std::uint32_t begin, std::uint32_t end) {
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(Node{begin, end, 0, 0, -1, 0.0});
    if (end - begin <= kLeafSize) return id;

    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    for (auto i = begin; i < end; ++i) {
      lo = lo.cwiseMin(points_[order_[i]]);
      hi = hi.cwiseMax(points_[order_[i]]);
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);
    if (hi[axis] - lo[axis] <= 0.0) return id;  // all coincident: keep as leaf

    const auto mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                       return points_[a][axis] < points_[b][axis] ||
                              (points_[a][axis] == points_[b][axis] && a < b);
                     });
    const double split = points_[order_[mid]][axis];
    const auto left = build(begin, mid);
    const auto right = build(mid, end);
    nodes_[id].axis = axis;
    nodes_[id].split = split;
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  void radius_recurse(std::uint32_t id, const Vec3& q, double r2, std::uint32_t exclude,
                      std::vector<Neighbor>& out) const {
    const Node& node = nodes_[id];
    if (node.axis < 0) {
      for (auto i = node.begin; i < node.end; ++i) {
        const auto idx = order_[i];
        if (idx == exclude) continue;
        const double d2 = (points_[idx] - q).squaredNorm();
        if (d2 < r2) out.push_back(Neighbor{idx, d2});
      }
      return;
    }
    const double diff = q[node.axis] - node.split;
    // Left holds coordinates <= split, right holds >= split.
    if (diff <= 0.0 || diff * diff < r2) radius_recurse(node.left, q, r2, exclude, out);
    if (diff >= 0.0 || diff * diff < r2) radius_recurse(node.right, q, r2, exclude, out);
  }

  void knn_recurse(std::uint32_t id, const Vec3& q, std::size_t k, std::uint32_t exclude,
                   std::vector<Neighbor>& heap) const {
    const Node& node = nodes_[id];
    if (node.axis < 0) {
      for (auto i = node.begin; i < node.end; ++i) {
        const auto idx = order_[i];
        if (idx == exclude) continue;
        const Neighbor cand{idx, (points_[idx] - q).squaredNorm()};
        if (heap.size() < k) {
          heap.push_back(cand);
          std::push_heap(heap.begin(), heap.end());
        } else if (cand < heap.front()) {
          std::pop_heap(heap.begin(), heap.end());
          heap.back() = cand;
          std::push_heap(heap.begin(), heap.end());
        }
      }
      return;
    }
    const double diff = q[node.axis] - node.split;
    const auto near = diff <= 0.0 ? node.left : node.right;
    const auto far = diff <= 0.0 ? node.right : node.left;
    knn_recurse(near, q, k, exclude, heap);
    // <= keeps equal-distance candidates with smaller indices reachable.
    if (heap.size() < k || diff * diff <= heap.front().dist2) knn_recurse(far, q, k, exclude, heap);
  }

  std::vector<Vec3> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace salbench
