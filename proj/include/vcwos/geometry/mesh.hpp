// SPDX-License-Identifier: Apache-2.0
#pragma once

// Discrete boundaries: line segments in 2D and triangles in 3D, indexed by a
// bounding volume hierarchy for closest-point and ray-crossing queries.

#include "vcwos/geometry/aabb.hpp"
#include "vcwos/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace vcwos {

template <int Dim>
struct BoundaryHit {
    double distance = std::numeric_limits<double>::infinity();
    Vec<Dim> point = Vec<Dim>::Zero();
    int element = -1;
};

namespace mesh_detail {

inline Vec<2> closest_on_segment(const Vec<2>& p, const Vec<2>& a, const Vec<2>& b) {
    const Vec<2> ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 == 0.0) {
        return a;
    }
    const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return a + t * ab;
}

// Closest point on triangle abc to p, by Voronoi region classification.
inline Vec<3> closest_on_triangle(const Vec<3>& p, const Vec<3>& a, const Vec<3>& b, const Vec<3>& c) {
    const Vec<3> ab = b - a;
    const Vec<3> ac = c - a;
    const Vec<3> ap = p - a;
    const double d1 = ab.dot(ap);
    const double d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) {
        return a;
    }
    const Vec<3> bp = p - b;
    const double d3 = ab.dot(bp);
    const double d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) {
        return b;
    }
    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
        return a + d1 / (d1 - d3) * ab;
    }
    const Vec<3> cp = p - c;
    const double d5 = ab.dot(cp);
    const double d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) {
        return c;
    }
    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
        return a + d2 / (d2 - d6) * ac;
    }
    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        return b + (d4 - d3) / ((d4 - d3) + (d5 - d6)) * (c - b);
    }
    const double denom = 1.0 / (va + vb + vc);
    return a + ab * (vb * denom) + ac * (vc * denom);
}

inline bool ray_crosses_segment(const Vec<2>& o, const Vec<2>& d, const Vec<2>& a, const Vec<2>& b) {
    const Vec<2> e = b - a;
    const double denom = d.x() * e.y() - d.y() * e.x();
    if (denom == 0.0) {
        return false;
    }
    const Vec<2> ao = a - o;
    const double t = (ao.x() * e.y() - ao.y() * e.x()) / denom;
    const double s = (ao.x() * d.y() - ao.y() * d.x()) / denom;
    return t > 0.0 && s >= 0.0 && s < 1.0;
}

// Moller-Trumbore.
inline bool ray_crosses_triangle(const Vec<3>& o, const Vec<3>& d, const Vec<3>& a, const Vec<3>& b, const Vec<3>& c) {
    const Vec<3> e1 = b - a;
    const Vec<3> e2 = c - a;
    const Vec<3> pv = d.cross(e2);
    const double det = e1.dot(pv);
    if (std::abs(det) < 1e-300) {
        return false;
    }
    const double inv = 1.0 / det;
    const Vec<3> tv = o - a;
    const double u = tv.dot(pv) * inv;
    if (u < 0.0 || u > 1.0) {
        return false;
    }
    const Vec<3> qv = tv.cross(e1);
    const double v = d.dot(qv) * inv;
    if (v < 0.0 || u + v > 1.0) {
        return false;
    }
    return e2.dot(qv) * inv > 0.0;
}

}  // namespace mesh_detail

/// Closed boundary made of segments (Dim = 2) or triangles (Dim = 3).
template <int Dim>
class DiscreteBoundary {
public:
    using Element = std::array<int, Dim>;

    DiscreteBoundary(std::vector<Vec<Dim>> vertices, std::vector<Element> elements)
        : vertices_(std::move(vertices)), elements_(std::move(elements)) {
        if (elements_.empty()) {
            throw std::invalid_argument("DiscreteBoundary: no elements");
        }
        for (const auto& e : elements_) {
            for (int v : e) {
                if (v < 0 || v >= static_cast<int>(vertices_.size())) {
                    throw std::invalid_argument("DiscreteBoundary: vertex index out of range");
                }
            }
        }
        build();
    }

    std::size_t size() const { return elements_.size(); }
    const std::vector<Vec<Dim>>& vertices() const { return vertices_; }
    const std::vector<Element>& elements() const { return elements_; }
    Aabb<Dim> bounds() const { return nodes_.front().box; }

    Vec<Dim> closest_on_element(int index, const Vec<Dim>& p) const {
        const Element& e = elements_[static_cast<std::size_t>(index)];
        if constexpr (Dim == 2) {
            return mesh_detail::closest_on_segment(p, vertex(e[0]), vertex(e[1]));
        } else {
            return mesh_detail::closest_on_triangle(p, vertex(e[0]), vertex(e[1]), vertex(e[2]));
        }
    }

    BoundaryHit<Dim> closest(const Vec<Dim>& p) const {
        BoundaryHit<Dim> best;
        double best_d2 = std::numeric_limits<double>::infinity();
        std::array<std::pair<int, double>, 128> stack;
        int top = 0;
        stack[top++] = {0, nodes_[0].box.squared_distance(p)};
        while (top > 0) {
            const auto [index, bound] = stack[--top];
            if (bound > best_d2) {
                continue;
            }
            const Node& node = nodes_[static_cast<std::size_t>(index)];
            if (node.count > 0) {
                for (int i = node.first; i < node.first + node.count; ++i) {
                    const int element = order_[static_cast<std::size_t>(i)];
                    const Vec<Dim> q = closest_on_element(element, p);
                    const double d2 = (q - p).squaredNorm();
                    // Ties go to the lowest element index, matching the brute-force scan.
                    if (d2 < best_d2 || (d2 == best_d2 && element < best.element)) {
                        best_d2 = d2;
                        best.point = q;
                        best.element = element;
                    }
                }
                continue;
            }
            const double dl = nodes_[static_cast<std::size_t>(node.left)].box.squared_distance(p);
            const double dr = nodes_[static_cast<std::size_t>(node.right)].box.squared_distance(p);
            // Push the farther child first so the nearer one is searched first.
            if (dl < dr) {
                stack[top++] = {node.right, dr};
                stack[top++] = {node.left, dl};
            } else {
                stack[top++] = {node.left, dl};
                stack[top++] = {node.right, dr};
            }
        }
        best.distance = std::sqrt(best_d2);
        return best;
    }

    BoundaryHit<Dim> closest_brute_force(const Vec<Dim>& p) const {
        BoundaryHit<Dim> best;
        double best_d2 = std::numeric_limits<double>::infinity();
        for (int i = 0; i < static_cast<int>(elements_.size()); ++i) {
            const Vec<Dim> q = closest_on_element(i, p);
            const double d2 = (q - p).squaredNorm();
            if (d2 < best_d2) {
                best_d2 = d2;
                best.point = q;
                best.element = i;
            }
        }
        best.distance = std::sqrt(best_d2);
        return best;
    }

    /// Number of elements crossed by the ray p + t dir, t > 0.
    int count_crossings(const Vec<Dim>& p, const Vec<Dim>& dir) const {
        const Vec<Dim> inv = dir.cwiseInverse();
        int crossings = 0;
        std::array<int, 128> stack;
        int top = 0;
        stack[top++] = 0;
        while (top > 0) {
            const Node& node = nodes_[static_cast<std::size_t>(stack[--top])];
            if (!node.box.hit_by_ray(p, inv)) {
                continue;
            }
            if (node.count > 0) {
                for (int i = node.first; i < node.first + node.count; ++i) {
                    const Element& e = elements_[static_cast<std::size_t>(order_[static_cast<std::size_t>(i)])];
                    bool hit = false;
                    if constexpr (Dim == 2) {
                        hit = mesh_detail::ray_crosses_segment(p, dir, vertex(e[0]), vertex(e[1]));
                    } else {
                        hit = mesh_detail::ray_crosses_triangle(p, dir, vertex(e[0]), vertex(e[1]), vertex(e[2]));
                    }
                    crossings += hit ? 1 : 0;
                }
                continue;
            }
            stack[top++] = node.left;
            stack[top++] = node.right;
        }
        return crossings;
    }

    /// Ray parity along three fixed directions with a majority vote.
    bool inside(const Vec<Dim>& p) const {
        int votes = 0;
        for (const Vec<Dim>& dir : ray_directions()) {
            votes += count_crossings(p, dir) % 2;
        }
        return votes >= 2;
    }

private:
    struct Node {
        Aabb<Dim> box;
        int left = -1;
        int right = -1;
        int first = 0;
        int count = 0;
    };

    static constexpr int leaf_size = 4;

    const Vec<Dim>& vertex(int i) const { return vertices_[static_cast<std::size_t>(i)]; }

    static const std::array<Vec<Dim>, 3>& ray_directions() {
        // Irrational-looking components keep the rays off axis-aligned edges.
        static const std::array<Vec<Dim>, 3> dirs = [] {
            std::array<Vec<Dim>, 3> out;
            if constexpr (Dim == 2) {
                out[0] = Vec<2>(0.8191520442889918, 0.5735764363510461);
                out[1] = Vec<2>(-0.6427876096865393, 0.766044443118978);
                out[2] = Vec<2>(-0.17364817766693033, -0.984807753012208);
            } else {
                out[0] = Vec<3>(0.5773502691896258, 0.6172133998483676, 0.5345224838248488).normalized();
                out[1] = Vec<3>(-0.7071067811865476, 0.3090169943749474, 0.6366197723675814).normalized();
                out[2] = Vec<3>(0.2236067977499790, -0.8660254037844386, -0.4472135954999579).normalized();
            }
            return out;
        }();
        return dirs;
    }

    Aabb<Dim> element_box(int index) const {
        Aabb<Dim> box;
        for (int v : elements_[static_cast<std::size_t>(index)]) {
            box.expand(vertex(v));
        }
        return box;
    }

    void build() {
        order_.resize(elements_.size());
        std::iota(order_.begin(), order_.end(), 0);
        centroids_.resize(elements_.size());
        for (std::size_t i = 0; i < elements_.size(); ++i) {
            centroids_[i] = element_box(static_cast<int>(i)).centroid();
        }
        nodes_.reserve(2 * elements_.size());
        nodes_.emplace_back();
        build_node(0, 0, static_cast<int>(elements_.size()), 0);
        centroids_.clear();
        centroids_.shrink_to_fit();
    }

    void build_node(int index, int first, int count, int depth) {
        Aabb<Dim> box;
        Aabb<Dim> centroid_box;
        for (int i = first; i < first + count; ++i) {
            const int element = order_[static_cast<std::size_t>(i)];
            box.expand(element_box(element));
            centroid_box.expand(centroids_[static_cast<std::size_t>(element)]);
        }
        nodes_[static_cast<std::size_t>(index)].box = box;
        // Depth cap keeps the traversal stacks bounded.
        if (count <= leaf_size || depth > 48) {
            nodes_[static_cast<std::size_t>(index)].first = first;
            nodes_[static_cast<std::size_t>(index)].count = count;
            return;
        }
        const int axis = centroid_box.longest_axis();
        const int mid = first + count / 2;
        std::nth_element(order_.begin() + first, order_.begin() + mid, order_.begin() + first + count,
                         [&](int a, int b) {
                             return centroids_[static_cast<std::size_t>(a)][axis] <
                                    centroids_[static_cast<std::size_t>(b)][axis];
                         });
        const int left = static_cast<int>(nodes_.size());
        nodes_.emplace_back();
        const int right = static_cast<int>(nodes_.size());
        nodes_.emplace_back();
        nodes_[static_cast<std::size_t>(index)].left = left;
        nodes_[static_cast<std::size_t>(index)].right = right;
        build_node(left, first, mid - first, depth + 1);
        build_node(right, mid, first + count - mid, depth + 1);
    }

    std::vector<Vec<Dim>> vertices_;
    std::vector<Element> elements_;
    std::vector<int> order_;
    std::vector<Vec<Dim>> centroids_;
    std::vector<Node> nodes_;
};

using Polyline = DiscreteBoundary<2>;
using TriangleMesh = DiscreteBoundary<3>;

}  // namespace vcwos
