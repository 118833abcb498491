// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vcwos/types.hpp"

#include <algorithm>
#include <limits>

namespace vcwos {

template <int Dim>
struct Aabb {
    Vec<Dim> lo = Vec<Dim>::Constant(std::numeric_limits<double>::infinity());
    Vec<Dim> hi = Vec<Dim>::Constant(-std::numeric_limits<double>::infinity());

    static Aabb unbounded() {
        Aabb box;
        box.lo = Vec<Dim>::Constant(-std::numeric_limits<double>::infinity());
        box.hi = Vec<Dim>::Constant(std::numeric_limits<double>::infinity());
        return box;
    }

    bool empty() const { return (lo.array() > hi.array()).any(); }
    bool finite() const { return lo.allFinite() && hi.allFinite() && !empty(); }

    void expand(const Vec<Dim>& p) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }

    void expand(const Aabb& other) {
        lo = lo.cwiseMin(other.lo);
        hi = hi.cwiseMax(other.hi);
    }

    Aabb intersected(const Aabb& other) const {
        Aabb out;
        out.lo = lo.cwiseMax(other.lo);
        out.hi = hi.cwiseMin(other.hi);
        return out;
    }

    Aabb padded(double margin) const {
        Aabb out = *this;
        out.lo.array() -= margin;
        out.hi.array() += margin;
        return out;
    }

    Vec<Dim> extent() const { return hi - lo; }
    Vec<Dim> centroid() const { return 0.5 * (lo + hi); }

    int longest_axis() const {
        int axis = 0;
        extent().maxCoeff(&axis);
        return axis;
    }

    double squared_distance(const Vec<Dim>& p) const {
        const Vec<Dim> d = (lo - p).cwiseMax(p - hi).cwiseMax(Vec<Dim>::Zero());
        return d.squaredNorm();
    }

    /// Slab test; true when the ray origin + t dir (t >= 0) enters the box.
    bool hit_by_ray(const Vec<Dim>& origin, const Vec<Dim>& inv_dir) const {
        double t_enter = 0.0;
        double t_exit = std::numeric_limits<double>::infinity();
        for (int k = 0; k < Dim; ++k) {
            double t0 = (lo[k] - origin[k]) * inv_dir[k];
            double t1 = (hi[k] - origin[k]) * inv_dir[k];
            if (t0 > t1) {
                std::swap(t0, t1);
            }
            t_enter = std::max(t_enter, t0);
            t_exit = std::min(t_exit, t1);
        }
        return t_enter <= t_exit;
    }
};

}  // namespace vcwos
