// SPDX-License-Identifier: Apache-2.0
#pragma once

// Signed distance trees. Negative inside, positive outside. Every node is
// 1-Lipschitz, so |sdf(x)| never exceeds the Euclidean distance to the zero
// set and a ball of that radius is empty of boundary.

#include "vcwos/geometry/aabb.hpp"
#include "vcwos/types.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <memory>
#include <string>
#include <utility>

namespace vcwos::sdf {

template <int Dim>
class Node {
public:
    virtual ~Node() = default;
    virtual double eval(const Vec<Dim>& x) const = 0;
    /// Box containing the interior region; infinite when unbounded.
    virtual Aabb<Dim> bounds() const = 0;
};

template <int Dim>
using NodePtr = std::shared_ptr<const Node<Dim>>;

template <int Dim>
class Sphere final : public Node<Dim> {
public:
    Sphere(const Vec<Dim>& center, double radius) : center_(center), radius_(radius) {
        if (!(radius > 0.0)) {
            throw DomainError("sdf sphere: radius must be positive");
        }
    }
    double eval(const Vec<Dim>& x) const override { return (x - center_).norm() - radius_; }
    Aabb<Dim> bounds() const override {
        Aabb<Dim> box;
        box.lo = center_.array() - radius_;
        box.hi = center_.array() + radius_;
        return box;
    }

private:
    Vec<Dim> center_;
    double radius_;
};

template <int Dim>
class Box final : public Node<Dim> {
public:
    Box(const Vec<Dim>& center, const Vec<Dim>& half_extent) : center_(center), half_(half_extent) {
        if (!(half_extent.array() > 0.0).all()) {
            throw DomainError("sdf box: half extents must be positive");
        }
    }
    double eval(const Vec<Dim>& x) const override {
        const Vec<Dim> q = (x - center_).cwiseAbs() - half_;
        return q.cwiseMax(Vec<Dim>::Zero()).norm() + std::min(q.maxCoeff(), 0.0);
    }
    Aabb<Dim> bounds() const override {
        Aabb<Dim> box;
        box.lo = center_ - half_;
        box.hi = center_ + half_;
        return box;
    }

private:
    Vec<Dim> center_;
    Vec<Dim> half_;
};

/// Half-space {x : n.x < offset}.
template <int Dim>
class Plane final : public Node<Dim> {
public:
    Plane(const Vec<Dim>& normal, double offset) {
        const double len = normal.norm();
        if (!(len > 0.0)) {
            throw DomainError("sdf plane: normal must be nonzero");
        }
        normal_ = normal / len;
        offset_ = offset / len;
    }
    double eval(const Vec<Dim>& x) const override { return normal_.dot(x) - offset_; }
    Aabb<Dim> bounds() const override { return Aabb<Dim>::unbounded(); }

private:
    Vec<Dim> normal_;
    double offset_;
};

template <int Dim>
class Union final : public Node<Dim> {
public:
    Union(NodePtr<Dim> a, NodePtr<Dim> b) : a_(std::move(a)), b_(std::move(b)) {}
    double eval(const Vec<Dim>& x) const override { return std::min(a_->eval(x), b_->eval(x)); }
    Aabb<Dim> bounds() const override {
        Aabb<Dim> box = a_->bounds();
        box.expand(b_->bounds());
        return box;
    }

private:
    NodePtr<Dim> a_;
    NodePtr<Dim> b_;
};

template <int Dim>
class Intersection final : public Node<Dim> {
public:
    Intersection(NodePtr<Dim> a, NodePtr<Dim> b) : a_(std::move(a)), b_(std::move(b)) {}
    double eval(const Vec<Dim>& x) const override { return std::max(a_->eval(x), b_->eval(x)); }
    Aabb<Dim> bounds() const override { return a_->bounds().intersected(b_->bounds()); }

private:
    NodePtr<Dim> a_;
    NodePtr<Dim> b_;
};

/// a minus b.
template <int Dim>
class Difference final : public Node<Dim> {
public:
    Difference(NodePtr<Dim> a, NodePtr<Dim> b) : a_(std::move(a)), b_(std::move(b)) {}
    double eval(const Vec<Dim>& x) const override { return std::max(a_->eval(x), -b_->eval(x)); }
    Aabb<Dim> bounds() const override { return a_->bounds(); }

private:
    NodePtr<Dim> a_;
    NodePtr<Dim> b_;
};

/// Polynomial smooth minimum with blend width k.
template <int Dim>
class SmoothUnion final : public Node<Dim> {
public:
    SmoothUnion(NodePtr<Dim> a, NodePtr<Dim> b, double k) : a_(std::move(a)), b_(std::move(b)), k_(k) {
        if (!(k > 0.0)) {
            throw DomainError("sdf smooth_union: blend width must be positive");
        }
    }
    double eval(const Vec<Dim>& x) const override {
        const double da = a_->eval(x);
        const double db = b_->eval(x);
        const double h = std::clamp(0.5 + 0.5 * (db - da) / k_, 0.0, 1.0);
        return db + (da - db) * h - k_ * h * (1.0 - h);
    }
    Aabb<Dim> bounds() const override {
        Aabb<Dim> box = a_->bounds();
        box.expand(b_->bounds());
        return box.padded(0.25 * k_);
    }

private:
    NodePtr<Dim> a_;
    NodePtr<Dim> b_;
    double k_;
};

/// Child placed by the rigid motion x -> rotation * x + translation.
template <int Dim>
class Transform final : public Node<Dim> {
public:
    using Matrix = Eigen::Matrix<double, Dim, Dim>;

    Transform(NodePtr<Dim> child, const Matrix& rotation, const Vec<Dim>& translation)
        : child_(std::move(child)), rotation_(rotation), translation_(translation) {
        const Matrix check = rotation * rotation.transpose() - Matrix::Identity();
        if (check.cwiseAbs().maxCoeff() > 1e-9 || rotation.determinant() < 0.0) {
            throw DomainError("sdf transform: rotation must be orthonormal with det +1");
        }
    }
    double eval(const Vec<Dim>& x) const override { return child_->eval(rotation_.transpose() * (x - translation_)); }
    Aabb<Dim> bounds() const override {
        const Aabb<Dim> inner = child_->bounds();
        if (!inner.finite()) {
            return Aabb<Dim>::unbounded();
        }
        Aabb<Dim> box;
        for (int corner = 0; corner < (1 << Dim); ++corner) {
            Vec<Dim> p;
            for (int k = 0; k < Dim; ++k) {
                p[k] = (corner >> k) & 1 ? inner.hi[k] : inner.lo[k];
            }
            box.expand(Vec<Dim>(rotation_ * p + translation_));
        }
        return box;
    }

private:
    NodePtr<Dim> child_;
    Matrix rotation_;
    Vec<Dim> translation_;
};

template <int Dim>
NodePtr<Dim> sphere(const Vec<Dim>& center, double radius) {
    return std::make_shared<Sphere<Dim>>(center, radius);
}

template <int Dim>
NodePtr<Dim> box(const Vec<Dim>& center, const Vec<Dim>& half_extent) {
    return std::make_shared<Box<Dim>>(center, half_extent);
}

template <int Dim>
NodePtr<Dim> plane(const Vec<Dim>& normal, double offset) {
    return std::make_shared<Plane<Dim>>(normal, offset);
}

template <int Dim>
NodePtr<Dim> make_union(NodePtr<Dim> a, NodePtr<Dim> b) {
    return std::make_shared<Union<Dim>>(std::move(a), std::move(b));
}

template <int Dim>
NodePtr<Dim> make_intersection(NodePtr<Dim> a, NodePtr<Dim> b) {
    return std::make_shared<Intersection<Dim>>(std::move(a), std::move(b));
}

template <int Dim>
NodePtr<Dim> make_difference(NodePtr<Dim> a, NodePtr<Dim> b) {
    return std::make_shared<Difference<Dim>>(std::move(a), std::move(b));
}

template <int Dim>
NodePtr<Dim> smooth_union(NodePtr<Dim> a, NodePtr<Dim> b, double k) {
    return std::make_shared<SmoothUnion<Dim>>(std::move(a), std::move(b), k);
}

template <int Dim>
NodePtr<Dim> transform(NodePtr<Dim> child, const Eigen::Matrix<double, Dim, Dim>& rotation,
                       const Vec<Dim>& translation) {
    return std::make_shared<Transform<Dim>>(std::move(child), rotation, translation);
}

/// Rotation matrix from an angle (2D) or an axis-angle pair (3D).
inline Eigen::Matrix2d rotation_2d(double angle) {
    return Eigen::Rotation2Dd(angle).toRotationMatrix();
}

inline Eigen::Matrix3d rotation_3d(const Vec<3>& axis, double angle) {
    return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

}  // namespace vcwos::sdf
