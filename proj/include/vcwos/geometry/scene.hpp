// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vcwos/geometry/aabb.hpp"
#include "vcwos/geometry/mesh.hpp"
#include "vcwos/geometry/sdf.hpp"
#include "vcwos/types.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <variant>

namespace vcwos {

template <int Dim>
struct BoundaryQuery {
    double distance = 0.0;
    Vec<Dim> closest_point = Vec<Dim>::Zero();
};

template <int Dim>
struct ShellQuery {
    bool in_shell = false;
    double distance = 0.0;
    Vec<Dim> closest_point = Vec<Dim>::Zero();
};

/// Periodic identification of selected axes: x ~ x + k * period[axis].
template <int Dim>
struct PeriodicWrap {
    std::array<bool, Dim> axes{};
    Vec<Dim> origin = Vec<Dim>::Zero();
    Vec<Dim> period = Vec<Dim>::Ones();

    bool any() const {
        for (bool a : axes) {
            if (a) {
                return true;
            }
        }
        return false;
    }
};

/// Where walks read boundary data once inside the epsilon shell.
enum class ShellRead {
    projection,      // closest boundary point (the estimator proper)
    stopping_point,  // the walk position itself; for measuring shell bias against exact data
};

template <int Dim>
class Scene {
public:
    using Discrete = std::shared_ptr<const DiscreteBoundary<Dim>>;

    static Scene from_sdf(sdf::NodePtr<Dim> root, double epsilon) {
        if (!root) {
            throw ConfigError("scene: empty SDF tree");
        }
        return Scene(Boundary(std::move(root)), epsilon);
    }

    static Scene from_boundary(Discrete boundary, double epsilon) {
        if (!boundary) {
            throw ConfigError("scene: empty boundary");
        }
        return Scene(Boundary(std::move(boundary)), epsilon);
    }

    double epsilon() const { return epsilon_; }

    Scene with_epsilon(double epsilon) const {
        Scene copy = *this;
        copy.set_epsilon(epsilon);
        return copy;
    }

    ShellRead shell_read() const { return shell_read_; }

    Scene with_shell_read(ShellRead mode) const {
        Scene copy = *this;
        copy.shell_read_ = mode;
        return copy;
    }

    /// Point at which a walk stopped at x reads boundary data.
    Vec<Dim> shell_point(const Vec<Dim>& x) const {
        return shell_read_ == ShellRead::projection ? closest_point(x) : x;
    }

    bool is_sdf() const { return std::holds_alternative<sdf::NodePtr<Dim>>(boundary_); }

    /// Bounding box of Omega. Unbounded SDF trees need an explicit box.
    Aabb<Dim> bounds() const { return bounds_; }

    void set_bounds(const Aabb<Dim>& box) {
        if (!box.finite()) {
            throw ConfigError("scene: bounds must be finite");
        }
        bounds_ = box;
        update_scale();
    }

    /// Half of the longest bounding-box extent.
    double scale() const { return scale_; }

    const PeriodicWrap<Dim>& periodic() const { return wrap_; }

    void set_periodic(const PeriodicWrap<Dim>& wrap) {
        for (int k = 0; k < Dim; ++k) {
            if (wrap.axes[static_cast<std::size_t>(k)] && !(wrap.period[k] > 0.0)) {
                throw ConfigError("scene: periods must be positive");
            }
        }
        wrap_ = wrap;
    }

    /// Maps a point into the fundamental cell of the periodic axes.
    Vec<Dim> wrap(const Vec<Dim>& x) const {
        if (!wrap_.any()) {
            return x;
        }
        Vec<Dim> out = x;
        for (int k = 0; k < Dim; ++k) {
            if (wrap_.axes[static_cast<std::size_t>(k)]) {
                const double t = (x[k] - wrap_.origin[k]) / wrap_.period[k];
                out[k] = wrap_.origin[k] + (t - std::floor(t)) * wrap_.period[k];
            }
        }
        return out;
    }

    /// Negative inside, positive outside. Magnitude is a lower bound on the distance.
    double signed_distance(const Vec<Dim>& x) const {
        const Vec<Dim> p = wrap(x);
        const double d = unsigned_distance(p);
        return inside_cell(p) ? -d : d;
    }

    bool inside(const Vec<Dim>& x) const { return inside_cell(wrap(x)); }

    /// Radius of an empty ball around x; no inside check.
    double distance(const Vec<Dim>& x) const { return unsigned_distance(wrap(x)); }

    /// Boundary point near x, expressed in the same periodic image as x.
    Vec<Dim> closest_point(const Vec<Dim>& x) const {
        const Vec<Dim> p = wrap(x);
        const Vec<Dim> offset = x - p;
        if (!wrap_.any()) {
            return raw_closest(p) + offset;
        }
        Vec<Dim> best = raw_closest(p);
        double best_d = (best - p).norm();
        for_each_image([&](const Vec<Dim>& shift) {
            const Vec<Dim> q = raw_closest(p + shift) - shift;
            const double d = (q - p).norm();
            if (d < best_d) {
                best_d = d;
                best = q;
            }
        });
        return best + offset;
    }

    BoundaryQuery<Dim> distance_to_boundary(const Vec<Dim>& x) const {
        if (!inside(x)) {
            std::ostringstream msg;
            msg << "point (" << x.transpose() << ") is outside the domain";
            throw OutsideDomainError(msg.str());
        }
        return {distance(x), closest_point(x)};
    }

    ShellQuery<Dim> in_epsilon_shell(const Vec<Dim>& x) const {
        const BoundaryQuery<Dim> q = distance_to_boundary(x);
        return {q.distance < epsilon_, q.distance, q.closest_point};
    }

private:
    using Boundary = std::variant<sdf::NodePtr<Dim>, Discrete>;

    Scene(Boundary boundary, double epsilon) : boundary_(std::move(boundary)) {
        set_epsilon(epsilon);
        if (const auto* tree = std::get_if<sdf::NodePtr<Dim>>(&boundary_)) {
            bounds_ = (*tree)->bounds();
        } else {
            bounds_ = std::get<Discrete>(boundary_)->bounds();
        }
        update_scale();
    }

    void set_epsilon(double epsilon) {
        if (!(epsilon > 0.0)) {
            throw ConfigError("scene: epsilon must be positive");
        }
        epsilon_ = epsilon;
    }

    void update_scale() { scale_ = bounds_.finite() ? 0.5 * bounds_.extent().maxCoeff() : 1.0; }

    // Visits the nonzero shifts in {-1, 0, 1} along the periodic axes.
    template <typename F>
    void for_each_image(F&& visit) const {
        int count = 1;
        for (int a = 0; a < Dim; ++a) {
            count *= 3;
        }
        for (int code = 0; code < count; ++code) {
            Vec<Dim> shift = Vec<Dim>::Zero();
            bool valid = true;
            bool zero = true;
            int c = code;
            for (int a = 0; a < Dim; ++a, c /= 3) {
                const int k = c % 3 - 1;
                if (k != 0 && !wrap_.axes[static_cast<std::size_t>(a)]) {
                    valid = false;
                }
                zero = zero && k == 0;
                shift[a] = k * wrap_.period[a];
            }
            if (valid && !zero) {
                visit(shift);
            }
        }
    }

    double min_period() const {
        double m = std::numeric_limits<double>::infinity();
        for (int k = 0; k < Dim; ++k) {
            if (wrap_.axes[static_cast<std::size_t>(k)]) {
                m = std::min(m, wrap_.period[k]);
            }
        }
        return m;
    }

    double unsigned_distance(const Vec<Dim>& p) const {
        double d = raw_distance(p);
        if (wrap_.any()) {
            for_each_image([&](const Vec<Dim>& shift) { d = std::min(d, raw_distance(p + shift)); });
            // Images beyond the nearest ring are at least one period away.
            d = std::min(d, min_period());
        }
        return d;
    }

    bool inside_cell(const Vec<Dim>& p) const {
        if (const auto* tree = std::get_if<sdf::NodePtr<Dim>>(&boundary_)) {
            return (*tree)->eval(p) < 0.0;
        }
        return std::get<Discrete>(boundary_)->inside(p);
    }

    double raw_distance(const Vec<Dim>& p) const {
        if (const auto* tree = std::get_if<sdf::NodePtr<Dim>>(&boundary_)) {
            return std::abs((*tree)->eval(p));
        }
        return std::get<Discrete>(boundary_)->closest(p).distance;
    }

    Vec<Dim> raw_closest(const Vec<Dim>& p) const {
        if (const auto* tree = std::get_if<sdf::NodePtr<Dim>>(&boundary_)) {
            const double h = 1e-5 * scale_;
            Vec<Dim> q = project(**tree, p, h);
            return project(**tree, q, h);
        }
        return std::get<Discrete>(boundary_)->closest(p).point;
    }

    // One Newton step toward the zero set along the numerical gradient.
    static Vec<Dim> project(const sdf::Node<Dim>& tree, const Vec<Dim>& p, double h) {
        const double s = tree.eval(p);
        Vec<Dim> grad;
        for (int k = 0; k < Dim; ++k) {
            Vec<Dim> a = p;
            Vec<Dim> b = p;
            a[k] += h;
            b[k] -= h;
            grad[k] = (tree.eval(a) - tree.eval(b)) / (2.0 * h);
        }
        const double g2 = grad.squaredNorm();
        if (!(g2 > 0.0)) {
            return p;
        }
        return p - s * grad / g2;
    }

    Boundary boundary_;
    double epsilon_ = 1e-3;
    ShellRead shell_read_ = ShellRead::projection;
    Aabb<Dim> bounds_;
    double scale_ = 1.0;
    PeriodicWrap<Dim> wrap_;
};

}  // namespace vcwos
