// SPDX-License-Identifier: Apache-2.0
#pragma once

// Scalar fields with closed-form value, gradient and Laplacian.
// Fields are small immutable expression trees, cheap to copy.

#include "vcwos/types.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace vcwos {

template <int Dim>
struct Jet {
    double value = 0.0;
    Vec<Dim> gradient = Vec<Dim>::Zero();
    double laplacian = 0.0;
};

enum class FieldKind { constant, linear, exponential, gaussian_bump, sinusoid, sum, product };

inline const char* to_string(FieldKind kind) {
    switch (kind) {
        case FieldKind::constant: return "constant";
        case FieldKind::linear: return "linear";
        case FieldKind::exponential: return "exponential";
        case FieldKind::gaussian_bump: return "gaussian_bump";
        case FieldKind::sinusoid: return "sinusoid";
        case FieldKind::sum: return "sum";
        case FieldKind::product: return "product";
    }
    return "?";
}

/// Kinds and their parameters:
///   constant       c
///   linear         offset + vector . x
///   exponential    amplitude * exp(vector . x)
///   gaussian_bump  baseline + amplitude * exp(-|x - vector|^2 / width^2)
///   sinusoid       offset + amplitude * sin(vector . x + phase)
///   sum, product   of the children
template <int Dim>
class ScalarField {
public:
    struct Node {
        FieldKind kind = FieldKind::constant;
        double amplitude = 0.0;
        double width = 1.0;
        double phase = 0.0;
        double offset = 0.0;
        Vec<Dim> vector = Vec<Dim>::Zero();
        std::vector<ScalarField> children;
    };

    ScalarField() : ScalarField(constant(0.0)) {}

    static ScalarField constant(double c) {
        Node n;
        n.kind = FieldKind::constant;
        n.offset = c;
        return ScalarField(std::move(n));
    }

    static ScalarField linear(double offset, const Vec<Dim>& slope) {
        Node n;
        n.kind = FieldKind::linear;
        n.offset = offset;
        n.vector = slope;
        return ScalarField(std::move(n));
    }

    static ScalarField exponential(const Vec<Dim>& rate, double amplitude = 1.0) {
        Node n;
        n.kind = FieldKind::exponential;
        n.amplitude = amplitude;
        n.vector = rate;
        return ScalarField(std::move(n));
    }

    static ScalarField gaussian_bump(const Vec<Dim>& center, double amplitude, double width, double baseline) {
        if (!(width > 0.0)) {
            throw DomainError("gaussian_bump: width must be positive");
        }
        Node n;
        n.kind = FieldKind::gaussian_bump;
        n.vector = center;
        n.amplitude = amplitude;
        n.width = width;
        n.offset = baseline;
        return ScalarField(std::move(n));
    }

    static ScalarField sinusoid(double amplitude, const Vec<Dim>& frequency, double phase, double offset) {
        Node n;
        n.kind = FieldKind::sinusoid;
        n.amplitude = amplitude;
        n.vector = frequency;
        n.phase = phase;
        n.offset = offset;
        return ScalarField(std::move(n));
    }

    static ScalarField sum(std::vector<ScalarField> terms) { return combine(FieldKind::sum, std::move(terms)); }
    static ScalarField product(std::vector<ScalarField> factors) {
        return combine(FieldKind::product, std::move(factors));
    }

    friend ScalarField operator+(const ScalarField& a, const ScalarField& b) { return sum({a, b}); }
    friend ScalarField operator*(const ScalarField& a, const ScalarField& b) { return product({a, b}); }
    friend ScalarField operator*(double s, const ScalarField& a) { return product({constant(s), a}); }

    const Node& node() const { return *node_; }
    FieldKind kind() const { return node_->kind; }

    /// True when the field is constant by construction.
    bool is_constant() const {
        switch (node_->kind) {
            case FieldKind::constant: return true;
            case FieldKind::linear: return node_->vector.isZero(0.0);
            case FieldKind::exponential: return node_->vector.isZero(0.0) || node_->amplitude == 0.0;
            case FieldKind::gaussian_bump:
            case FieldKind::sinusoid: return node_->amplitude == 0.0;
            case FieldKind::sum:
            case FieldKind::product:
                for (const auto& c : node_->children) {
                    if (!c.is_constant()) {
                        return false;
                    }
                }
                return true;
        }
        return false;
    }

    bool is_zero() const { return is_constant() && value(Vec<Dim>::Zero()) == 0.0; }

    double value(const Vec<Dim>& x) const {
        const Node& n = *node_;
        switch (n.kind) {
            case FieldKind::constant: return n.offset;
            case FieldKind::linear: return n.offset + n.vector.dot(x);
            case FieldKind::exponential: return n.amplitude * std::exp(n.vector.dot(x));
            case FieldKind::gaussian_bump:
                return n.offset + n.amplitude * std::exp(-(x - n.vector).squaredNorm() / (n.width * n.width));
            case FieldKind::sinusoid: return n.offset + n.amplitude * std::sin(n.vector.dot(x) + n.phase);
            case FieldKind::sum: {
                double s = 0.0;
                for (const auto& c : n.children) {
                    s += c.value(x);
                }
                return s;
            }
            case FieldKind::product: {
                double p = 1.0;
                for (const auto& c : n.children) {
                    p *= c.value(x);
                }
                return p;
            }
        }
        return 0.0;
    }

    Jet<Dim> jet(const Vec<Dim>& x) const {
        const Node& n = *node_;
        Jet<Dim> j;
        switch (n.kind) {
            case FieldKind::constant:
                j.value = n.offset;
                break;
            case FieldKind::linear:
                j.value = n.offset + n.vector.dot(x);
                j.gradient = n.vector;
                break;
            case FieldKind::exponential: {
                const double e = n.amplitude * std::exp(n.vector.dot(x));
                j.value = e;
                j.gradient = e * n.vector;
                j.laplacian = e * n.vector.squaredNorm();
                break;
            }
            case FieldKind::gaussian_bump: {
                const Vec<Dim> r = x - n.vector;
                const double w2 = n.width * n.width;
                const double e = n.amplitude * std::exp(-r.squaredNorm() / w2);
                j.value = n.offset + e;
                j.gradient = (-2.0 / w2) * e * r;
                j.laplacian = e * (4.0 * r.squaredNorm() / (w2 * w2) - 2.0 * Dim / w2);
                break;
            }
            case FieldKind::sinusoid: {
                const double t = n.vector.dot(x) + n.phase;
                const double s = std::sin(t);
                j.value = n.offset + n.amplitude * s;
                j.gradient = n.amplitude * std::cos(t) * n.vector;
                j.laplacian = -n.amplitude * s * n.vector.squaredNorm();
                break;
            }
            case FieldKind::sum:
                for (const auto& c : n.children) {
                    const Jet<Dim> cj = c.jet(x);
                    j.value += cj.value;
                    j.gradient += cj.gradient;
                    j.laplacian += cj.laplacian;
                }
                break;
            case FieldKind::product:
                j.value = 1.0;
                for (const auto& c : n.children) {
                    const Jet<Dim> cj = c.jet(x);
                    j.laplacian = j.laplacian * cj.value + 2.0 * j.gradient.dot(cj.gradient) + j.value * cj.laplacian;
                    j.gradient = j.gradient * cj.value + j.value * cj.gradient;
                    j.value *= cj.value;
                }
                break;
        }
        return j;
    }

    Vec<Dim> gradient(const Vec<Dim>& x) const { return jet(x).gradient; }
    double laplacian(const Vec<Dim>& x) const { return jet(x).laplacian; }

private:
    explicit ScalarField(Node n) : node_(std::make_shared<const Node>(std::move(n))) {}

    static ScalarField combine(FieldKind kind, std::vector<ScalarField> children) {
        if (children.empty()) {
            throw DomainError(std::string(to_string(kind)) + ": needs at least one operand");
        }
        Node n;
        n.kind = kind;
        n.children = std::move(children);
        return ScalarField(std::move(n));
    }

    std::shared_ptr<const Node> node_;
};

}  // namespace vcwos
