// SPDX-License-Identifier: Apache-2.0
#pragma once

// Boundary value problem
//   div(alpha grad u) + omega . grad u - sigma u = -f  in Omega,   u = g  on the boundary,
// with the drift given through a potential: omega = 2 alpha grad(gamma_omega).

#include "vcwos/coefficients/field.hpp"
#include "vcwos/types.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <vector>

namespace vcwos {

template <int Dim>
struct Problem {
    using Field = ScalarField<Dim>;

    Field alpha = Field::constant(1.0);
    Field sigma = Field::constant(0.0);
    Field source = Field::constant(0.0);
    Field dirichlet = Field::constant(0.0);
    std::optional<Field> drift_potential;
    /// Conformal factor lambda; conformal_adapter turns it into alpha = lambda^2.
    std::optional<Field> conformal_scale;
    /// Reference solution. When set, f and g are derived from it.
    std::optional<Field> manufactured;
    /// Componentwise drift declared alongside the potential, checked by validate_drift_potential.
    std::optional<std::array<Field, Dim>> declared_drift;

    bool has_drift() const { return drift_potential.has_value() && !drift_potential->is_zero(); }

    bool constant_coefficients() const { return alpha.is_constant() && sigma.is_constant() && !has_drift(); }

    Vec<Dim> omega(const Vec<Dim>& x) const {
        if (!drift_potential) {
            return Vec<Dim>::Zero();
        }
        return 2.0 * alpha.value(x) * drift_potential->gradient(x);
    }

    /// Applies the differential operator div(alpha grad u) + omega . grad u - sigma u to a field.
    double apply_operator(const Field& u, const Vec<Dim>& x) const {
        const Jet<Dim> a = alpha.jet(x);
        const Jet<Dim> uj = u.jet(x);
        return a.gradient.dot(uj.gradient) + a.value * uj.laplacian + omega(x).dot(uj.gradient) -
               sigma.value(x) * uj.value;
    }

    double f(const Vec<Dim>& x) const { return manufactured ? -apply_operator(*manufactured, x) : source.value(x); }

    double g(const Vec<Dim>& x) const { return manufactured ? manufactured->value(x) : dirichlet.value(x); }

    bool has_reference() const { return manufactured.has_value(); }

    double reference(const Vec<Dim>& x) const {
        if (!manufactured) {
            throw ConfigError("problem has no reference solution");
        }
        return manufactured->value(x);
    }

    Vec<Dim> reference_gradient(const Vec<Dim>& x) const {
        if (!manufactured) {
            throw ConfigError("problem has no reference solution");
        }
        return manufactured->gradient(x);
    }
};

/// Replaces alpha by lambda^2 when a conformal factor is present.
template <int Dim>
Problem<Dim> conformal_adapter(const Problem<Dim>& problem, const std::vector<Vec<Dim>>& probes = {}) {
    if (!problem.conformal_scale) {
        return problem;
    }
    const ScalarField<Dim>& lambda = *problem.conformal_scale;
    for (const auto& x : probes) {
        if (!(lambda.value(x) > 0.0)) {
            std::ostringstream msg;
            msg << "conformal scale is not positive at (" << x.transpose() << ")";
            throw DomainError(msg.str());
        }
    }
    Problem<Dim> out = problem;
    out.alpha = lambda * lambda;
    out.conformal_scale.reset();
    return out;
}

template <int Dim>
struct DriftReport {
    double max_deviation = 0.0;
    double tolerance = 0.0;
    std::size_t points = 0;
    /// True when checked against a declared drift, false for the finite-difference check.
    bool against_declared = false;
};

/// Checks omega = 2 alpha grad(gamma_omega) at the probes. With a declared drift the
/// comparison is to 1e-8 relative; without one, the analytic gradient is compared to
/// central differences (step 1e-5) to 1e-6 relative.
template <int Dim>
DriftReport<Dim> validate_drift_potential(const Problem<Dim>& problem, const std::vector<Vec<Dim>>& probes) {
    DriftReport<Dim> report;
    report.points = probes.size();
    if (!problem.drift_potential) {
        if (problem.declared_drift) {
            throw ConfigError("declared drift requires a drift potential");
        }
        return report;
    }
    const auto& gamma = *problem.drift_potential;
    report.against_declared = problem.declared_drift.has_value();
    report.tolerance = report.against_declared ? 1e-8 : 1e-6;
    for (const auto& x : probes) {
        const Vec<Dim> omega = problem.omega(x);
        Vec<Dim> other;
        if (report.against_declared) {
            for (int k = 0; k < Dim; ++k) {
                other[k] = (*problem.declared_drift)[static_cast<std::size_t>(k)].value(x);
            }
        } else {
            const double h = 1e-5;
            for (int k = 0; k < Dim; ++k) {
                Vec<Dim> a = x;
                Vec<Dim> b = x;
                a[k] += h;
                b[k] -= h;
                other[k] = 2.0 * problem.alpha.value(x) * (gamma.value(a) - gamma.value(b)) / (2.0 * h);
            }
        }
        const double dev = (omega - other).norm() / std::max(1.0, omega.norm());
        report.max_deviation = std::max(report.max_deviation, dev);
    }
    if (report.max_deviation > report.tolerance) {
        std::ostringstream msg;
        msg << "drift potential inconsistent: deviation " << report.max_deviation << " exceeds " << report.tolerance;
        throw ConfigError(msg.str());
    }
    return report;
}

}  // namespace vcwos
