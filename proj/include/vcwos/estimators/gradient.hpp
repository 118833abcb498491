// SPDX-License-Identifier: Apache-2.0
#pragma once

// Gradient of u from the first (centered) ball. With U = exp(gamma) u,
//   U(x) = int_dB P(x,z) U(z) dz + int_B G(x,y) (f'(y) + (c - sigma'(y)) U(y)) dy,
// differentiated in x at the center; the remaining U values come from a recursive walk.
// Interior points use a uniform-radius density, so the r^{1-d} singularity of grad G
// cancels against 1/p.

#include "vcwos/coefficients/transform.hpp"
#include "vcwos/estimators/delta_tracking.hpp"
#include "vcwos/estimators/next_flight.hpp"
#include "vcwos/estimators/walk.hpp"
#include "vcwos/geometry/scene.hpp"
#include "vcwos/kernels.hpp"

#include <cmath>

namespace vcwos {

template <int Dim>
struct GradientEstimate {
    Vec<Dim> gradient = Vec<Dim>::Zero();
    double value = 0.0;
};

template <int Dim>
WalkResult<GradientEstimate<Dim>> gradient_estimate(const Scene<Dim>& scene, const TransformedProblem<Dim>& tp,
                                                    const Vec<Dim>& x, const WalkConfig& cfg, Rng& rng,
                                                    Estimator recursion = Estimator::delta_tracking) {
    if (recursion != Estimator::delta_tracking && recursion != Estimator::next_flight) {
        throw ConfigError("gradient recursion must use delta tracking or next flight");
    }
    WalkResult<GradientEstimate<Dim>> out;
    WalkStats& st = out.stats;
    const double d = scene.distance(x);
    ++st.distance_queries;
    if (!(d > cfg.epsilon)) {
        throw DomainError("gradient_estimate: point lies in the epsilon shell");
    }
    ++st.steps;
    const auto recurse = [&](const Vec<Dim>& p) {
        WalkResult<double> r = recursion == Estimator::delta_tracking ? delta_tracking_estimate(scene, tp, p, cfg, rng)
                                                                      : next_flight_estimate(scene, tp, p, cfg, rng);
        st.merge(r.stats);
        return r.estimate;
    };

    const double c = tp.kernel_sigma();
    const BallKernel<Dim> k(x, d, c);
    const Jet<Dim> gx = tp.gamma_jet(x);

    // Boundary term; U values below are relative to exp(gamma(x)).
    const Vec<Dim> z = sample_sphere_uniform<Dim>(x, d, rng);
    const double uz = std::exp(tp.gamma(z) - gx.value) * recurse(z);
    const double area = sphere_area<Dim>(d);
    double value = k.poisson_centered() * area * uz;
    Vec<Dim> grad = k.poisson_gradient_centered(z) * area * uz;

    // Interior term at y with density 1 / (R |S| r^{d-1}).
    double r = d * rng.uniform();
    while (!(r > 0.0)) {
        r = d * rng.uniform();
    }
    const Vec<Dim> y = x + r * sample_unit_direction<Dim>(rng);
    const double inv_p = d * unit_sphere_area<Dim>() * std::pow(r, Dim - 1);
    const auto ev = tp.eval(y);
    const double ratio = std::exp(ev.gamma - gx.value);
    double integrand = ratio * ev.f / ev.alpha;
    if (c != ev.sigma_prime) {
        integrand += (c - ev.sigma_prime) * ratio * recurse(y);
    }
    st.kernel_evals += 2;
    value += k.green_centered(r) * inv_p * integrand;
    grad += k.green_gradient_centered(y) * inv_p * integrand;

    // grad u = exp(-gamma) (grad U - U grad gamma)
    out.estimate.value = value;
    out.estimate.gradient = grad - value * gx.gradient;
    st.finish();
    return out;
}

}  // namespace vcwos
