// SPDX-License-Identifier: Apache-2.0
#pragma once

// Walk on spheres for constant coefficients:
//   a lap u - s u = -f,  u = g on the boundary.

#include "vcwos/coefficients/problem.hpp"
#include "vcwos/estimators/walk.hpp"
#include "vcwos/geometry/scene.hpp"
#include "vcwos/kernels.hpp"
#include "vcwos/rng.hpp"

namespace vcwos {

template <int Dim>
WalkResult<double> wos_classic(const Scene<Dim>& scene, const Problem<Dim>& problem, const Vec<Dim>& x0,
                               const WalkConfig& cfg, Rng& rng) {
    if (!problem.constant_coefficients()) {
        throw ConfigError("classic walk on spheres needs constant alpha and sigma and no drift");
    }
    WalkResult<double> out;
    WalkStats& st = out.stats;
    const double a = problem.alpha.value(x0);
    const double sigma = problem.sigma.value(x0) / a;
    if (!(a > 0.0) || !(sigma >= 0.0)) {
        throw DomainError("classic walk on spheres needs alpha > 0 and sigma >= 0");
    }
    const bool has_source = problem.manufactured || !problem.source.is_zero();

    Vec<Dim> x = x0;
    double weight = 1.0;
    double total = 0.0;
    for (int step = 0;; ++step) {
        if (step >= cfg.max_steps) {
            st.end_branch(Termination::max_steps);
            break;
        }
        const double d = scene.distance(x);
        ++st.distance_queries;
        if (d < cfg.epsilon) {
            total += weight * problem.g(scene.shell_point(x));
            st.end_branch(Termination::boundary);
            break;
        }
        ++st.steps;
        const BallKernel<Dim> k(x, d, sigma);
        if (has_source) {
            const GreenSample<Dim> y = k.sample_green_centered(rng);
            ++st.kernel_evals;
            total += weight * k.green_norm() * problem.f(y.point) / a;
        }
        // Survival to the sphere: P |dB| = 1 - sigma |G|.
        weight *= 1.0 - k.interior_mass();
        x = sample_sphere_uniform<Dim>(x, d, rng);
    }
    st.finish();
    out.estimate = total;
    return out;
}

}  // namespace vcwos
