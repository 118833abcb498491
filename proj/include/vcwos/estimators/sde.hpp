// SPDX-License-Identifier: Apache-2.0
#pragma once

// Euler-Maruyama baseline. The diffusion dX = (grad alpha + omega)/2 dt + sqrt(alpha) dB
// has generator (div(alpha grad) + omega . grad)/2, so the Feynman-Kac weights use
// sigma/2 and f/2 per unit time.

#include "vcwos/coefficients/problem.hpp"
#include "vcwos/estimators/walk.hpp"
#include "vcwos/geometry/scene.hpp"
#include "vcwos/rng.hpp"

#include <algorithm>
#include <cmath>

namespace vcwos {

/// One Euler-Maruyama increment from x with step h.
template <int Dim>
Vec<Dim> sde_increment(const Problem<Dim>& problem, const Vec<Dim>& x, double h, Rng& rng) {
    const Jet<Dim> a = problem.alpha.jet(x);
    Vec<Dim> noise;
    for (int k = 0; k < Dim; ++k) {
        noise[k] = rng.normal();
    }
    return 0.5 * (a.gradient + problem.omega(x)) * h + std::sqrt(a.value * h) * noise;
}

/// Step cap that lets a walk of step h cross the scene: max(cfg.max_steps, 50 R^2 / h).
template <int Dim>
int sde_step_cap(const Scene<Dim>& scene, double h, const WalkConfig& cfg) {
    const double r = scene.scale();
    const double needed = std::ceil(50.0 * r * r / h);
    return static_cast<int>(std::min(2.0e9, std::max(static_cast<double>(cfg.max_steps), needed)));
}

template <int Dim>
WalkResult<double> sde_walk_estimate(const Scene<Dim>& scene, const Problem<Dim>& problem, const Vec<Dim>& x0,
                                     double h, const WalkConfig& cfg, Rng& rng) {
    if (!(h > 0.0)) {
        throw ConfigError("sde step must be positive");
    }
    WalkResult<double> out;
    WalkStats& st = out.stats;
    const int cap = sde_step_cap(scene, h, cfg);
    Vec<Dim> x = x0;
    double transmittance = 1.0;
    double total = 0.0;
    for (int step = 0;; ++step) {
        if (step >= cap) {
            st.end_branch(Termination::max_steps);
            break;
        }
        ++st.distance_queries;
        // Exits, including jumps across the boundary, read g at the closest point.
        if (scene.signed_distance(x) > -cfg.epsilon) {
            total += transmittance * problem.g(scene.shell_point(x));
            st.end_branch(Termination::boundary);
            break;
        }
        ++st.steps;
        total += transmittance * 0.5 * problem.f(x) * h;
        transmittance *= std::exp(-0.5 * problem.sigma.value(x) * h);
        x += sde_increment(problem, x, h, rng);
    }
    st.finish();
    out.estimate = total;
    return out;
}

}  // namespace vcwos
