// SPDX-License-Identifier: Apache-2.0
#pragma once

// Delta-tracking walk on spheres. Works on U = exp(gamma) u with the constant
// screening c = kernel_sigma(); per ball it takes either an interior (null) step
// with probability c|G| or a boundary step.

#include "vcwos/coefficients/transform.hpp"
#include "vcwos/estimators/branching.hpp"
#include "vcwos/estimators/walk.hpp"
#include "vcwos/geometry/scene.hpp"
#include "vcwos/kernels.hpp"

#include <cmath>

namespace vcwos {

template <int Dim>
WalkResult<double> delta_tracking_estimate(const Scene<Dim>& scene, const TransformedProblem<Dim>& tp,
                                           const Vec<Dim>& x0, const WalkConfig& cfg, Rng& rng) {
    WalkResult<double> out;
    WalkStats& st = out.stats;
    const Problem<Dim>& pr = tp.problem();
    const double c = tp.kernel_sigma();
    const bool has_source = pr.manufactured || !pr.source.is_zero();
    double total = 0.0;

    const auto step = [&](Walker<Dim>& w) -> std::optional<Termination> {
        const double d = scene.distance(w.x);
        ++st.distance_queries;
        if (d < cfg.epsilon) {
            const Vec<Dim> xb = scene.shell_point(w.x);
            total += w.weight * std::exp(tp.gamma(xb) - w.gamma) * pr.g(xb);
            return Termination::boundary;
        }
        ++w.steps;
        ++st.steps;
        const BallKernel<Dim> k(w.x, d, c);
        const bool interior = rng.uniform() < k.interior_mass();
        if (has_source || interior) {
            const GreenSample<Dim> y = k.sample_green_centered(rng);
            ++st.kernel_evals;
            const auto ev = tp.eval(y.point);
            const double ratio = std::exp(ev.gamma - w.gamma);
            if (has_source) {
                total += w.weight * k.green_norm() * ratio * ev.f / ev.alpha;
            }
            if (interior) {
                const double null_weight = 1.0 - ev.sigma_prime / c;
                if (null_weight < 0.0 || null_weight > 1.0) {
                    ++st.null_weight_violations;
                }
                w.weight *= ratio * null_weight;
                w.x = y.point;
                w.gamma = ev.gamma;
                return std::nullopt;
            }
        }
        const Vec<Dim> z = sample_sphere_uniform<Dim>(w.x, d, rng);
        const double gz = tp.gamma(z);
        w.weight *= std::exp(gz - w.gamma);
        w.x = z;
        w.gamma = gz;
        return std::nullopt;
    };

    run_split_walk<Dim>({x0, 1.0, tp.gamma(x0), 0}, cfg, rng, st, step);
    out.estimate = total;
    return out;
}

}  // namespace vcwos
