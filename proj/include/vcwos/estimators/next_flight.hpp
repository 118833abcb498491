// SPDX-License-Identifier: Apache-2.0
#pragma once

// Next-flight walk on spheres. Each ball draws one exit point z and unrolls the
// interior recursion into a chain of uniform points that all reuse z. The chain
// uses its own stream, so the sequence of balls (and distance queries) does not
// depend on the screening constant.

#include "vcwos/coefficients/transform.hpp"
#include "vcwos/estimators/branching.hpp"
#include "vcwos/estimators/walk.hpp"
#include "vcwos/geometry/scene.hpp"
#include "vcwos/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace vcwos {

namespace nf_detail {

// At the ball center every form reduces to the centered kernels.
template <int Dim>
bool at_center(const BallKernel<Dim>& k, const Vec<Dim>& x) {
    return x == k.center();
}

template <int Dim>
double green(const BallKernel<Dim>& k, const Vec<Dim>& x, const Vec<Dim>& y, NextFlightKernel form) {
    if (at_center(k, x)) {
        return k.green_centered((y - x).norm());
    }
    switch (form) {
        case NextFlightKernel::exact: return k.green_offcentered_exact(x, y);
        case NextFlightKernel::kelvin: return k.green_offcentered_approx(x, y, OffCenteredForm::kelvin);
        case NextFlightKernel::paper: return k.green_offcentered_approx(x, y, OffCenteredForm::paper);
    }
    return 0.0;
}

template <int Dim>
double poisson(const BallKernel<Dim>& k, const Vec<Dim>& x, const Vec<Dim>& z, NextFlightKernel form) {
    if (at_center(k, x)) {
        return k.poisson_centered();
    }
    switch (form) {
        case NextFlightKernel::exact: return k.poisson_offcentered_exact(x, z);
        case NextFlightKernel::kelvin: return k.poisson_offcentered_approx(x, z, OffCenteredForm::kelvin);
        case NextFlightKernel::paper: return k.poisson_offcentered_approx(x, z, OffCenteredForm::paper);
    }
    return 0.0;
}

/// Draws the next chain point and sets g_over_p = G(x_c, x_n) / p(x_n).
template <int Dim>
Vec<Dim> sample_interior(const BallKernel<Dim>& k, const Vec<Dim>& xc, double volume, NextFlightSampling sampling,
                         Rng& rng, double& g_over_p, NextFlightKernel form) {
    const double rho = k.radius() - (xc - k.center()).norm();
    if (sampling == NextFlightSampling::uniform || !(rho > 1e-9 * k.radius())) {
        const Vec<Dim> xn = sample_ball_uniform<Dim>(k.center(), k.radius(), rng);
        g_over_p = green(k, xc, xn, form) * volume;
        return xn;
    }
    // Defensive mixture: the inner ball's Green density shares the singularity of
    // G(x_c, .), which keeps G/p bounded near x_c.
    const bool centered = rho >= k.radius();
    const BallKernel<Dim> inner = centered ? k : BallKernel<Dim>(xc, rho, k.sigma());
    const Vec<Dim> xn = rng.uniform() < 0.5 ? inner.sample_green_centered(rng).point
                                            : sample_ball_uniform<Dim>(k.center(), k.radius(), rng);
    const double r = (xn - xc).norm();
    const double q = r < rho ? inner.green_centered(r) / inner.green_norm() : 0.0;
    g_over_p = green(k, xc, xn, form) / (0.5 / volume + 0.5 * q);
    return xn;
}

}  // namespace nf_detail

template <int Dim>
WalkResult<double> next_flight_estimate(const Scene<Dim>& scene, const TransformedProblem<Dim>& tp,
                                        const Vec<Dim>& x0, const WalkConfig& cfg, Rng& rng) {
    WalkResult<double> out;
    WalkStats& st = out.stats;
    const Problem<Dim>& pr = tp.problem();
    const double c = tp.kernel_sigma();
    const NextFlightKernel form = cfg.nf_kernel;
    const NextFlightSampling sampling = cfg.nf_sampling;
    Rng chain_rng = rng.split();
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
        const Vec<Dim> z = sample_sphere_uniform<Dim>(w.x, d, rng);
        const double area = sphere_area<Dim>(d);
        const double volume = ball_volume<Dim>(d);

        // Interior chain. transmission sums P(x_c, z)/p(z) over the chain,
        // source sums the f' contributions relative to exp(gamma(x)).
        double transmission = 0.0;
        double source = 0.0;
        double chain_weight = 1.0;
        Vec<Dim> xc = w.x;
        double g_over_p = 0.0;
        for (;;) {
            transmission += chain_weight * area * nf_detail::poisson(k, xc, z, form);
            ++st.kernel_evals;
            const double survive = std::min(1.0, std::abs(chain_weight));
            if (chain_rng.uniform() >= survive) {
                break;
            }
            chain_weight /= survive;
            const Vec<Dim> xn = nf_detail::sample_interior(k, xc, volume, sampling, chain_rng, g_over_p, form);
            ++st.kernel_evals;
            const auto ev = tp.eval(xn);
            const double ratio = std::exp(ev.gamma - w.gamma);
            source += chain_weight * g_over_p * ratio * ev.f / ev.alpha;
            chain_weight *= g_over_p * (c - ev.sigma_prime);
            if (chain_weight == 0.0) {
                break;
            }
            xc = xn;
        }
        total += w.weight * source;
        const double gz = tp.gamma(z);
        w.weight *= transmission * std::exp(gz - w.gamma);
        w.x = z;
        w.gamma = gz;
        return std::nullopt;
    };

    run_split_walk<Dim>({x0, 1.0, tp.gamma(x0), 0}, cfg, rng, st, step);
    out.estimate = total;
    return out;
}

}  // namespace vcwos
