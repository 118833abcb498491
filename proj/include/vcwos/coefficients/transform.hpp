// SPDX-License-Identifier: Apache-2.0
#pragma once

// Reduction to a screened Poisson equation. With gamma = ln(alpha)/2 + gamma_omega and
// U = exp(gamma) u,
//   lap U - sigma' U = -f',
//   sigma' = sigma/alpha + lap gamma + |grad gamma|^2,   f' = exp(gamma) f / alpha,   g' = exp(gamma) g.

#include "vcwos/coefficients/problem.hpp"
#include "vcwos/geometry/scene.hpp"
#include "vcwos/rng.hpp"
#include "vcwos/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

namespace vcwos {

/// Range of sigma' over the probes and the majorant used by the estimators.
struct SigmaBounds {
    double sigma_bar = 0.0;
    double min = 0.0;
    double max = 0.0;
    bool overridden = false;
};

/// Screening constant for the ball kernels. It dominates sigma' on the probes, so
/// the null weight 1 - sigma'/c stays nonnegative; for sigma' >= 0 it also stays <= 1.
inline double shifted_sigma_for_kernels(const SigmaBounds& b) {
    if (b.overridden) {
        return b.sigma_bar;
    }
    return std::max(b.sigma_bar, b.max);
}

template <int Dim>
class TransformedProblem {
public:
    /// Everything a walker needs at one point.
    struct PointEval {
        double alpha = 1.0;
        double gamma = 0.0;
        double sigma_prime = 0.0;
        double f = 0.0;
    };

    explicit TransformedProblem(Problem<Dim> problem) : problem_(std::move(problem)) {
        if (problem_.conformal_scale) {
            problem_ = conformal_adapter(problem_);
        }
        constant_alpha_ = problem_.alpha.is_constant();
        has_drift_ = problem_.has_drift();
    }

    const Problem<Dim>& problem() const { return problem_; }

    Jet<Dim> gamma_jet(const Vec<Dim>& x) const { return gamma_jet(problem_.alpha.jet(x), x); }

    double gamma(const Vec<Dim>& x) const {
        double g = 0.5 * std::log(problem_.alpha.value(x));
        if (has_drift_) {
            g += problem_.drift_potential->value(x);
        }
        return g;
    }

    double sigma_prime(const Vec<Dim>& x) const { return eval(x).sigma_prime; }

    /// sigma/alpha + (lap alpha / alpha - |grad ln alpha|^2 / 2) / 2; drift-free problems only.
    double sigma_prime_alpha_form(const Vec<Dim>& x) const {
        const Jet<Dim> a = problem_.alpha.jet(x);
        const Vec<Dim> grad_log = a.gradient / a.value;
        return problem_.sigma.value(x) / a.value + 0.5 * (a.laplacian / a.value - 0.5 * grad_log.squaredNorm());
    }

    PointEval eval(const Vec<Dim>& x) const {
        PointEval p;
        if (constant_alpha_ && !has_drift_) {
            p.alpha = problem_.alpha.value(x);
            p.gamma = 0.5 * std::log(p.alpha);
            p.sigma_prime = problem_.sigma.value(x) / p.alpha;
        } else {
            const Jet<Dim> a = problem_.alpha.jet(x);
            const Jet<Dim> g = gamma_jet(a, x);
            p.alpha = a.value;
            p.gamma = g.value;
            p.sigma_prime = problem_.sigma.value(x) / a.value + g.laplacian + g.gradient.squaredNorm();
        }
        p.f = problem_.f(x);
        return p;
    }

    double f_prime(const Vec<Dim>& x) const {
        const PointEval p = eval(x);
        return std::exp(p.gamma) * p.f / p.alpha;
    }

    double g_prime(const Vec<Dim>& x) const { return std::exp(gamma(x)) * problem_.g(x); }

    const SigmaBounds& bounds() const { return bounds_; }
    void set_bounds(const SigmaBounds& b) {
        if (!(b.sigma_bar > 0.0)) {
            throw DomainError("sigma_bar must be positive");
        }
        bounds_ = b;
        kernel_sigma_ = shifted_sigma_for_kernels(b);
    }

    double sigma_bar() const { return bounds_.sigma_bar; }
    double kernel_sigma() const { return kernel_sigma_; }
    double null_weight(double sigma_prime) const { return 1.0 - sigma_prime / kernel_sigma_; }

private:
    Jet<Dim> gamma_jet(const Jet<Dim>& a, const Vec<Dim>& x) const {
        Jet<Dim> g;
        const Vec<Dim> grad_log = a.gradient / a.value;
        g.value = 0.5 * std::log(a.value);
        g.gradient = 0.5 * grad_log;
        g.laplacian = 0.5 * (a.laplacian / a.value - grad_log.squaredNorm());
        if (has_drift_) {
            const Jet<Dim> d = problem_.drift_potential->jet(x);
            g.value += d.value;
            g.gradient += d.gradient;
            g.laplacian += d.laplacian;
        }
        return g;
    }

    Problem<Dim> problem_;
    bool constant_alpha_ = true;
    bool has_drift_ = false;
    SigmaBounds bounds_;
    double kernel_sigma_ = 0.0;
};

template <int Dim>
TransformedProblem<Dim> transform(const Problem<Dim>& problem) {
    return TransformedProblem<Dim>(problem);
}

/// Jittered grid over the scene bounds, keeping the points inside Omega.
template <int Dim>
std::vector<Vec<Dim>> stratified_probes(const Scene<Dim>& scene, int count, std::uint64_t seed = 0x5eed) {
    const Aabb<Dim> box = scene.bounds();
    if (!box.finite()) {
        throw ConfigError("probing needs finite scene bounds");
    }
    std::vector<Vec<Dim>> out;
    Rng rng(seed);
    int per_axis = std::max(1, static_cast<int>(std::ceil(std::pow(static_cast<double>(count), 1.0 / Dim))));
    // Thin domains waste most cells; refine until enough probes land inside.
    for (int attempt = 0; attempt < 4 && static_cast<int>(out.size()) < count / 2; ++attempt, per_axis *= 2) {
        out.clear();
        int cells = 1;
        for (int k = 0; k < Dim; ++k) {
            cells *= per_axis;
        }
        const Vec<Dim> step = box.extent() / per_axis;
        for (int c = 0; c < cells; ++c) {
            Vec<Dim> x;
            int rest = c;
            for (int k = 0; k < Dim; ++k, rest /= per_axis) {
                x[k] = box.lo[k] + (rest % per_axis + rng.uniform()) * step[k];
            }
            if (scene.inside(x) && scene.distance(x) > 0.0) {
                out.push_back(x);
            }
        }
    }
    if (out.empty()) {
        throw ConfigError("no probe point landed inside the domain");
    }
    return out;
}

namespace transform_detail {

// Compass search from the most extreme probes; it tightens the probed range when
// an extremum falls between grid cells.
template <int Dim>
void refine_extremes(const TransformedProblem<Dim>& tp, const Scene<Dim>& scene, const std::vector<Vec<Dim>>& probes,
                     SigmaBounds& b, int seeds = 8) {
    std::vector<std::pair<double, std::size_t>> ranked;
    ranked.reserve(probes.size());
    for (std::size_t i = 0; i < probes.size(); ++i) {
        ranked.emplace_back(tp.sigma_prime(probes[i]), i);
    }
    std::sort(ranked.begin(), ranked.end());
    const double start = scene.scale() / std::pow(static_cast<double>(probes.size()), 1.0 / Dim);
    const auto climb = [&](std::size_t index, double sign) {
        Vec<Dim> x = probes[index];
        double best = sign * tp.sigma_prime(x);
        for (double step = start; step > 1e-6 * start; step *= 0.5) {
            bool moved = true;
            while (moved) {
                moved = false;
                for (int k = 0; k < 2 * Dim; ++k) {
                    Vec<Dim> y = x;
                    y[k / 2] += (k % 2 ? -step : step);
                    if (!scene.inside(y)) {
                        continue;
                    }
                    const double v = sign * tp.sigma_prime(y);
                    if (v > best) {
                        best = v;
                        x = y;
                        moved = true;
                    }
                }
            }
        }
        b.min = std::min(b.min, sign * best);
        b.max = std::max(b.max, sign * best);
    };
    const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(seeds), ranked.size());
    for (std::size_t i = 0; i < n; ++i) {
        climb(ranked[i].second, -1.0);
        climb(ranked[ranked.size() - 1 - i].second, 1.0);
    }
}

}  // namespace transform_detail

/// max(sigma') - min(sigma') over the probes (refined by local search), with the constant-field fallback
/// max(sigma', tau), tau = 1e-6 / R_scene^2. Also validates alpha > 0 and sigma >= 0.
template <int Dim>
SigmaBounds sigma_bar_default(const TransformedProblem<Dim>& tp, const Scene<Dim>& scene, int probe_count = 4096,
                              const std::vector<Vec<Dim>>& extra_points = {}) {
    if (probe_count < 1) {
        throw DomainError("probe_count must be at least 1");
    }
    std::vector<Vec<Dim>> probes = stratified_probes(scene, probe_count);
    probes.insert(probes.end(), extra_points.begin(), extra_points.end());
    SigmaBounds b;
    b.min = std::numeric_limits<double>::infinity();
    b.max = -std::numeric_limits<double>::infinity();
    const auto& pr = tp.problem();
    for (const auto& x : probes) {
        const double a = pr.alpha.value(x);
        const double s = pr.sigma.value(x);
        if (!(a > 0.0) || !(s >= 0.0)) {
            std::ostringstream msg;
            msg << "coefficient out of range at (" << x.transpose() << "): alpha = " << a << ", sigma = " << s;
            throw DomainError(msg.str());
        }
        const double sp = tp.sigma_prime(x);
        b.min = std::min(b.min, sp);
        b.max = std::max(b.max, sp);
    }
    transform_detail::refine_extremes(tp, scene, probes, b);
    const double tau = 1e-6 / (scene.scale() * scene.scale());
    const double spread = b.max - b.min;
    b.sigma_bar = spread > 0.0 ? spread : std::max(b.max, tau);
    b.sigma_bar = std::max(b.sigma_bar, tau);
    return b;
}

/// Transform plus bounds: probes sigma', then applies an optional override of sigma_bar.
template <int Dim>
TransformedProblem<Dim> prepare(const Problem<Dim>& problem, const Scene<Dim>& scene,
                                std::optional<double> sigma_bar_override = std::nullopt, int probe_count = 4096) {
    TransformedProblem<Dim> tp = transform(problem);
    SigmaBounds b = sigma_bar_default(tp, scene, probe_count);
    if (sigma_bar_override) {
        if (!(*sigma_bar_override > 0.0)) {
            throw ConfigError("sigma_bar override must be positive");
        }
        b.sigma_bar = *sigma_bar_override;
        b.overridden = true;
    }
    tp.set_bounds(b);
    return tp;
}

}  // namespace vcwos
