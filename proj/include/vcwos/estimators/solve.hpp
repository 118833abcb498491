// SPDX-License-Identifier: Apache-2.0
#pragma once

// Many-sample driver. Sample s of point p always uses the stream
// Rng::for_sample(seed, p, s), and samples are reduced in fixed-size blocks merged
// in block order, so results do not depend on the number of workers.

#include "vcwos/coefficients/transform.hpp"
#include "vcwos/estimators/accumulator.hpp"
#include "vcwos/estimators/classic.hpp"
#include "vcwos/estimators/delta_tracking.hpp"
#include "vcwos/estimators/gradient.hpp"
#include "vcwos/estimators/next_flight.hpp"
#include "vcwos/estimators/sde.hpp"
#include "vcwos/estimators/walk.hpp"
#include "vcwos/geometry/scene.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

namespace vcwos {

inline constexpr std::uint64_t solve_block_size = 256;

struct PointEstimate {
    EstimateAccumulator samples;
    WalkStats stats;
    /// Samples dropped after a per-walk error.
    std::uint64_t failed = 0;

    double mean() const { return samples.mean(); }
    double standard_error() const { return samples.standard_error(); }
    std::uint64_t count() const { return samples.count(); }

    void merge(const PointEstimate& o) {
        samples.merge(o.samples);
        stats.merge(o.stats);
        failed += o.failed;
    }
};

template <int Dim>
struct GradientPointEstimate {
    VectorAccumulator<Dim> gradient;
    EstimateAccumulator value;
    WalkStats stats;
    std::uint64_t failed = 0;

    void merge(const GradientPointEstimate& o) {
        gradient.merge(o.gradient);
        value.merge(o.value);
        stats.merge(o.stats);
        failed += o.failed;
    }
};

inline int resolve_workers(int workers) {
    if (workers > 0) {
        return workers;
    }
    return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

/// Runs fn(i) for i in [0, count) on a pool of threads; rethrows the first exception.
template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
    const int n = std::min<int>(resolve_workers(workers), static_cast<int>(std::max<std::size_t>(count, 1)));
    if (n <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    const auto run = [&] {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                next.store(count);
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n - 1));
    for (int t = 1; t < n; ++t) {
        pool.emplace_back(run);
    }
    run();
    for (auto& t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

template <int Dim>
class Solver {
public:
    Solver(Scene<Dim> scene, const Problem<Dim>& problem, WalkConfig cfg, int probe_count = 4096)
        : scene_(std::move(scene)), cfg_(std::move(cfg)),
          tp_((cfg_.validate(), prepare(problem, scene_, cfg_.sigma_bar_override, probe_count))) {}

    const Scene<Dim>& scene() const { return scene_; }
    const WalkConfig& config() const { return cfg_; }
    const TransformedProblem<Dim>& transformed() const { return tp_; }
    const Problem<Dim>& problem() const { return tp_.problem(); }

    double sde_step() const {
        return cfg_.sde_step > 0.0 ? cfg_.sde_step : 1e-3 * scene_.scale() * scene_.scale();
    }

    /// One estimate at x on the stream of (point, sample).
    WalkResult<double> sample(Estimator e, const Vec<Dim>& x, std::uint64_t point, std::uint64_t sample) const {
        Rng rng = Rng::for_sample(cfg_.rng_seed, point, sample);
        switch (e) {
            case Estimator::classic: return wos_classic(scene_, tp_.problem(), x, cfg_, rng);
            case Estimator::delta_tracking: return delta_tracking_estimate(scene_, tp_, x, cfg_, rng);
            case Estimator::next_flight: return next_flight_estimate(scene_, tp_, x, cfg_, rng);
            case Estimator::sde: return sde_walk_estimate(scene_, tp_.problem(), x, sde_step(), cfg_, rng);
        }
        throw ConfigError("unknown estimator");
    }

    WalkResult<GradientEstimate<Dim>> gradient_sample(Estimator recursion, const Vec<Dim>& x, std::uint64_t point,
                                                      std::uint64_t sample) const {
        Rng rng = Rng::for_sample(cfg_.rng_seed, point, sample);
        return gradient_estimate(scene_, tp_, x, cfg_, rng, recursion);
    }

    std::vector<PointEstimate> solve(const std::vector<Vec<Dim>>& points, std::uint64_t spp, Estimator e,
                                     int workers = 1) const {
        check_points(points);
        if (e == Estimator::classic && !tp_.problem().constant_coefficients()) {
            throw ConfigError("classic walk on spheres needs constant coefficients");
        }
        return run_blocks<PointEstimate>(points, spp, workers,
                                         [&](PointEstimate& acc, const Vec<Dim>& x, std::uint64_t p, std::uint64_t s) {
                                             const WalkResult<double> r = sample(e, x, p, s);
                                             acc.samples.add(r.estimate);
                                             acc.stats.merge(r.stats);
                                         });
    }

    std::vector<GradientPointEstimate<Dim>> solve_gradient(const std::vector<Vec<Dim>>& points, std::uint64_t spp,
                                                           Estimator recursion = Estimator::delta_tracking,
                                                           int workers = 1) const {
        check_points(points);
        for (const auto& x : points) {
            if (!(scene_.distance(x) > cfg_.epsilon)) {
                throw DomainError("gradient requested inside the epsilon shell");
            }
        }
        return run_blocks<GradientPointEstimate<Dim>>(
            points, spp, workers,
            [&](GradientPointEstimate<Dim>& acc, const Vec<Dim>& x, std::uint64_t p, std::uint64_t s) {
                const auto r = gradient_sample(recursion, x, p, s);
                acc.gradient.add(r.estimate.gradient);
                acc.value.add(r.estimate.value);
                acc.stats.merge(r.stats);
            });
    }

private:
    void check_points(const std::vector<Vec<Dim>>& points) const {
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (!scene_.inside(points[i])) {
                std::ostringstream msg;
                msg << "point " << i << " (" << points[i].transpose() << ") lies outside the domain";
                throw OutsideDomainError(msg.str());
            }
        }
    }

    template <typename Acc, typename Body>
    std::vector<Acc> run_blocks(const std::vector<Vec<Dim>>& points, std::uint64_t spp, int workers,
                                const Body& body) const {
        const std::uint64_t blocks = (spp + solve_block_size - 1) / solve_block_size;
        std::vector<Acc> partial(points.size() * blocks);
        parallel_for(partial.size(), workers, [&](std::size_t task) {
            const std::uint64_t p = task / blocks;
            const std::uint64_t b = task % blocks;
            Acc& acc = partial[task];
            const std::uint64_t end = std::min(spp, (b + 1) * solve_block_size);
            for (std::uint64_t s = b * solve_block_size; s < end; ++s) {
                try {
                    body(acc, points[p], p, s);
                } catch (const DomainError&) {
                    ++acc.failed;
                } catch (const EnvelopeFailure&) {
                    ++acc.failed;
                }
            }
        });
        std::vector<Acc> out(points.size());
        for (std::size_t p = 0; p < points.size(); ++p) {
            for (std::uint64_t b = 0; b < blocks; ++b) {
                out[p].merge(partial[p * blocks + b]);
            }
            out[p].stats.finish();
        }
        return out;
    }

    Scene<Dim> scene_;
    WalkConfig cfg_;
    TransformedProblem<Dim> tp_;
};

/// Convenience wrapper: prepares the problem and solves at the points.
template <int Dim>
std::vector<PointEstimate> solve(const Scene<Dim>& scene, const Problem<Dim>& problem,
                                 const std::vector<Vec<Dim>>& points, std::uint64_t spp, Estimator e,
                                 const WalkConfig& cfg, int workers = 1) {
    return Solver<Dim>(scene, problem, cfg).solve(points, spp, e, workers);
}

}  // namespace vcwos
