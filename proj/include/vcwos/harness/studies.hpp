// SPDX-License-Identifier: Apache-2.0
#pragma once

// Validation studies on catalog problems. Each returns a StudyReport whose verdicts
// name the acceptance criterion they check.

#include "vcwos/estimators/solve.hpp"
#include "vcwos/harness/catalog.hpp"
#include "vcwos/harness/report.hpp"
#include "vcwos/io/json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace vcwos {

struct StudyOptions {
    std::uint64_t seed = 1;
    int workers = 0;
    /// Base walk settings; studies override the fields they sweep.
    WalkConfig walk;
};

namespace study_detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline std::string fmt(double x) {
    std::ostringstream s;
    s.precision(4);
    s << x;
    return s.str();
}

template <int Dim>
std::string point_label(const Vec<Dim>& x) {
    std::ostringstream s;
    s.precision(6);
    s << '(';
    for (int k = 0; k < Dim; ++k) {
        s << (k ? " " : "") << x[k];
    }
    s << ')';
    return s.str();
}

template <int Dim>
double reference_or_nan(const Problem<Dim>& p, const Vec<Dim>& x) {
    return p.has_reference() ? p.reference(x) : std::numeric_limits<double>::quiet_NaN();
}

inline WalkConfig walk_config(const StudyOptions& opt, double epsilon) {
    WalkConfig cfg = opt.walk;
    cfg.epsilon = epsilon;
    cfg.rng_seed = opt.seed;
    return cfg;
}

inline io::Json options_json(const StudyOptions& opt, double epsilon) {
    io::Json j = io::walk_config_to_json(walk_config(opt, epsilon));
    j["workers"] = opt.workers;
    return j;
}

inline StudyRow point_row(const std::string& series, double axis, const std::string& point, const PointEstimate& e,
                          double reference, double wall) {
    StudyRow r;
    r.series = series;
    r.axis = axis;
    r.point = point;
    r.samples = e.count();
    r.mean = e.mean();
    r.reference = reference;
    r.error = std::abs(e.mean() - reference);
    r.variance = e.samples.variance();
    r.standard_error = e.standard_error();
    const double n = static_cast<double>(std::max<std::uint64_t>(e.count(), 1));
    r.mean_steps = static_cast<double>(e.stats.steps) / n;
    r.mean_queries = static_cast<double>(e.stats.distance_queries) / n;
    r.wall_time = wall;
    r.extra["failed"] = static_cast<double>(e.failed);
    r.extra["max_step_hits"] = static_cast<double>(e.stats.max_step_hits);
    r.extra["null_weight_violations"] = static_cast<double>(e.stats.null_weight_violations);
    return r;
}

// Least-squares slope of log y on log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]) / n;
        my += std::log(y[i]) / n;
    }
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
        sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    }
    return sxy / sxx;
}

/// Per-sample differences a - b on shared streams, reduced in block order.
template <int Dim>
EstimateAccumulator paired_difference(const Solver<Dim>& a, const Solver<Dim>& b, Estimator e, const Vec<Dim>& x,
                                      std::uint64_t n, int workers) {
    const std::uint64_t blocks = (n + solve_block_size - 1) / solve_block_size;
    std::vector<EstimateAccumulator> partial(blocks);
    parallel_for(blocks, workers, [&](std::size_t block) {
        const std::uint64_t end = std::min<std::uint64_t>(n, (block + 1) * solve_block_size);
        for (std::uint64_t s = block * solve_block_size; s < end; ++s) {
            partial[block].add(a.sample(e, x, 0, s).estimate - b.sample(e, x, 0, s).estimate);
        }
    });
    EstimateAccumulator out;
    for (const auto& p : partial) {
        out.merge(p);
    }
    return out;
}

}  // namespace study_detail

/// DT and NF means against u_ref at every probe, and against each other.
template <int Dim>
StudyReport unbiasedness_study(const CatalogProblem<Dim>& cp, std::uint64_t n, const std::vector<Estimator>& estimators,
                               const StudyOptions& opt = {}) {
    using namespace study_detail;
    StudyReport rep;
    rep.study = "unbiasedness";
    rep.problem = cp.id;
    rep.axis = "point";
    rep.seed = opt.seed;
    rep.config = options_json(opt, cp.scene.epsilon());
    rep.config["samples"] = n;
    const Solver<Dim> solver(cp.scene, cp.problem, walk_config(opt, cp.scene.epsilon()));
    std::vector<std::vector<PointEstimate>> results;
    for (Estimator e : estimators) {
        const auto t0 = std::chrono::steady_clock::now();
        results.push_back(solver.solve(cp.probes, n, e, opt.workers));
        const double wall = seconds_since(t0);
        for (std::size_t i = 0; i < cp.probes.size(); ++i) {
            const auto& r = results.back()[i];
            const double u = cp.problem.reference(cp.probes[i]);
            rep.rows.push_back(point_row(to_string(e), static_cast<double>(i), point_label<Dim>(cp.probes[i]), r, u,
                                         wall / cp.probes.size()));
            const double z = (r.mean() - u) / r.standard_error();
            rep.verdict(5, std::string(to_string(e)) + " mean at " + point_label<Dim>(cp.probes[i]),
                        std::abs(z) < 3.0 && r.failed == 0,
                        "mean " + fmt(r.mean()) + ", u_ref " + fmt(u) + ", z " + fmt(z) +
                            (r.failed ? ", failed " + std::to_string(r.failed) : std::string()));
        }
    }
    for (std::size_t a = 0; a < estimators.size(); ++a) {
        for (std::size_t b = a + 1; b < estimators.size(); ++b) {
            for (std::size_t i = 0; i < cp.probes.size(); ++i) {
                const auto& ra = results[a][i];
                const auto& rb = results[b][i];
                const double se = std::hypot(ra.standard_error(), rb.standard_error());
                const double z = (ra.mean() - rb.mean()) / se;
                rep.verdict(5,
                            std::string(to_string(estimators[a])) + " vs " + to_string(estimators[b]) + " at " +
                                point_label<Dim>(cp.probes[i]),
                            std::abs(z) < 3.0, "difference z " + fmt(z));
            }
        }
    }
    return rep;
}

/// Variance of the mean against N, averaged over the points; expects slope -1.
template <int Dim>
StudyReport convergence_study(const CatalogProblem<Dim>& cp, const std::vector<Vec<Dim>>& points,
                              const std::vector<std::uint64_t>& spp_ladder, Estimator e,
                              const StudyOptions& opt = {}) {
    using namespace study_detail;
    StudyReport rep;
    rep.study = "convergence";
    rep.problem = cp.id;
    rep.axis = "N";
    rep.seed = opt.seed;
    rep.config = options_json(opt, cp.scene.epsilon());
    rep.config["estimator"] = to_string(e);
    const Solver<Dim> solver(cp.scene, cp.problem, walk_config(opt, cp.scene.epsilon()));
    std::vector<double> ns;
    std::vector<double> variances;
    std::vector<PointEstimate> last;
    for (std::uint64_t n : spp_ladder) {
        const auto t0 = std::chrono::steady_clock::now();
        last = solver.solve(points, n, e, opt.workers);
        const double wall = seconds_since(t0);
        StudyRow row;
        row.series = to_string(e);
        row.axis = static_cast<double>(n);
        row.point = "all";
        row.samples = n * points.size();
        double var_of_mean = 0.0;
        double sample_var = 0.0;
        double err = 0.0;
        double steps = 0.0;
        double queries = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            const double se = last[i].standard_error();
            var_of_mean += se * se / points.size();
            sample_var += last[i].samples.variance() / points.size();
            err += std::abs(last[i].mean() - cp.problem.reference(points[i])) / points.size();
            steps += static_cast<double>(last[i].stats.steps) / (n * points.size());
            queries += static_cast<double>(last[i].stats.distance_queries) / (n * points.size());
        }
        row.variance = sample_var;
        row.standard_error = std::sqrt(var_of_mean);
        row.error = err;
        row.mean_steps = steps;
        row.mean_queries = queries;
        row.wall_time = wall;
        row.extra["variance_of_mean"] = var_of_mean;
        rep.rows.push_back(row);
        ns.push_back(static_cast<double>(n));
        variances.push_back(var_of_mean);
    }
    const double slope = loglog_slope(ns, variances);
    rep.verdict(6, "log-log slope of variance of the mean", slope >= -1.1 && slope <= -0.9,
                "slope " + fmt(slope) + " (accepted [-1.1, -0.9])");
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double u = cp.problem.reference(points[i]);
        const double z = (last[i].mean() - u) / last[i].standard_error();
        rep.verdict(5, "bias at largest N, " + point_label<Dim>(points[i]), std::abs(z) < 3.0, "z " + fmt(z));
    }
    return rep;
}

struct EpsilonStudySettings {
    std::vector<double> epsilons{1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
    std::uint64_t samples = 100000;
    Estimator estimator = Estimator::delta_tracking;
    bool compare_sde = true;
};

/// Shell bias over an epsilon ladder (relative to the scene scale). The bias at each
/// epsilon is the mean per-sample difference to the same walk reading the exact
/// solution at its stopping point, which isolates the shell error from Monte Carlo
/// noise. The SDE baseline runs at the step size whose cost per walk matches the
/// walk-on-spheres run.
template <int Dim>
StudyReport epsilon_bias_study(const CatalogProblem<Dim>& cp, const Vec<Dim>& x, const EpsilonStudySettings& set = {},
                               const StudyOptions& opt = {}) {
    using namespace study_detail;
    if (!cp.problem.has_reference()) {
        throw ConfigError("epsilon_bias_study needs a manufactured problem");
    }
    StudyReport rep;
    rep.study = "epsilon-bias";
    rep.problem = cp.id;
    rep.axis = "epsilon";
    rep.seed = opt.seed;
    rep.config = options_json(opt, set.epsilons.front());
    rep.config["samples"] = set.samples;
    rep.config["estimator"] = to_string(set.estimator);
    rep.config["point"] = io::vec_to_json<Dim>(x);
    const double u = cp.problem.reference(x);
    const double scale = cp.scene.scale();
    const Problem<Dim>& pr = cp.problem;

    {  // Warm caches and the allocator before anything is timed.
        const Solver<Dim> warm(cp.scene, pr, walk_config(opt, set.epsilons.front() * scale));
        warm.solve({x}, std::max<std::uint64_t>(set.samples / 10, 1000), set.estimator, opt.workers);
    }
    std::vector<double> bias;
    std::vector<double> bias_se;
    std::vector<double> wall;
    for (double rel : set.epsilons) {
        const double eps = rel * scale;
        const WalkConfig cfg = walk_config(opt, eps);
        const Scene<Dim> scene = cp.scene.with_epsilon(eps);
        const Solver<Dim> solver(scene, pr, cfg);
        const Solver<Dim> oracle(scene.with_shell_read(ShellRead::stopping_point), pr, cfg);
        const auto t0 = std::chrono::steady_clock::now();
        const PointEstimate est = solver.solve({x}, set.samples, set.estimator, opt.workers)[0];
        const double t = seconds_since(t0);
        const EstimateAccumulator diff = paired_difference(solver, oracle, set.estimator, x, set.samples, opt.workers);
        StudyRow row = point_row(to_string(set.estimator), rel, point_label<Dim>(x), est, u, t);
        row.error = std::abs(diff.mean());
        row.standard_error = diff.standard_error();
        row.extra["signed_bias"] = diff.mean();
        row.extra["raw_error"] = est.mean() - u;
        row.extra["raw_standard_error"] = est.standard_error();
        rep.rows.push_back(row);
        bias.push_back(row.error);
        bias_se.push_back(row.standard_error);
        wall.push_back(t);
    }
    bool monotone = true;
    std::string trail;
    for (std::size_t i = 0; i < bias.size(); ++i) {
        trail += (i ? " > " : "") + fmt(bias[i]);
        if (i > 0 && !(bias[i] < bias[i - 1])) {
            monotone = false;
        }
    }
    rep.verdict(7, "bias decreases along the epsilon ladder", monotone, trail);
    rep.verdict(7, "bias at smallest epsilon at most half of largest", bias.back() <= 0.5 * bias.front(),
                fmt(bias.back()) + " vs " + fmt(bias.front()));
    const double ratio = wall.back() / wall.front();
    rep.verdict(7, "wall time ratio smallest/largest epsilon below 2", ratio < 2.0, "ratio " + fmt(ratio));

    if (set.compare_sde) {
        // Pilot run: cost per walk scales as 1/h.
        const double h0 = 1e-2 * scale * scale;
        const std::uint64_t pilot_n = std::max<std::uint64_t>(set.samples / 200, 200);
        for (std::size_t i = 0; i < set.epsilons.size(); ++i) {
            const double eps = set.epsilons[i] * scale;
            WalkConfig cfg = walk_config(opt, eps);
            cfg.sde_step = h0;
            const Solver<Dim> pilot(cp.scene.with_epsilon(eps), pr, cfg);
            auto t0 = std::chrono::steady_clock::now();
            pilot.solve({x}, pilot_n, Estimator::sde, opt.workers);
            const double per_walk_h0 = seconds_since(t0) / pilot_n;
            const double per_walk_wos = wall[i] / set.samples;
            cfg.sde_step = std::clamp(h0 * per_walk_h0 / per_walk_wos, 1e-6 * scale * scale, 0.1 * scale * scale);
            const Solver<Dim> sde(cp.scene.with_epsilon(eps), pr, cfg);
            t0 = std::chrono::steady_clock::now();
            const PointEstimate est = sde.solve({x}, set.samples, Estimator::sde, opt.workers)[0];
            const double t = seconds_since(t0);
            StudyRow row = point_row("sde", set.epsilons[i], point_label<Dim>(x), est, u, t);
            row.extra["step"] = cfg.sde_step;
            rep.rows.push_back(row);
            const double sde_low = row.error - 3.0 * row.standard_error;
            const double wos_high = bias[i] + 3.0 * bias_se[i];
            rep.verdict(7, "SDE more biased than walk on spheres at epsilon " + fmt(set.epsilons[i]), sde_low > wos_high,
                        "SDE error " + fmt(row.error) + " +- " + fmt(row.standard_error) + " (h " + fmt(cfg.sde_step) +
                            ", time " + fmt(t) + " s) vs bias " + fmt(bias[i]) + " (time " + fmt(wall[i]) + " s)");
        }
    }
    return rep;
}

/// SDE bias against the step size h (relative to R^2).
template <int Dim>
StudyReport sde_step_study(const CatalogProblem<Dim>& cp, const Vec<Dim>& x, const std::vector<double>& steps,
                           std::uint64_t n, const StudyOptions& opt = {}) {
    using namespace study_detail;
    StudyReport rep;
    rep.study = "sde-step";
    rep.problem = cp.id;
    rep.axis = "h";
    rep.seed = opt.seed;
    rep.config = options_json(opt, cp.scene.epsilon());
    rep.config["samples"] = n;
    const double u = cp.problem.reference(x);
    const double r2 = cp.scene.scale() * cp.scene.scale();
    std::vector<double> err;
    std::vector<double> se;
    std::vector<double> wall;
    for (double rel : steps) {
        WalkConfig cfg = walk_config(opt, cp.scene.epsilon());
        cfg.sde_step = rel * r2;
        const Solver<Dim> solver(cp.scene, cp.problem, cfg);
        const auto t0 = std::chrono::steady_clock::now();
        const PointEstimate est = solver.solve({x}, n, Estimator::sde, opt.workers)[0];
        const double t = seconds_since(t0);
        rep.rows.push_back(point_row("sde", rel, point_label<Dim>(x), est, u, t));
        err.push_back(rep.rows.back().error);
        se.push_back(est.standard_error());
        wall.push_back(t);
    }
    bool shrinking = true;
    bool slower = true;
    std::string trail;
    for (std::size_t i = 0; i < err.size(); ++i) {
        trail += (i ? " > " : "") + fmt(err[i]) + " +- " + fmt(se[i]);
        if (i > 0) {
            shrinking = shrinking && err[i] < err[i - 1];
            slower = slower && wall[i] > wall[i - 1];
        }
    }
    rep.verdict(7, "SDE error shrinks with the step", shrinking, trail);
    rep.verdict(7, "SDE wall time grows as the step shrinks", slower, "");
    return rep;
}

/// Mean distance queries per walk under sigma + k and under multiples of sigma_bar.
template <int Dim>
StudyReport query_count_study(const CatalogProblem<Dim>& cp, const Vec<Dim>& x, const std::vector<double>& shifts,
                              std::uint64_t n, const StudyOptions& opt = {}) {
    using namespace study_detail;
    StudyReport rep;
    rep.study = "query-count";
    rep.problem = cp.id;
    rep.axis = "sigma shift k";
    rep.seed = opt.seed;
    rep.config = options_json(opt, cp.scene.epsilon());
    rep.config["samples"] = n;
    const WalkConfig cfg = walk_config(opt, cp.scene.epsilon());
    std::vector<double> dt_q;
    std::vector<double> nf_q;
    const auto run = [&](const std::string& tag, double axis, const Solver<Dim>& solver) {
        for (Estimator e : {Estimator::delta_tracking, Estimator::next_flight}) {
            const auto t0 = std::chrono::steady_clock::now();
            const PointEstimate est = solver.solve({x}, n, e, opt.workers)[0];
            StudyRow row = point_row(std::string(to_string(e)) + tag, axis, point_label<Dim>(x), est,
                                     reference_or_nan(solver.problem(), x), seconds_since(t0));
            row.extra["sigma_bar"] = solver.transformed().sigma_bar();
            rep.rows.push_back(row);
            (e == Estimator::delta_tracking ? dt_q : nf_q).push_back(row.mean_queries);
        }
    };
    const auto check = [&](const std::string& what) {
        bool nondecreasing = true;
        std::string trail;
        for (std::size_t i = 0; i < dt_q.size(); ++i) {
            trail += (i ? " <= " : "") + fmt(dt_q[i]);
            if (i > 0 && dt_q[i] < dt_q[i - 1]) {
                nondecreasing = false;
            }
        }
        rep.verdict(8, "dt queries per walk nondecreasing in " + what, nondecreasing, trail);
        const auto [lo, hi] = std::minmax_element(nf_q.begin(), nf_q.end());
        const double spread = (*hi - *lo) / *lo;
        rep.verdict(8, "nf queries per walk flat in " + what, spread <= 0.01,
                    "relative spread " + fmt(spread) + " over " + fmt(*lo) + ".." + fmt(*hi));
        dt_q.clear();
        nf_q.clear();
    };

    for (double k : shifts) {
        Problem<Dim> p = cp.problem;
        p.sigma = p.sigma + ScalarField<Dim>::constant(k);
        run("", k, Solver<Dim>(cp.scene, p, cfg));
    }
    check("the sigma shift");

    const double base = Solver<Dim>(cp.scene, cp.problem, cfg).transformed().sigma_bar();
    for (double m : {1.0, 2.0, 4.0}) {
        WalkConfig over = cfg;
        over.sigma_bar_override = m * base;
        run("-sigma-bar", m, Solver<Dim>(cp.scene, cp.problem, over));
    }
    check("sigma_bar multiples");

    // Control: classic walk on a Laplace problem, one query per step plus the final one.
    Problem<Dim> laplace;
    laplace.dirichlet = ScalarField<Dim>::constant(1.0);
    const PointEstimate cl = Solver<Dim>(cp.scene, laplace, cfg).solve({x}, n, Estimator::classic, opt.workers)[0];
    const double extra = static_cast<double>(cl.stats.distance_queries - cl.stats.steps) / cl.count();
    StudyRow row = point_row("classic-control", 0.0, point_label<Dim>(x), cl, 1.0, 0.0);
    rep.rows.push_back(row);
    rep.verdict(8, "classic control: queries = steps + 1 per walk", extra == 1.0 && cl.mean() == 1.0,
                "queries - steps per walk " + fmt(extra));
    return rep;
}

/// Delta tracking with and without the weight window at equal walk counts.
template <int Dim>
StudyReport weight_window_study(const CatalogProblem<Dim>& cp, std::uint64_t n, const WeightWindow& window = {},
                                const StudyOptions& opt = {}) {
    using namespace study_detail;
    StudyReport rep;
    rep.study = "weight-window";
    rep.problem = cp.id;
    rep.axis = "point";
    rep.seed = opt.seed;
    WalkConfig plain_cfg = walk_config(opt, cp.scene.epsilon());
    plain_cfg.weight_window.reset();
    WalkConfig window_cfg = plain_cfg;
    window_cfg.weight_window = window;
    rep.config = io::walk_config_to_json(window_cfg);
    rep.config["samples"] = n;
    const Solver<Dim> plain(cp.scene, cp.problem, plain_cfg);
    const Solver<Dim> windowed(cp.scene, cp.problem, window_cfg);
    auto t0 = std::chrono::steady_clock::now();
    const auto a = plain.solve(cp.probes, n, Estimator::delta_tracking, opt.workers);
    const double wall_a = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    const auto b = windowed.solve(cp.probes, n, Estimator::delta_tracking, opt.workers);
    const double wall_b = seconds_since(t0);
    double var_a = 0.0;
    double var_b = 0.0;
    for (std::size_t i = 0; i < cp.probes.size(); ++i) {
        const double u = reference_or_nan(cp.problem, cp.probes[i]);
        const std::string label = point_label<Dim>(cp.probes[i]);
        rep.rows.push_back(point_row("plain", static_cast<double>(i), label, a[i], u, wall_a / cp.probes.size()));
        StudyRow rb = point_row("window", static_cast<double>(i), label, b[i], u, wall_b / cp.probes.size());
        rb.extra["splits"] = static_cast<double>(b[i].stats.splits);
        rb.extra["split_cap_hits"] = static_cast<double>(b[i].stats.split_cap_hits);
        rep.rows.push_back(rb);
        const double z = (a[i].mean() - b[i].mean()) / std::hypot(a[i].standard_error(), b[i].standard_error());
        rep.verdict(9, "mean preserved at " + label, std::abs(z) < 3.0, "difference z " + fmt(z));
        var_a += a[i].samples.variance();
        var_b += b[i].samples.variance();
    }
    rep.verdict(9, "variance at equal walk count strictly lower with the window", var_b < var_a,
                "summed variance " + fmt(var_b) + " vs " + fmt(var_a) + " (time " + fmt(wall_b) + " s vs " +
                    fmt(wall_a) + " s)");
    return rep;
}

/// Gradient estimates against the analytic gradient of u_ref.
template <int Dim>
StudyReport gradient_study(const CatalogProblem<Dim>& cp, const std::vector<Vec<Dim>>& points, std::uint64_t n,
                           Estimator recursion = Estimator::delta_tracking, const StudyOptions& opt = {}) {
    using namespace study_detail;
    StudyReport rep;
    rep.study = "gradient";
    rep.problem = cp.id;
    rep.axis = "point";
    rep.seed = opt.seed;
    rep.config = options_json(opt, cp.scene.epsilon());
    rep.config["samples"] = n;
    rep.config["recursion"] = to_string(recursion);
    const Solver<Dim> solver(cp.scene, cp.problem, walk_config(opt, cp.scene.epsilon()));
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = solver.solve_gradient(points, n, recursion, opt.workers);
    const double wall = seconds_since(t0) / points.size();
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Vec<Dim> g = res[i].gradient.mean();
        const Vec<Dim> se = res[i].gradient.standard_error();
        const Vec<Dim> ref = cp.problem.reference_gradient(points[i]);
        const std::string label = point_label<Dim>(points[i]);
        for (int k = 0; k < Dim; ++k) {
            StudyRow row;
            row.series = "d/dx" + std::to_string(k);
            row.axis = static_cast<double>(i);
            row.point = label;
            row.samples = res[i].gradient.count();
            row.mean = g[k];
            row.reference = ref[k];
            row.error = std::abs(g[k] - ref[k]);
            row.variance = res[i].gradient.component(k).variance();
            row.standard_error = se[k];
            row.mean_steps = static_cast<double>(res[i].stats.steps) / std::max<double>(1.0, row.samples);
            row.mean_queries = static_cast<double>(res[i].stats.distance_queries) / std::max<double>(1.0, row.samples);
            row.wall_time = wall;
            rep.rows.push_back(row);
            const double z = (g[k] - ref[k]) / se[k];
            rep.verdict(10, "gradient component " + std::to_string(k) + " at " + label, std::abs(z) < 3.0,
                        "estimate " + fmt(g[k]) + ", analytic " + fmt(ref[k]) + ", z " + fmt(z));
        }
    }
    return rep;
}

}  // namespace vcwos
