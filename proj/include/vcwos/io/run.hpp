// SPDX-License-Identifier: Apache-2.0
#pragma once

// Batch runs behind the command line tool: evaluate a config on its target points
// and write CSV, PFM/PGM and a JSON summary, or dispatch a named study.

#include "vcwos/estimators/solve.hpp"
#include "vcwos/harness/studies.hpp"
#include "vcwos/io/config.hpp"
#include "vcwos/io/images.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace vcwos::io {

struct RunOutputs {
    std::string csv;
    std::string json;
    std::string pfm;  // empty without a grid
    std::string pgm;
    std::size_t evaluated = 0;
    std::size_t masked = 0;
};

namespace run_detail {

inline std::string g17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline Json stats_json(const WalkStats& s, std::uint64_t walks, std::uint64_t failed) {
    return {{"walks", walks},
            {"failed", failed},
            {"steps", s.steps},
            {"distance_queries", s.distance_queries},
            {"kernel_evals", s.kernel_evals},
            {"max_step_hits", s.max_step_hits},
            {"roulette_kills", s.roulette_kills},
            {"splits", s.splits},
            {"split_cap_hits", s.split_cap_hits},
            {"null_weight_violations", s.null_weight_violations}};
}

template <int Dim>
RunOutputs run_solve(const SceneConfig& c, std::ostream& log) {
    const Scene<Dim> scene = build_scene<Dim>(c);
    const Problem<Dim> problem = build_problem<Dim>(c);
    const WalkConfig cfg = walk_config(c);
    const Estimator e = parse_estimator(c.estimator);
    if (c.gradient && e != Estimator::delta_tracking && e != Estimator::next_flight) {
        throw ConfigError("gradient estimates need the dt or nf recursion");
    }
    const std::vector<Vec<Dim>> targets = target_points<Dim>(c);

    // Masked points keep their slot so the image lines up with the grid.
    std::vector<Vec<Dim>> points;
    std::vector<std::size_t> slot;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const bool usable = scene.inside(targets[i]) && (!c.gradient || scene.distance(targets[i]) > cfg.epsilon);
        if (c.mask_exterior && !usable) {
            continue;
        }
        points.push_back(targets[i]);
        slot.push_back(i);
    }

    const auto t0 = std::chrono::steady_clock::now();
    const Solver<Dim> solver(scene, problem, cfg);
    std::vector<PointEstimate> values;
    std::vector<GradientPointEstimate<Dim>> gradients;
    if (c.gradient) {
        gradients = solver.solve_gradient(points, c.spp, e, c.workers);
        for (const auto& g : gradients) {
            PointEstimate v;
            v.samples = g.value;
            v.stats = g.stats;
            v.failed = g.failed;
            values.push_back(v);
        }
    } else {
        values = solver.solve(points, c.spp, e, c.workers);
    }
    const double wall = study_detail::seconds_since(t0);

    std::filesystem::create_directories(c.out_dir);
    const std::filesystem::path stem = std::filesystem::path(c.out_dir) / c.stem;
    RunOutputs out;
    out.evaluated = points.size();
    out.masked = targets.size() - points.size();

    out.csv = stem.string() + ".csv";
    {
        std::ofstream csv(out.csv);
        if (!csv) {
            throw ConfigError("cannot write '" + out.csv + "'");
        }
        const char* axes[3] = {"x", "y", "z"};
        for (int k = 0; k < Dim; ++k) {
            csv << axes[k] << ',';
        }
        csv << "mean,stderr,n,avg_steps,avg_queries";
        if (c.gradient) {
            for (int k = 0; k < Dim; ++k) csv << ",grad_" << axes[k];
            for (int k = 0; k < Dim; ++k) csv << ",grad_" << axes[k] << "_stderr";
        }
        csv << '\n';
        for (std::size_t i = 0; i < points.size(); ++i) {
            const PointEstimate& v = values[i];
            const double n = static_cast<double>(std::max<std::uint64_t>(v.count(), 1));
            for (int k = 0; k < Dim; ++k) {
                csv << g17(points[i][k]) << ',';
            }
            csv << g17(v.mean()) << ',' << g17(v.standard_error()) << ',' << v.count() << ','
                << g17(static_cast<double>(v.stats.steps) / n) << ','
                << g17(static_cast<double>(v.stats.distance_queries) / n);
            if (c.gradient) {
                const Vec<Dim> g = gradients[i].gradient.mean();
                const Vec<Dim> se = gradients[i].gradient.standard_error();
                for (int k = 0; k < Dim; ++k) csv << ',' << g17(g[k]);
                for (int k = 0; k < Dim; ++k) csv << ',' << g17(se[k]);
            }
            csv << '\n';
        }
    }

    if (c.grid) {
        const int nx = c.grid->resolution[0];
        const int ny = c.grid->resolution[1];
        std::vector<float> pixels(targets.size(), std::numeric_limits<float>::quiet_NaN());
        for (std::size_t i = 0; i < points.size(); ++i) {
            pixels[slot[i]] = static_cast<float>(values[i].mean());
        }
        out.pfm = stem.string() + ".pfm";
        out.pgm = stem.string() + ".pgm";
        write_pfm(out.pfm, nx, ny, pixels);
        write_pgm(out.pgm, nx, ny, pixels);
    }

    WalkStats totals;
    std::uint64_t walks = 0;
    std::uint64_t failed = 0;
    for (const auto& v : values) {
        totals.merge(v.stats);
        walks += v.count();
        failed += v.failed;
    }
    Json summary;
    summary["config"] = config_to_json(c);
    summary["seed"] = c.seed;
    summary["walk"] = walk_config_to_json(cfg);
    summary["kernel_sigma"] = solver.transformed().kernel_sigma();
    summary["sigma_bar"] = solver.transformed().sigma_bar();
    summary["wall_time"] = wall;
    summary["points"] = {{"targets", targets.size()}, {"evaluated", points.size()}, {"masked", out.masked}};
    summary["totals"] = stats_json(totals, walks, failed);
    summary["outputs"] = {{"csv", out.csv}, {"pfm", out.pfm.empty() ? Json(nullptr) : Json(out.pfm)},
                          {"pgm", out.pgm.empty() ? Json(nullptr) : Json(out.pgm)}};
    out.json = stem.string() + ".json";
    std::ofstream(out.json) << summary.dump(2) << '\n';

    log << "evaluated " << points.size() << " points (" << out.masked << " masked), " << walks << " walks in " << wall
        << " s\n";
    if (failed > 0) {
        log << "warning: " << failed << " walks failed and were dropped\n";
    }
    return out;
}

template <int Dim>
CatalogProblem<Dim> study_problem(const SceneConfig& c) {
    CatalogProblem<Dim> cp{c.catalog.empty() ? "config" : c.catalog, "", build_scene<Dim>(c), build_problem<Dim>(c), {}};
    if (!c.points.empty()) {
        cp.probes = target_points<Dim>(c);
    } else if (!c.catalog.empty()) {
        cp.probes = catalog_problem<Dim>(c.catalog).probes;
    } else {
        throw ConfigError("studies need 'points' or a catalog problem");
    }
    return cp;
}

template <int Dim>
StudyReport run_study(const SceneConfig& c, const std::string& name, std::optional<std::uint64_t> samples) {
    const CatalogProblem<Dim> cp = study_problem<Dim>(c);
    StudyOptions opt;
    opt.seed = c.seed;
    opt.workers = c.workers;
    opt.walk = walk_config(c);
    const Estimator e = parse_estimator(c.estimator);
    const auto n = [&](std::uint64_t fallback) { return samples.value_or(fallback); };
    // Single-point studies: the first explicit point, else the first off-center catalog probe.
    const Vec<Dim> x = !c.points.empty() || cp.probes.size() < 2 ? cp.probes.front() : cp.probes[1];
    const auto needs_reference = [&] {
        if (!cp.problem.has_reference()) {
            throw ConfigError("study '" + name + "' needs a manufactured solution");
        }
    };

    if (name == "unbiasedness") {
        needs_reference();
        return unbiasedness_study(cp, n(10000), {Estimator::delta_tracking, Estimator::next_flight}, opt);
    }
    if (name == "convergence") {
        needs_reference();
        const std::uint64_t top = std::max<std::uint64_t>(n(100000), 10000);
        return convergence_study(cp, cp.probes, {top / 1000, top / 100, top / 10, top}, e, opt);
    }
    if (name == "epsilon-bias") {
        needs_reference();
        EpsilonStudySettings set;
        set.samples = n(100000);
        set.estimator = e == Estimator::next_flight ? e : Estimator::delta_tracking;
        return epsilon_bias_study(cp, x, set, opt);
    }
    if (name == "sde-step") {
        needs_reference();
        return sde_step_study(cp, x, {3e-2, 1e-2, 3e-3}, n(20000), opt);
    }
    if (name == "query-count") {
        return query_count_study(cp, x, {0.0, 10.0, 40.0}, n(2000), opt);
    }
    if (name == "weight-window") {
        return weight_window_study(cp, n(20000), opt.walk.weight_window.value_or(WeightWindow{}), opt);
    }
    if (name == "gradient") {
        needs_reference();
        const std::vector<Vec<Dim>> pts(cp.probes.begin(),
                                        cp.probes.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(3, cp.probes.size())));
        return gradient_study(cp, pts, n(20000), e == Estimator::next_flight ? e : Estimator::delta_tracking, opt);
    }
    throw ConfigError("unknown study '" + name + "'");
}

}  // namespace run_detail

inline const std::vector<std::string>& study_names() {
    static const std::vector<std::string> names{"unbiasedness", "convergence",   "epsilon-bias", "sde-step",
                                                "query-count",  "weight-window", "gradient"};
    return names;
}

/// Evaluates the config on its target points and writes <out>/<stem>.{csv,json[,pfm,pgm]}.
inline RunOutputs run_solve(const SceneConfig& c, std::ostream& log) {
    return c.dim == 2 ? run_detail::run_solve<2>(c, log) : run_detail::run_solve<3>(c, log);
}

/// Runs a named study; `samples` overrides the study's default walk count (the
/// largest N for convergence).
inline StudyReport run_study(const SceneConfig& c, const std::string& name,
                             std::optional<std::uint64_t> samples = std::nullopt) {
    return c.dim == 2 ? run_detail::run_study<2>(c, name, samples) : run_detail::run_study<3>(c, name, samples);
}

}  // namespace vcwos::io
