// SPDX-License-Identifier: Apache-2.0
#pragma once

// Run configuration for the command line front end. Schema (all keys optional
// unless noted; unknown keys are rejected):
//
//   dim            2 or 3 (required unless "catalog" is given)
//   catalog        catalog problem id; supplies boundary, coefficients and probe points
//   boundary       {"sdf": shape} | {"polyline": path} | {"obj": path}
//   bounds         {"lo": [..], "hi": [..]}, needed for unbounded SDF trees
//   epsilon        shell width (default 1e-3, or the catalog scene's)
//   coefficients   {"alpha", "sigma", "gamma_omega", "lambda", "f", "g", "manufactured"}: fields
//   estimator      classic | dt | nf | sde
//   spp, seed, workers, max_steps, sigma_bar, window [w_min, w_max], max_splits
//   nf_kernel      exact | kelvin | paper;   nf_sampling   uniform | mixture
//   sde_step       0 selects 1e-3 R^2
//   gradient       also estimate grad u;     mask_exterior  skip points outside Omega
//   grid           {"origin": [..], "axes": [[..], [..]], "resolution": [nx, ny]}
//   points         [[..], ...]
//   output         {"dir": path, "stem": name}
//
// Relative file paths resolve against the directory of the config file.

#include "vcwos/coefficients/problem.hpp"
#include "vcwos/estimators/solve.hpp"
#include "vcwos/estimators/walk.hpp"
#include "vcwos/geometry/io.hpp"
#include "vcwos/geometry/scene.hpp"
#include "vcwos/harness/catalog.hpp"
#include "vcwos/io/json.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace vcwos::io {

struct GridTarget {
    std::vector<double> origin;
    std::array<std::vector<double>, 2> axes;
    std::array<int, 2> resolution{64, 64};

    bool operator==(const GridTarget&) const = default;
};

struct SceneConfig {
    int dim = 2;
    std::string catalog;
    Json boundary;
    Json bounds;
    std::optional<double> epsilon;
    Json coefficients = Json::object();
    std::string estimator = "dt";
    std::uint64_t spp = 64;
    std::uint64_t seed = 0;
    int workers = 0;
    int max_steps = 10000;
    std::optional<double> sigma_bar;
    std::optional<WeightWindow> window;
    int max_splits = 64;
    std::string nf_kernel = "exact";
    std::string nf_sampling = "mixture";
    double sde_step = 0.0;
    bool gradient = false;
    bool mask_exterior = false;
    std::optional<GridTarget> grid;
    std::vector<std::vector<double>> points;
    std::string out_dir = ".";
    std::string stem = "solution";
    /// Directory used to resolve relative paths; not part of the emitted config.
    std::string base_dir;

    bool operator==(const SceneConfig& o) const {
        return dim == o.dim && catalog == o.catalog && boundary == o.boundary && bounds == o.bounds &&
               epsilon == o.epsilon && coefficients == o.coefficients && estimator == o.estimator && spp == o.spp &&
               seed == o.seed && workers == o.workers && max_steps == o.max_steps && sigma_bar == o.sigma_bar &&
               window == o.window && max_splits == o.max_splits && nf_kernel == o.nf_kernel &&
               nf_sampling == o.nf_sampling && sde_step == o.sde_step && gradient == o.gradient &&
               mask_exterior == o.mask_exterior && grid == o.grid && points == o.points && out_dir == o.out_dir &&
               stem == o.stem;
    }
};

namespace config_detail {

inline const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "dim",       "catalog",    "boundary",    "bounds",    "epsilon",     "coefficients", "estimator",
        "spp",       "seed",       "workers",     "max_steps", "sigma_bar",   "window",       "max_splits",
        "nf_kernel", "nf_sampling", "sde_step",   "gradient",  "mask_exterior", "grid",       "points",
        "output"};
    return keys;
}

inline const std::set<std::string>& coefficient_keys() {
    static const std::set<std::string> keys{"alpha", "sigma", "gamma_omega", "lambda", "f", "g", "manufactured"};
    return keys;
}

inline std::vector<double> numbers(const Json& j, const std::string& where) {
    if (!j.is_array()) {
        throw ConfigError(where + ": expected an array");
    }
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) {
            throw ConfigError(where + ": expected numbers");
        }
        out.push_back(v.get<double>());
    }
    return out;
}

template <typename T>
T get(const Json& j, const char* key, const std::string& what) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(std::string("config: '") + key + "' must be " + what);
    }
}

inline std::string resolve(const std::string& base, const std::string& path) {
    const std::filesystem::path p(path);
    if (p.is_absolute() || base.empty()) {
        return path;
    }
    return (std::filesystem::path(base) / p).string();
}

template <int Dim>
Vec<Dim> to_vec(const std::vector<double>& v, const std::string& where) {
    if (v.size() != static_cast<std::size_t>(Dim)) {
        throw ConfigError(where + ": expected " + std::to_string(Dim) + " components");
    }
    Vec<Dim> x;
    for (int k = 0; k < Dim; ++k) {
        x[k] = v[static_cast<std::size_t>(k)];
    }
    return x;
}

}  // namespace config_detail

template <int Dim>
Scene<Dim> build_scene(const SceneConfig& c);

template <int Dim>
Problem<Dim> build_problem(const SceneConfig& c);

inline WalkConfig walk_config(const SceneConfig& c);

/// Builds the typed scene and problem once so that errors surface at parse time.
inline void validate(const SceneConfig& c) {
    if (c.dim != 2 && c.dim != 3) {
        throw ConfigError("config: dim must be 2 or 3");
    }
    if (c.spp < 1) {
        throw ConfigError("config: spp must be at least 1");
    }
    parse_estimator(c.estimator);
    parse_nf_kernel(c.nf_kernel);
    parse_nf_sampling(c.nf_sampling);
    if (c.grid) {
        if (c.grid->resolution[0] < 1 || c.grid->resolution[1] < 1) {
            throw ConfigError("config: grid resolution must be positive");
        }
        if (c.grid->origin.size() != static_cast<std::size_t>(c.dim) ||
            c.grid->axes[0].size() != static_cast<std::size_t>(c.dim) ||
            c.grid->axes[1].size() != static_cast<std::size_t>(c.dim)) {
            throw ConfigError("config: grid origin and axes need dim components");
        }
    }
    for (const auto& p : c.points) {
        if (p.size() != static_cast<std::size_t>(c.dim)) {
            throw ConfigError("config: every point needs dim components");
        }
    }
    try {
        // The solver probes the coefficients, which rejects alpha <= 0 and sigma < 0.
        if (c.dim == 2) {
            Solver<2>(build_scene<2>(c), build_problem<2>(c), walk_config(c));
        } else {
            Solver<3>(build_scene<3>(c), build_problem<3>(c), walk_config(c));
        }
    } catch (const DomainError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

inline SceneConfig config_from_json(const Json& j, const std::string& base_dir = {}) {
    using namespace config_detail;
    if (!j.is_object()) {
        throw ConfigError("config: expected a JSON object");
    }
    for (const auto& item : j.items()) {
        if (!known_keys().count(item.key())) {
            throw ConfigError("config: unknown key '" + item.key() + "'");
        }
    }
    SceneConfig c;
    c.base_dir = base_dir;
    if (j.contains("catalog")) {
        c.catalog = get<std::string>(j, "catalog", "a string");
        c.dim = catalog_dim(c.catalog);
        if (j.contains("dim") && get<int>(j, "dim", "an integer") != c.dim) {
            throw ConfigError("config: dim disagrees with the catalog problem");
        }
        if (j.contains("boundary") || j.contains("coefficients")) {
            throw ConfigError("config: 'catalog' replaces 'boundary' and 'coefficients'");
        }
    } else {
        if (!j.contains("dim") || !j.contains("boundary")) {
            throw ConfigError("config: 'dim' and 'boundary' are required without 'catalog'");
        }
        c.dim = get<int>(j, "dim", "an integer");
        c.boundary = j.at("boundary");
    }
    if (j.contains("bounds")) c.bounds = j.at("bounds");
    if (j.contains("epsilon")) c.epsilon = get<double>(j, "epsilon", "a number");
    if (j.contains("coefficients")) {
        c.coefficients = j.at("coefficients");
        if (!c.coefficients.is_object()) {
            throw ConfigError("config: 'coefficients' must be an object");
        }
        for (const auto& item : c.coefficients.items()) {
            if (!coefficient_keys().count(item.key())) {
                throw ConfigError("config: unknown coefficient '" + item.key() + "'");
            }
        }
    }
    if (j.contains("estimator")) c.estimator = get<std::string>(j, "estimator", "a string");
    if (j.contains("spp")) c.spp = get<std::uint64_t>(j, "spp", "a positive integer");
    if (j.contains("seed")) c.seed = get<std::uint64_t>(j, "seed", "a nonnegative integer");
    if (j.contains("workers")) c.workers = get<int>(j, "workers", "an integer");
    if (j.contains("max_steps")) c.max_steps = get<int>(j, "max_steps", "an integer");
    if (j.contains("sigma_bar") && !j.at("sigma_bar").is_null()) c.sigma_bar = get<double>(j, "sigma_bar", "a number");
    if (j.contains("window") && !j.at("window").is_null()) c.window = window_from_json(j.at("window"));
    if (j.contains("max_splits")) c.max_splits = get<int>(j, "max_splits", "an integer");
    if (j.contains("nf_kernel")) c.nf_kernel = get<std::string>(j, "nf_kernel", "a string");
    if (j.contains("nf_sampling")) c.nf_sampling = get<std::string>(j, "nf_sampling", "a string");
    if (j.contains("sde_step")) c.sde_step = get<double>(j, "sde_step", "a number");
    if (j.contains("gradient")) c.gradient = get<bool>(j, "gradient", "a boolean");
    if (j.contains("mask_exterior")) c.mask_exterior = get<bool>(j, "mask_exterior", "a boolean");
    if (j.contains("grid")) {
        const Json& g = j.at("grid");
        GridTarget t;
        t.origin = numbers(json_detail::member(g, "origin", "grid"), "grid.origin");
        const Json& axes = json_detail::member(g, "axes", "grid");
        if (!axes.is_array() || axes.size() != 2) {
            throw ConfigError("grid.axes: expected two vectors");
        }
        t.axes = {numbers(axes[0], "grid.axes[0]"), numbers(axes[1], "grid.axes[1]")};
        const auto res = numbers(json_detail::member(g, "resolution", "grid"), "grid.resolution");
        if (res.size() != 2) {
            throw ConfigError("grid.resolution: expected [nx, ny]");
        }
        t.resolution = {static_cast<int>(res[0]), static_cast<int>(res[1])};
        c.grid = t;
    }
    if (j.contains("points")) {
        const Json& pts = j.at("points");
        if (!pts.is_array()) {
            throw ConfigError("config: 'points' must be an array");
        }
        for (std::size_t i = 0; i < pts.size(); ++i) {
            c.points.push_back(numbers(pts[i], "points[" + std::to_string(i) + "]"));
        }
    }
    if (j.contains("output")) {
        const Json& o = j.at("output");
        if (o.contains("dir")) c.out_dir = get<std::string>(o, "dir", "a string");
        if (o.contains("stem")) c.stem = get<std::string>(o, "stem", "a string");
    }
    validate(c);
    return c;
}

inline Json config_to_json(const SceneConfig& c) {
    Json j;
    if (c.catalog.empty()) {
        j["dim"] = c.dim;
        j["boundary"] = c.boundary;
        if (!c.coefficients.empty()) {
            j["coefficients"] = c.coefficients;
        }
    } else {
        j["catalog"] = c.catalog;
    }
    if (!c.bounds.is_null()) j["bounds"] = c.bounds;
    if (c.epsilon) j["epsilon"] = *c.epsilon;
    j["estimator"] = c.estimator;
    j["spp"] = c.spp;
    j["seed"] = c.seed;
    j["workers"] = c.workers;
    j["max_steps"] = c.max_steps;
    j["sigma_bar"] = c.sigma_bar ? Json(*c.sigma_bar) : Json(nullptr);
    j["window"] = c.window ? window_to_json(*c.window) : Json(nullptr);
    j["max_splits"] = c.max_splits;
    j["nf_kernel"] = c.nf_kernel;
    j["nf_sampling"] = c.nf_sampling;
    j["sde_step"] = c.sde_step;
    j["gradient"] = c.gradient;
    j["mask_exterior"] = c.mask_exterior;
    if (c.grid) {
        j["grid"] = {{"origin", c.grid->origin},
                     {"axes", {c.grid->axes[0], c.grid->axes[1]}},
                     {"resolution", {c.grid->resolution[0], c.grid->resolution[1]}}};
    }
    if (!c.points.empty()) j["points"] = c.points;
    j["output"] = {{"dir", c.out_dir}, {"stem", c.stem}};
    return j;
}

inline SceneConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config '" + path + "'");
    }
    Json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config '" + path + "': " + e.what());
    }
    return config_from_json(j, std::filesystem::path(path).parent_path().string());
}

inline WalkConfig walk_config(const SceneConfig& c) {
    WalkConfig w;
    w.epsilon = c.epsilon.value_or(c.catalog.empty() ? 1e-3 : (c.dim == 2 ? catalog_problem<2>(c.catalog).scene.epsilon()
                                                                          : catalog_problem<3>(c.catalog).scene.epsilon()));
    w.max_steps = c.max_steps;
    w.sigma_bar_override = c.sigma_bar;
    w.weight_window = c.window;
    w.max_splits = c.max_splits;
    w.rng_seed = c.seed;
    w.nf_kernel = parse_nf_kernel(c.nf_kernel);
    w.nf_sampling = parse_nf_sampling(c.nf_sampling);
    w.sde_step = c.sde_step;
    w.validate();
    return w;
}

template <int Dim>
Scene<Dim> build_scene(const SceneConfig& c) {
    using namespace config_detail;
    const double eps = walk_config(c).epsilon;
    Scene<Dim> scene = [&] {
        if (!c.catalog.empty()) {
            return catalog_problem<Dim>(c.catalog).scene.with_epsilon(eps);
        }
        const std::string kind = json_detail::single_key(c.boundary, "boundary");
        const Json& v = c.boundary.at(kind);
        if (kind == "sdf") {
            return Scene<Dim>::from_sdf(shape_from_json<Dim>(v, "boundary.sdf"), eps);
        }
        if (!v.is_string()) {
            throw ConfigError("boundary." + kind + ": expected a file path");
        }
        const std::string path = resolve(c.base_dir, v.get<std::string>());
        if (!std::filesystem::exists(path)) {
            throw ConfigError("boundary file '" + path + "' does not exist");
        }
        if (kind == "polyline") {
            if constexpr (Dim == 2) {
                return Scene<Dim>::from_boundary(geometry_io::load_polyline(path), eps);
            } else {
                throw ConfigError("polyline boundaries are 2D");
            }
        }
        if (kind == "obj") {
            if constexpr (Dim == 3) {
                return Scene<Dim>::from_boundary(geometry_io::load_obj(path), eps);
            } else {
                throw ConfigError("OBJ boundaries are 3D");
            }
        }
        throw ConfigError("boundary: unknown kind '" + kind + "'");
    }();
    if (!c.bounds.is_null()) {
        const Json& lo = json_detail::member(c.bounds, "lo", "bounds");
        const Json& hi = json_detail::member(c.bounds, "hi", "bounds");
        scene.set_bounds(Aabb<Dim>{vec_from_json<Dim>(lo, "bounds.lo"), vec_from_json<Dim>(hi, "bounds.hi")});
    }
    return scene;
}

template <int Dim>
Problem<Dim> build_problem(const SceneConfig& c) {
    if (!c.catalog.empty()) {
        return catalog_problem<Dim>(c.catalog).problem;
    }
    Problem<Dim> p;
    const Json& k = c.coefficients;
    const auto field = [&](const char* key) { return field_from_json<Dim>(k.at(key), std::string("coefficients.") + key); };
    if (k.contains("alpha")) p.alpha = field("alpha");
    if (k.contains("sigma")) p.sigma = field("sigma");
    if (k.contains("gamma_omega")) p.drift_potential = field("gamma_omega");
    if (k.contains("lambda")) p.conformal_scale = field("lambda");
    if (k.contains("f")) p.source = field("f");
    if (k.contains("g")) p.dirichlet = field("g");
    if (k.contains("manufactured")) {
        if (k.contains("f") || k.contains("g")) {
            throw ConfigError("coefficients: 'manufactured' replaces 'f' and 'g'");
        }
        p.manufactured = field("manufactured");
    }
    if (p.conformal_scale && k.contains("alpha")) {
        throw ConfigError("coefficients: 'lambda' replaces 'alpha'");
    }
    return p;
}

/// Evaluation points: the grid, else explicit points, else the catalog probes.
template <int Dim>
std::vector<Vec<Dim>> target_points(const SceneConfig& c) {
    std::vector<Vec<Dim>> out;
    if (c.grid) {
        const Vec<Dim> o = config_detail::to_vec<Dim>(c.grid->origin, "grid.origin");
        const Vec<Dim> u = config_detail::to_vec<Dim>(c.grid->axes[0], "grid.axes[0]");
        const Vec<Dim> v = config_detail::to_vec<Dim>(c.grid->axes[1], "grid.axes[1]");
        const int nx = c.grid->resolution[0];
        const int ny = c.grid->resolution[1];
        // Row-major from the top row (largest v) down, pixel centers.
        for (int row = 0; row < ny; ++row) {
            for (int col = 0; col < nx; ++col) {
                const double s = (col + 0.5) / nx;
                const double t = (ny - row - 0.5) / ny;
                out.push_back(o + s * u + t * v);
            }
        }
        return out;
    }
    if (!c.points.empty()) {
        for (std::size_t i = 0; i < c.points.size(); ++i) {
            out.push_back(config_detail::to_vec<Dim>(c.points[i], "points[" + std::to_string(i) + "]"));
        }
        return out;
    }
    if (!c.catalog.empty()) {
        return catalog_problem<Dim>(c.catalog).probes;
    }
    throw ConfigError("config: no evaluation target (grid, points or catalog)");
}

}  // namespace vcwos::io
