// SPDX-License-Identifier: Apache-2.0
#pragma once

// Versioned manufactured test problems. P1-P6 cover variable alpha, variable sigma,
// drift, a conformal factor and combinations in 2D and 3D; P5 is the high sigma-bar
// case. C1 (constant solution) and H1 (harmonic) are controls.

#include "vcwos/coefficients/problem.hpp"
#include "vcwos/geometry/scene.hpp"
#include "vcwos/geometry/sdf.hpp"

#include <string>
#include <vector>

namespace vcwos {

inline constexpr const char* catalog_version = "1";

template <int Dim>
struct CatalogProblem {
    std::string id;
    std::string description;
    Scene<Dim> scene;
    Problem<Dim> problem;
    std::vector<Vec<Dim>> probes;
};

struct CatalogEntry {
    std::string id;
    int dim;
    std::string description;
};

inline std::vector<CatalogEntry> catalog_index() {
    return {
        {"P1", 2, "unit disk, Gaussian-bump alpha, sinusoidal solution"},
        {"P2", 3, "unit ball, sinusoidal sigma"},
        {"P3", 2, "square, drift potential, exponential solution"},
        {"P4", 3, "cube, variable alpha, sigma and drift"},
        {"P5", 2, "unit disk, narrow alpha bump giving a high sigma-bar"},
        {"P6", 3, "notched ball, conformal factor and drift"},
        {"C1", 2, "unit disk, variable alpha, constant solution u = 3"},
        {"H1", 2, "unit disk, Laplace, u = x"},
    };
}

inline int catalog_dim(const std::string& id) {
    for (const auto& e : catalog_index()) {
        if (e.id == id) {
            return e.dim;
        }
    }
    throw ConfigError("unknown catalog problem '" + id + "'");
}

namespace catalog_detail {

inline std::string describe(const std::string& id) {
    for (const auto& e : catalog_index()) {
        if (e.id == id) {
            return e.description;
        }
    }
    return {};
}

inline CatalogProblem<2> make_2d(const std::string& id) {
    using F = ScalarField<2>;
    using V = Vec<2>;
    const double eps = 1e-4;
    const Scene<2> disk = Scene<2>::from_sdf(sdf::sphere<2>(V(0, 0), 1.0), eps);
    CatalogProblem<2> c{id, describe(id), disk, {}, {}};
    const std::vector<V> disk_probes{V(0, 0), V(0.5, 0), V(-0.4, 0.3), V(0.1, -0.6), V(0.55, 0.55)};
    if (id == "P1") {
        c.problem.alpha = F::gaussian_bump(V(0.3, 0.2), 0.8, 0.7, 1.0);
        c.problem.manufactured = F::sinusoid(0.5, V(2.0, -1.0), 0.3, 1.0);
        c.probes = disk_probes;
    } else if (id == "P3") {
        c.scene = Scene<2>::from_sdf(sdf::box<2>(V(0, 0), V(1, 1)), eps);
        c.problem.sigma = F::constant(1.0);
        c.problem.drift_potential = F::linear(0.0, V(0.4, -0.3)) + F::sinusoid(0.3, V(1.0, 1.0), 0.0, 0.0);
        c.problem.manufactured = F::exponential(V(0.5, -0.7), 1.0);
        c.probes = {V(0, 0), V(0.5, 0.5), V(-0.6, 0.2), V(0.3, -0.7), V(-0.8, -0.8)};
    } else if (id == "P5") {
        c.problem.alpha = F::gaussian_bump(V(0.1, -0.1), 3.0, 0.35, 1.0);
        c.problem.sigma = F::sinusoid(3.0, V(3.0, 2.0), 0.0, 5.0);
        c.problem.manufactured = F::sinusoid(1.0, V(1.0, 1.0), 0.0, 2.0);
        c.probes = disk_probes;
    } else if (id == "C1") {
        c.problem.alpha = F::gaussian_bump(V(-0.2, 0.1), 1.5, 0.4, 1.0);
        c.problem.sigma = F::constant(2.0);
        c.problem.manufactured = F::constant(3.0);
        c.probes = {V(0, 0), V(0.5, 0.2), V(-0.3, -0.4)};
    } else if (id == "H1") {
        c.problem.manufactured = F::linear(0.0, V(1.0, 0.0));
        c.probes = {V(0, 0), V(0.5, 0.2), V(-0.3, -0.4)};
    } else {
        throw ConfigError("unknown 2D catalog problem '" + id + "'");
    }
    return c;
}

inline CatalogProblem<3> make_3d(const std::string& id) {
    using F = ScalarField<3>;
    using V = Vec<3>;
    const double eps = 1e-4;
    const Scene<3> ball = Scene<3>::from_sdf(sdf::sphere<3>(V(0, 0, 0), 1.0), eps);
    CatalogProblem<3> c{id, describe(id), ball, {}, {}};
    if (id == "P2") {
        c.problem.sigma = F::sinusoid(3.0, V(2.0, 1.0, 0.0), 0.0, 4.0);
        c.problem.manufactured = F::sinusoid(0.5, V(1.0, -1.0, 2.0), 0.2, 1.0);
        c.probes = {V(0, 0, 0), V(0.5, 0, 0), V(-0.3, 0.4, 0.2), V(0.1, -0.2, -0.6), V(0.4, 0.4, 0.4)};
    } else if (id == "P4") {
        c.scene = Scene<3>::from_sdf(sdf::box<3>(V(0, 0, 0), V(1, 1, 1)), eps);
        c.problem.alpha = F::sinusoid(0.5, V(1.0, 2.0, -1.0), 0.0, 1.5);
        c.problem.sigma = F::gaussian_bump(V(0.2, 0.0, -0.3), 3.0, 0.6, 1.0);
        c.problem.drift_potential = F::sinusoid(0.3, V(0.0, 1.0, 0.0), 0.0, 0.0);
        c.problem.manufactured = F::gaussian_bump(V(0.1, 0.2, 0.0), 1.0, 0.8, 0.5);
        c.probes = {V(0, 0, 0), V(0.5, 0.5, 0.5), V(-0.6, 0.2, 0.1), V(0.3, -0.7, 0.4), V(-0.8, -0.8, -0.8)};
    } else if (id == "P6") {
        c.scene = Scene<3>::from_sdf(
            sdf::make_difference<3>(sdf::sphere<3>(V(0, 0, 0), 1.2), sdf::sphere<3>(V(0, 0, 1.2), 0.6)), eps);
        c.problem.conformal_scale = F::sinusoid(0.2, V(1.0, 0.0, 1.0), 0.0, 1.0);
        c.problem.sigma = F::constant(0.5);
        c.problem.drift_potential = F::linear(0.0, V(0.2, 0.1, 0.0));
        c.problem.manufactured = F::constant(1.0) + F::linear(0.0, V(1, 0, 0)) * F::linear(0.0, V(0, 1, 0)) +
                                 F::sinusoid(0.3, V(0.0, 0.0, 2.0), 0.0, 0.0);
        c.probes = {V(0, 0, 0), V(0.6, 0, -0.2), V(-0.4, 0.5, 0.1), V(0.2, -0.3, -0.8), V(0.0, 0.7, 0.3)};
    } else {
        throw ConfigError("unknown 3D catalog problem '" + id + "'");
    }
    return c;
}

}  // namespace catalog_detail

template <int Dim>
CatalogProblem<Dim> catalog_problem(const std::string& id) {
    if constexpr (Dim == 2) {
        return catalog_detail::make_2d(id);
    } else {
        return catalog_detail::make_3d(id);
    }
}

}  // namespace vcwos
