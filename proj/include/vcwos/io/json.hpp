// SPDX-License-Identifier: Apache-2.0
#pragma once

// JSON forms of fields, CSG shapes and walk settings.
//
// Field:  a number (constant) or a single-key object
//   {"constant": c}
//   {"linear": {"offset": o, "slope": [..]}}
//   {"exponential": {"rate": [..], "amplitude": a}}
//   {"gaussian_bump": {"center": [..], "amplitude": a, "width": w, "baseline": b}}
//   {"sinusoid": {"amplitude": a, "frequency": [..], "phase": p, "offset": o}}
//   {"sum": [field, ...]}, {"product": [field, ...]}
//
// Shape:  a single-key object
//   {"sphere": {"center": [..], "radius": r}}
//   {"box": {"center": [..], "half_extent": [..]}}
//   {"plane": {"normal": [..], "offset": o}}          (inside where n . x < o)
//   {"union" | "intersection" | "difference": [shape, shape]}
//   {"smooth_union": {"k": k, "shapes": [shape, shape]}}
//   {"transform": {"angle": t, "axis": [..] (3D only), "translation": [..], "shape": shape}}

#include "vcwos/coefficients/field.hpp"
#include "vcwos/estimators/walk.hpp"
#include "vcwos/geometry/sdf.hpp"
#include "vcwos/types.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace vcwos::io {

using Json = nlohmann::json;

namespace json_detail {

inline const Json& member(const Json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) {
        throw ConfigError(where + ": missing '" + key + "'");
    }
    return j.at(key);
}

inline double number(const Json& j, const char* key, const std::string& where) {
    const Json& v = member(j, key, where);
    if (!v.is_number()) {
        throw ConfigError(where + ": '" + key + "' must be a number");
    }
    return v.get<double>();
}

inline double number_or(const Json& j, const char* key, double fallback, const std::string& where) {
    return j.contains(key) ? number(j, key, where) : fallback;
}

/// The single key of a one-entry object.
inline std::string single_key(const Json& j, const std::string& where) {
    if (!j.is_object() || j.size() != 1) {
        throw ConfigError(where + ": expected an object with exactly one key");
    }
    return j.begin().key();
}

}  // namespace json_detail

template <int Dim>
Vec<Dim> vec_from_json(const Json& j, const std::string& where) {
    if (!j.is_array() || j.size() != static_cast<std::size_t>(Dim)) {
        throw ConfigError(where + ": expected an array of " + std::to_string(Dim) + " numbers");
    }
    Vec<Dim> v;
    for (int k = 0; k < Dim; ++k) {
        if (!j[static_cast<std::size_t>(k)].is_number()) {
            throw ConfigError(where + ": expected numbers");
        }
        v[k] = j[static_cast<std::size_t>(k)].get<double>();
    }
    return v;
}

template <int Dim>
Json vec_to_json(const Vec<Dim>& v) {
    Json j = Json::array();
    for (int k = 0; k < Dim; ++k) {
        j.push_back(v[k]);
    }
    return j;
}

template <int Dim>
ScalarField<Dim> field_from_json(const Json& j, const std::string& where = "field") {
    using F = ScalarField<Dim>;
    using namespace json_detail;
    if (j.is_number()) {
        return F::constant(j.get<double>());
    }
    const std::string kind = single_key(j, where);
    const Json& p = j.at(kind);
    const std::string at = where + "." + kind;
    if (kind == "constant") {
        if (!p.is_number()) {
            throw ConfigError(at + ": expected a number");
        }
        return F::constant(p.get<double>());
    }
    if (kind == "linear") {
        return F::linear(number_or(p, "offset", 0.0, at), vec_from_json<Dim>(member(p, "slope", at), at + ".slope"));
    }
    if (kind == "exponential") {
        return F::exponential(vec_from_json<Dim>(member(p, "rate", at), at + ".rate"),
                              number_or(p, "amplitude", 1.0, at));
    }
    if (kind == "gaussian_bump") {
        return F::gaussian_bump(vec_from_json<Dim>(member(p, "center", at), at + ".center"), number(p, "amplitude", at),
                                number(p, "width", at), number_or(p, "baseline", 0.0, at));
    }
    if (kind == "sinusoid") {
        return F::sinusoid(number(p, "amplitude", at), vec_from_json<Dim>(member(p, "frequency", at), at + ".frequency"),
                           number_or(p, "phase", 0.0, at), number_or(p, "offset", 0.0, at));
    }
    if (kind == "sum" || kind == "product") {
        if (!p.is_array() || p.empty()) {
            throw ConfigError(at + ": expected a nonempty array");
        }
        std::vector<F> parts;
        for (std::size_t i = 0; i < p.size(); ++i) {
            parts.push_back(field_from_json<Dim>(p[i], at + "[" + std::to_string(i) + "]"));
        }
        return kind == "sum" ? F::sum(std::move(parts)) : F::product(std::move(parts));
    }
    throw ConfigError(where + ": unknown field kind '" + kind + "'");
}

template <int Dim>
Json field_to_json(const ScalarField<Dim>& f) {
    const auto& n = f.node();
    switch (n.kind) {
        case FieldKind::constant: return Json{{"constant", n.offset}};
        case FieldKind::linear: return Json{{"linear", {{"offset", n.offset}, {"slope", vec_to_json<Dim>(n.vector)}}}};
        case FieldKind::exponential:
            return Json{{"exponential", {{"rate", vec_to_json<Dim>(n.vector)}, {"amplitude", n.amplitude}}}};
        case FieldKind::gaussian_bump:
            return Json{{"gaussian_bump",
                         {{"center", vec_to_json<Dim>(n.vector)},
                          {"amplitude", n.amplitude},
                          {"width", n.width},
                          {"baseline", n.offset}}}};
        case FieldKind::sinusoid:
            return Json{{"sinusoid",
                         {{"amplitude", n.amplitude},
                          {"frequency", vec_to_json<Dim>(n.vector)},
                          {"phase", n.phase},
                          {"offset", n.offset}}}};
        case FieldKind::sum:
        case FieldKind::product: {
            Json parts = Json::array();
            for (const auto& c : n.children) {
                parts.push_back(field_to_json<Dim>(c));
            }
            return Json{{to_string(n.kind), parts}};
        }
    }
    throw ConfigError("field_to_json: unknown kind");
}

template <int Dim>
sdf::NodePtr<Dim> shape_from_json(const Json& j, const std::string& where = "shape") {
    using namespace json_detail;
    const std::string kind = single_key(j, where);
    const Json& p = j.at(kind);
    const std::string at = where + "." + kind;
    const auto pair = [&](const Json& arr) {
        if (!arr.is_array() || arr.size() != 2) {
            throw ConfigError(at + ": expected two shapes");
        }
        return std::pair{shape_from_json<Dim>(arr[0], at + "[0]"), shape_from_json<Dim>(arr[1], at + "[1]")};
    };
    if (kind == "sphere") {
        return sdf::sphere<Dim>(vec_from_json<Dim>(member(p, "center", at), at + ".center"), number(p, "radius", at));
    }
    if (kind == "box") {
        return sdf::box<Dim>(vec_from_json<Dim>(member(p, "center", at), at + ".center"),
                             vec_from_json<Dim>(member(p, "half_extent", at), at + ".half_extent"));
    }
    if (kind == "plane") {
        return sdf::plane<Dim>(vec_from_json<Dim>(member(p, "normal", at), at + ".normal"), number(p, "offset", at));
    }
    if (kind == "union" || kind == "intersection" || kind == "difference") {
        auto [a, b] = pair(p);
        if (kind == "union") {
            return sdf::make_union<Dim>(a, b);
        }
        return kind == "intersection" ? sdf::make_intersection<Dim>(a, b) : sdf::make_difference<Dim>(a, b);
    }
    if (kind == "smooth_union") {
        auto [a, b] = pair(member(p, "shapes", at));
        return sdf::smooth_union<Dim>(a, b, number(p, "k", at));
    }
    if (kind == "transform") {
        const double angle = number_or(p, "angle", 0.0, at);
        Eigen::Matrix<double, Dim, Dim> rotation;
        if constexpr (Dim == 2) {
            rotation = sdf::rotation_2d(angle);
        } else {
            rotation = p.contains("axis") ? sdf::rotation_3d(vec_from_json<3>(p.at("axis"), at + ".axis"), angle)
                                          : Eigen::Matrix3d::Identity();
        }
        const Vec<Dim> translation =
            p.contains("translation") ? vec_from_json<Dim>(p.at("translation"), at + ".translation") : Vec<Dim>::Zero();
        return sdf::transform<Dim>(shape_from_json<Dim>(member(p, "shape", at), at + ".shape"), rotation, translation);
    }
    throw ConfigError(where + ": unknown shape '" + kind + "'");
}

inline Json window_to_json(const WeightWindow& w) { return Json::array({w.w_min, w.w_max}); }

inline WeightWindow window_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ConfigError("window: expected [w_min, w_max]");
    }
    WeightWindow w{j[0].get<double>(), j[1].get<double>()};
    w.validate();
    return w;
}

inline Json walk_config_to_json(const WalkConfig& cfg) {
    Json j;
    j["epsilon"] = cfg.epsilon;
    j["max_steps"] = cfg.max_steps;
    j["sigma_bar"] = cfg.sigma_bar_override ? Json(*cfg.sigma_bar_override) : Json(nullptr);
    j["window"] = cfg.weight_window ? window_to_json(*cfg.weight_window) : Json(nullptr);
    j["max_splits"] = cfg.max_splits;
    j["seed"] = cfg.rng_seed;
    j["nf_kernel"] = to_string(cfg.nf_kernel);
    j["nf_sampling"] = to_string(cfg.nf_sampling);
    j["sde_step"] = cfg.sde_step;
    return j;
}

}  // namespace vcwos::io
