// SPDX-License-Identifier: Apache-2.0
#pragma once

// Configuration, counters and the weight window shared by all walkers.

#include "vcwos/rng.hpp"
#include "vcwos/types.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

namespace vcwos {

enum class Estimator { classic, delta_tracking, next_flight, sde };

inline const char* to_string(Estimator e) {
    switch (e) {
        case Estimator::classic: return "classic";
        case Estimator::delta_tracking: return "dt";
        case Estimator::next_flight: return "nf";
        case Estimator::sde: return "sde";
    }
    return "?";
}

inline Estimator parse_estimator(const std::string& name) {
    if (name == "classic") return Estimator::classic;
    if (name == "dt" || name == "delta_tracking" || name == "delta-tracking") return Estimator::delta_tracking;
    if (name == "nf" || name == "next_flight" || name == "next-flight") return Estimator::next_flight;
    if (name == "sde") return Estimator::sde;
    throw ConfigError("unknown estimator '" + name + "'");
}

/// Off-centered kernels used inside next-flight balls.
enum class NextFlightKernel {
    exact,   // eigenfunction series with the singular part in closed form
    kelvin,  // Kelvin-image closed form
    paper,   // reflected-distance closed form
};

inline const char* to_string(NextFlightKernel k) {
    switch (k) {
        case NextFlightKernel::exact: return "exact";
        case NextFlightKernel::kelvin: return "kelvin";
        case NextFlightKernel::paper: return "paper";
    }
    return "?";
}

inline NextFlightKernel parse_nf_kernel(const std::string& name) {
    if (name == "exact") return NextFlightKernel::exact;
    if (name == "kelvin") return NextFlightKernel::kelvin;
    if (name == "paper") return NextFlightKernel::paper;
    throw ConfigError("unknown next-flight kernel '" + name + "'");
}

/// Density of the interior chain points inside a next-flight ball.
enum class NextFlightSampling {
    uniform,  // 1/|B|
    mixture,  // half uniform, half the centered Green density of the largest ball around the chain point
};

inline const char* to_string(NextFlightSampling s) {
    return s == NextFlightSampling::uniform ? "uniform" : "mixture";
}

inline NextFlightSampling parse_nf_sampling(const std::string& name) {
    if (name == "uniform") return NextFlightSampling::uniform;
    if (name == "mixture") return NextFlightSampling::mixture;
    throw ConfigError("unknown next-flight sampling '" + name + "'");
}

struct WeightWindow {
    double w_min = 0.5;
    double w_max = 1.5;

    bool operator==(const WeightWindow&) const = default;

    void validate() const {
        if (!(w_min > 0.0 && w_min < 1.0 && w_max > 1.0)) {
            throw ConfigError("weight window needs 0 < w_min < 1 < w_max");
        }
    }
};

struct WalkConfig {
    double epsilon = 1e-3;
    int max_steps = 10000;
    std::optional<double> sigma_bar_override;
    std::optional<WeightWindow> weight_window;
    int max_splits = 64;
    std::uint64_t rng_seed = 0;
    NextFlightKernel nf_kernel = NextFlightKernel::exact;
    NextFlightSampling nf_sampling = NextFlightSampling::mixture;
    /// Time step of the discretized SDE walker; 0 selects 1e-3 R_scene^2.
    double sde_step = 0.0;

    void validate() const {
        if (!(epsilon > 0.0)) {
            throw ConfigError("epsilon must be positive");
        }
        if (max_steps < 1) {
            throw ConfigError("max_steps must be at least 1");
        }
        if (max_splits < 1) {
            throw ConfigError("max_splits must be at least 1");
        }
        if (weight_window) {
            weight_window->validate();
        }
        if (sigma_bar_override && !(*sigma_bar_override > 0.0)) {
            throw ConfigError("sigma_bar override must be positive");
        }
        if (sde_step < 0.0) {
            throw ConfigError("sde step must be nonnegative");
        }
    }
};

enum class Termination { boundary, max_steps, roulette };

inline const char* to_string(Termination t) {
    switch (t) {
        case Termination::boundary: return "boundary";
        case Termination::max_steps: return "max_steps";
        case Termination::roulette: return "roulette";
    }
    return "?";
}

struct WalkStats {
    std::uint64_t steps = 0;
    std::uint64_t distance_queries = 0;
    std::uint64_t kernel_evals = 0;
    Termination terminated_by = Termination::boundary;
    // Per-branch outcomes; a split walk ends in several branches.
    std::uint64_t boundary_hits = 0;
    std::uint64_t max_step_hits = 0;
    std::uint64_t roulette_kills = 0;
    std::uint64_t splits = 0;
    std::uint64_t split_cap_hits = 0;
    /// Null weights outside [0, 1], possible only when sigma_bar is overridden or probing missed an extremum.
    std::uint64_t null_weight_violations = 0;

    void end_branch(Termination t) {
        switch (t) {
            case Termination::boundary: ++boundary_hits; break;
            case Termination::max_steps: ++max_step_hits; break;
            case Termination::roulette: ++roulette_kills; break;
        }
    }

    /// Summary reason: max_steps beats boundary beats roulette.
    void finish() {
        if (max_step_hits > 0) {
            terminated_by = Termination::max_steps;
        } else if (boundary_hits > 0) {
            terminated_by = Termination::boundary;
        } else {
            terminated_by = Termination::roulette;
        }
    }

    void merge(const WalkStats& o) {
        steps += o.steps;
        distance_queries += o.distance_queries;
        kernel_evals += o.kernel_evals;
        boundary_hits += o.boundary_hits;
        max_step_hits += o.max_step_hits;
        roulette_kills += o.roulette_kills;
        splits += o.splits;
        split_cap_hits += o.split_cap_hits;
        null_weight_violations += o.null_weight_violations;
    }
};

template <typename T>
struct WalkResult {
    T estimate{};
    WalkStats stats;
};

struct WindowDecision {
    enum class Kind { keep, terminate, split } kind = Kind::keep;
    double weight = 0.0;
    int count = 1;
};

/// Static weight window with Russian roulette below and expected-value splitting above.
/// Signed weights are windowed by magnitude.
inline WindowDecision apply_weight_window(double w, const WeightWindow& window, Rng& rng) {
    const double mag = std::abs(w);
    const double sign = w < 0.0 ? -1.0 : 1.0;
    if (mag >= window.w_min && mag <= window.w_max) {
        return {WindowDecision::Kind::keep, w, 1};
    }
    if (mag < window.w_min) {
        if (rng.uniform() < mag / window.w_min) {
            return {WindowDecision::Kind::keep, sign * window.w_min, 1};
        }
        return {WindowDecision::Kind::terminate, 0.0, 0};
    }
    const double m = mag / window.w_max;
    const int n = static_cast<int>(std::floor(m));
    const int count = rng.uniform() < static_cast<double>(n) + 1.0 - m ? n : n + 1;
    return {WindowDecision::Kind::split, w / m, count};
}

}  // namespace vcwos
