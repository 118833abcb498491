// SPDX-License-Identifier: Apache-2.0
#pragma once

// Depth-first driver for walks that may split under a weight window.

#include "vcwos/estimators/walk.hpp"

#include <optional>
#include <vector>

namespace vcwos {

template <int Dim>
struct Walker {
    Vec<Dim> x;
    double weight = 1.0;
    double gamma = 0.0;  // gamma(x), cached
    int steps = 0;
};

/// Advances `start` and its split copies until each branch ends. `step(w)` moves the
/// walker through one ball and returns a termination reason when the branch ends.
template <int Dim, typename Step>
void run_split_walk(const Walker<Dim>& start, const WalkConfig& cfg, Rng& rng, WalkStats& stats, Step&& step) {
    std::vector<Walker<Dim>> stack{start};
    int live = 1;
    while (!stack.empty()) {
        Walker<Dim> w = stack.back();
        stack.pop_back();
        for (;;) {
            if (w.steps >= cfg.max_steps) {
                stats.end_branch(Termination::max_steps);
                break;
            }
            if (const std::optional<Termination> end = step(w)) {
                stats.end_branch(*end);
                break;
            }
            if (w.weight == 0.0) {
                stats.end_branch(Termination::roulette);
                break;
            }
            if (!cfg.weight_window) {
                continue;
            }
            const WindowDecision dec = apply_weight_window(w.weight, *cfg.weight_window, rng);
            if (dec.kind == WindowDecision::Kind::terminate) {
                stats.end_branch(Termination::roulette);
                break;
            }
            w.weight = dec.weight;
            for (int i = 1; i < dec.count; ++i) {
                if (live < cfg.max_splits) {
                    stack.push_back(w);
                    ++live;
                    ++stats.splits;
                } else {
                    // Over the cap: keep the copy's weight on this walker.
                    w.weight += dec.weight;
                    ++stats.split_cap_hits;
                }
            }
        }
        --live;
    }
    stats.finish();
}

}  // namespace vcwos
