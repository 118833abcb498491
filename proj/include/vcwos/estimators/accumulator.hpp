// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vcwos/types.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

namespace vcwos {

/// Streaming mean and variance (Welford), mergeable with Chan's update.
class EstimateAccumulator {
public:
    void add(double x) {
        ++n_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_ += delta * (x - mean_);
    }

    void merge(const EstimateAccumulator& other) {
        if (other.n_ == 0) {
            return;
        }
        if (n_ == 0) {
            *this = other;
            return;
        }
        const double n = static_cast<double>(n_ + other.n_);
        const double delta = other.mean_ - mean_;
        mean_ += delta * static_cast<double>(other.n_) / n;
        m2_ += other.m2_ + delta * delta * static_cast<double>(n_) * static_cast<double>(other.n_) / n;
        n_ += other.n_;
    }

    std::uint64_t count() const { return n_; }
    double mean() const { return n_ > 0 ? mean_ : std::numeric_limits<double>::quiet_NaN(); }
    double m2() const { return m2_; }

    /// Sample variance of the individual estimates.
    double variance() const {
        return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : std::numeric_limits<double>::quiet_NaN();
    }

    /// sqrt(m2 / (n (n - 1))).
    double standard_error() const {
        if (n_ < 2) {
            return std::numeric_limits<double>::quiet_NaN();
        }
        const double n = static_cast<double>(n_);
        return std::sqrt(m2_ / (n * (n - 1.0)));
    }

private:
    std::uint64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Componentwise accumulator for vector estimates.
template <int Dim>
class VectorAccumulator {
public:
    void add(const Vec<Dim>& v) {
        for (int k = 0; k < Dim; ++k) {
            parts_[k].add(v[k]);
        }
    }

    void merge(const VectorAccumulator& other) {
        for (int k = 0; k < Dim; ++k) {
            parts_[k].merge(other.parts_[k]);
        }
    }

    std::uint64_t count() const { return parts_[0].count(); }

    Vec<Dim> mean() const {
        Vec<Dim> m;
        for (int k = 0; k < Dim; ++k) {
            m[k] = parts_[k].mean();
        }
        return m;
    }

    Vec<Dim> standard_error() const {
        Vec<Dim> s;
        for (int k = 0; k < Dim; ++k) {
            s[k] = parts_[k].standard_error();
        }
        return s;
    }

    const EstimateAccumulator& component(int k) const { return parts_[k]; }

private:
    EstimateAccumulator parts_[Dim];
};

}  // namespace vcwos
