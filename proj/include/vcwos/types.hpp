// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace vcwos {

template <int Dim>
using Vec = Eigen::Matrix<double, Dim, 1>;

/// Raised when an argument lies outside the mathematical domain of a routine.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised when a query point is not inside the solution domain.
class OutsideDomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when the radial rejection sampler exhausts its trial budget.
class EnvelopeFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// |S^{d-1}| for the unit sphere and |B^d| for the unit ball.
template <int Dim>
constexpr double unit_sphere_area() {
    static_assert(Dim == 2 || Dim == 3);
    return Dim == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi;
}

template <int Dim>
constexpr double unit_ball_volume() {
    static_assert(Dim == 2 || Dim == 3);
    return Dim == 2 ? std::numbers::pi : 4.0 * std::numbers::pi / 3.0;
}

template <int Dim>
double sphere_area(double radius) {
    return unit_sphere_area<Dim>() * std::pow(radius, Dim - 1);
}

template <int Dim>
double ball_volume(double radius) {
    return unit_ball_volume<Dim>() * std::pow(radius, Dim);
}

}  // namespace vcwos
