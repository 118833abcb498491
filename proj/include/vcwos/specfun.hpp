// SPDX-License-Identifier: Apache-2.0
#pragma once

// Modified Bessel functions of integer order 0 and 1, and Legendre
// polynomials. Exponentially scaled variants are provided so that ratios
// such as K_0(a) I_0(b) / I_0(a) can be formed without overflow.

#include "vcwos/types.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace vcwos::specfun {

inline constexpr double euler_gamma = 0.57721566490153286060651209;

namespace detail {

// Largest argument for which the I power series is used; beyond it the
// Hankel asymptotic expansion is accurate to double precision.
inline constexpr double i_series_limit = 30.0;
inline constexpr double k_series_limit = 2.0;

inline void check_order(int order) {
    if (order != 0 && order != 1) {
        throw DomainError("bessel: only orders 0 and 1 are supported");
    }
}

// I_order(x) by its power series (all terms positive, no cancellation).
inline double bessel_i_series(int order, double x) {
    const double q = 0.25 * x * x;
    double term = order == 0 ? 1.0 : 0.5 * x;
    double sum = term;
    for (int k = 1; k < 500; ++k) {
        term *= q / (static_cast<double>(k) * static_cast<double>(k + order));
        sum += term;
        if (term < 1e-17 * sum) {
            break;
        }
    }
    return sum;
}

// e^{-x} I_order(x) for large x by the Hankel expansion.
inline double bessel_i_scaled_asymptotic(int order, double x) {
    const double mu = 4.0 * order * order;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double next = -term * (mu - odd * odd) / (k * 8.0 * x);
        if (std::abs(next) > std::abs(term)) {
            break;
        }
        term = next;
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) {
            break;
        }
    }
    return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

// K_0 and K_1 for 0 < x <= 2 from the logarithmic series.
inline void bessel_k01_series(double x, double& k0, double& k1) {
    const double q = 0.25 * x * x;
    const double log_half = std::log(0.5 * x);
    const double i0 = bessel_i_series(0, x);
    const double i1 = bessel_i_series(1, x);

    // K_0: sum_{k>=1} q^k / (k!)^2 H_k
    double term = 1.0;
    double harmonic = 0.0;
    double sum0 = 0.0;
    for (int k = 1; k < 100; ++k) {
        term *= q / (static_cast<double>(k) * k);
        harmonic += 1.0 / k;
        sum0 += term * harmonic;
        if (term * harmonic < 1e-18 * std::abs(sum0)) {
            break;
        }
    }
    k0 = -(log_half + euler_gamma) * i0 + sum0;

    // K_1: 1/x + ln(x/2) I_1 - (x/4) sum_{k>=0} (psi(k+1) + psi(k+2)) q^k / (k! (k+1)!)
    double t = 1.0;
    double psi_k1 = -euler_gamma;           // psi(1)
    double psi_k2 = -euler_gamma + 1.0;     // psi(2)
    double sum1 = t * (psi_k1 + psi_k2);
    for (int k = 1; k < 100; ++k) {
        t *= q / (static_cast<double>(k) * (k + 1));
        psi_k1 += 1.0 / k;
        psi_k2 += 1.0 / (k + 1);
        const double contrib = t * (psi_k1 + psi_k2);
        sum1 += contrib;
        if (std::abs(contrib) < 1e-18 * std::abs(sum1)) {
            break;
        }
    }
    k1 = 1.0 / x + log_half * i1 - 0.25 * x * sum1;
}

// e^{x} K_0(x) and e^{x} K_1(x) for x > 2 by Steed's continued fraction
// (Temme's formulation for order zero).
inline void bessel_k01_scaled_cf(double x, double& k0s, double& k1s) {
    constexpr double a1 = 0.25;
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d;
    double delh = d;
    double q1 = 0.0;
    double q2 = 1.0;
    double q = a1;
    double c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    for (int i = 2; i < 10000; ++i) {
        a -= 2.0 * (i - 1);
        c = -a * c / i;
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::abs(dels / s) < 1e-17) {
            break;
        }
    }
    h *= a1;
    k0s = std::sqrt(std::numbers::pi / (2.0 * x)) / s;
    k1s = k0s * (x + 0.5 - h) / x;
}

}  // namespace detail

/// e^{-x} I_order(x), order in {0, 1}, x >= 0.
inline double bessel_i_scaled(int order, double x) {
    detail::check_order(order);
    if (!(x >= 0.0)) {
        throw DomainError("bessel_i: argument must be nonnegative");
    }
    if (x <= detail::i_series_limit) {
        return detail::bessel_i_series(order, x) * std::exp(-x);
    }
    return detail::bessel_i_scaled_asymptotic(order, x);
}

/// Modified Bessel function of the first kind I_order(x).
inline double bessel_i(int order, double x) {
    detail::check_order(order);
    if (!(x >= 0.0)) {
        throw DomainError("bessel_i: argument must be nonnegative");
    }
    if (x <= detail::i_series_limit) {
        return detail::bessel_i_series(order, x);
    }
    if (x > 700.0) {
        return std::numeric_limits<double>::infinity();
    }
    return detail::bessel_i_scaled_asymptotic(order, x) * std::exp(x);
}

/// e^{x} K_order(x), order in {0, 1}, x > 0.
inline double bessel_k_scaled(int order, double x) {
    detail::check_order(order);
    if (!(x > 0.0)) {
        throw DomainError("bessel_k: argument must be positive");
    }
    double k0 = 0.0;
    double k1 = 0.0;
    if (x <= detail::k_series_limit) {
        detail::bessel_k01_series(x, k0, k1);
        const double scale = std::exp(x);
        return (order == 0 ? k0 : k1) * scale;
    }
    detail::bessel_k01_scaled_cf(x, k0, k1);
    return order == 0 ? k0 : k1;
}

/// Modified Bessel function of the second kind K_order(x).
inline double bessel_k(int order, double x) {
    detail::check_order(order);
    if (!(x > 0.0)) {
        throw DomainError("bessel_k: argument must be positive");
    }
    double k0 = 0.0;
    double k1 = 0.0;
    if (x <= detail::k_series_limit) {
        detail::bessel_k01_series(x, k0, k1);
        return order == 0 ? k0 : k1;
    }
    detail::bessel_k01_scaled_cf(x, k0, k1);
    const double scale = std::exp(-x);
    return (order == 0 ? k0 : k1) * scale;
}

/// Legendre polynomial P_n(t) by the three-term recurrence.
inline double legendre_p(int n, double t) {
    if (n < 0) {
        throw DomainError("legendre_p: degree must be nonnegative");
    }
    if (!(std::abs(t) <= 1.0)) {
        throw DomainError("legendre_p: argument must lie in [-1, 1]");
    }
    if (n == 0) {
        return 1.0;
    }
    double prev = 1.0;
    double cur = t;
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0) * t * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

}  // namespace vcwos::specfun
