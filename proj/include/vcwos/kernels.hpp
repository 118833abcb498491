// SPDX-License-Identifier: Apache-2.0
#pragma once

// Green's functions, Poisson kernels and sampling routines for the screened
// Poisson operator  Delta u - sigma u  on a ball in 2D and 3D.
//
// Conventions: G is normalized so that  -(Delta - sigma) G = delta  with G = 0
// on the sphere, Q is the radial profile with G = Q / c_d (c_2 = 2 pi,
// c_3 = 4 pi), and V = -Q'. sigma = 0 (or R sqrt(sigma) below 1e-8) uses the
// harmonic closed forms.

#include "vcwos/rng.hpp"
#include "vcwos/specfun.hpp"
#include "vcwos/types.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

namespace vcwos {

/// Which closed form approximates the off-centered kernels.
enum class OffCenteredForm {
    paper,   // reflected-distance form  rho = (R^2 - u.v) / R
    kelvin,  // Kelvin-image distance; exact for sigma = 0, positive everywhere
};

namespace kernel_detail {

inline constexpr double harmonic_cutoff = 1e-8;
inline constexpr double radius_tolerance = 1e-9;

// (cosh x - sinh x / x) e^{-x}
inline double chs_scaled(double x) {
    if (x < 0.5) {
        // sum_{k>=1} x^{2k} 2k / (2k+1)!
        const double x2 = x * x;
        double power = x2;
        double fact = 6.0;  // (2k+1)! for k = 1
        double sum = 0.0;
        for (int k = 1; k < 12; ++k) {
            sum += power * (2.0 * k) / fact;
            power *= x2;
            fact *= (2.0 * k + 2.0) * (2.0 * k + 3.0);
        }
        return sum * std::exp(-x);
    }
    const double e2 = std::exp(-2.0 * x);
    return 0.5 * (1.0 + e2) + 0.5 * std::expm1(-2.0 * x) / x;
}

// log(sinh x / x) for x >= 0
inline double log_sinhc(double x) {
    if (x < 1e-8) {
        return x * x / 6.0;
    }
    return x + std::log(-std::expm1(-2.0 * x) / (2.0 * x));
}

// ratio[k] = I_k(x) / I_{k-1}(x) for k = 1..count-1 (i_k / i_{k-1} in the
// spherical family), from the downward recurrence, which is stable.
inline void first_kind_ratios(double x, int count, bool spherical, std::vector<double>& ratio) {
    ratio.assign(static_cast<std::size_t>(std::max(count, 1)), 0.0);
    if (count <= 1 || x == 0.0) {
        return;
    }
    const int start = count + 60 + static_cast<int>(std::ceil(x));
    const double inv_x = 1.0 / x;
    const double shift = spherical ? 1.0 : 0.0;
    double next = 0.0;
    for (int k = start; k >= count; --k) {
        next = 1.0 / ((2.0 * k + shift) * inv_x + next);
    }
    double* out = ratio.data();
    for (int k = count - 1; k >= 1; --k) {
        next = 1.0 / ((2.0 * k + shift) * inv_x + next);
        out[k] = next;
    }
}

// ratio[k] = K_k(x) / K_{k-1}(x) (or k_k / k_{k-1}) by upward recurrence.
inline void second_kind_ratios(double x, int count, bool spherical, std::vector<double>& ratio) {
    ratio.assign(static_cast<std::size_t>(std::max(count, 1)), 0.0);
    double q = spherical ? 1.0 + 1.0 / x : specfun::bessel_k_scaled(1, x) / specfun::bessel_k_scaled(0, x);
    for (int n = 1; n < count; ++n) {
        ratio[static_cast<std::size_t>(n)] = q;
        const double coeff = spherical ? (2.0 * n + 1.0) / x : 2.0 * n / x;
        q = 1.0 / q + coeff;
    }
}

// log I_n(x) for n = 0..count-1 (or log i_n for the spherical family).
inline void log_first_kind(double x, int count, bool spherical, std::vector<double>& out) {
    std::vector<double> ratio;
    first_kind_ratios(x, count, spherical, ratio);
    out.assign(static_cast<std::size_t>(count), 0.0);
    out[0] = spherical ? log_sinhc(x) : std::log(specfun::bessel_i_scaled(0, x)) + x;
    for (int k = 1; k < count; ++k) {
        out[static_cast<std::size_t>(k)] = out[static_cast<std::size_t>(k - 1)] + std::log(ratio[static_cast<std::size_t>(k)]);
    }
}

// log K_n(x) (or log k_n) for n = 0..count-1.
inline void log_second_kind(double x, int count, bool spherical, std::vector<double>& out) {
    std::vector<double> ratio;
    second_kind_ratios(x, count, spherical, ratio);
    out.assign(static_cast<std::size_t>(count), 0.0);
    out[0] = spherical ? -x - std::log(x) : std::log(specfun::bessel_k_scaled(0, x)) - x;
    for (int n = 1; n < count; ++n) {
        out[static_cast<std::size_t>(n)] = out[static_cast<std::size_t>(n - 1)] + std::log(ratio[static_cast<std::size_t>(n)]);
    }
}

// I_0(x) / I_0(a) (or i_0(x) / i_0(a)) for 0 <= x <= a.
inline double first_kind_zero_ratio(double x, double a, bool spherical) {
    if (spherical) {
        const double sinhc_a = -std::expm1(-2.0 * a) / (2.0 * a);
        const double sinhc_x = x > 0.0 ? -std::expm1(-2.0 * x) / (2.0 * x) : 1.0;
        return sinhc_x / sinhc_a * std::exp(x - a);
    }
    return specfun::bessel_i_scaled(0, x) / specfun::bessel_i_scaled(0, a) * std::exp(x - a);
}

// Modes needed until the geometric tail scale t^n / (1 - t) drops below 1e-13, capped.
inline int series_length(double t, double scale = 1.0) {
    if (t <= 0.0) {
        return 1;
    }
    if (t >= 1.0) {
        return 6000;
    }
    const double n =
        std::ceil((std::log(1e-13) - std::log(std::max(scale, 1e-13)) + std::log1p(-t)) / std::log(t)) + 2.0;
    return static_cast<int>(std::clamp(n, 2.0, 6000.0));
}

struct SeriesScratch {
    std::vector<double> lo;
    std::vector<double> hi;
    // Sequences that depend only on a = R sqrt(sigma); every chain point of a
    // next-flight ball shares them.
    double cached_a = -1.0;
    bool cached_spherical = false;
    int cached_count = 0;
    std::vector<double> first_a;
    std::vector<double> inv_first_a;
    std::vector<double> second_a;

    void ensure(double a, bool spherical, int count) {
        if (a == cached_a && spherical == cached_spherical && count <= cached_count) {
            return;
        }
        const int n = a == cached_a && spherical == cached_spherical ? std::max(count, 2 * cached_count)
                                                                    : std::max(count, 128);
        first_kind_ratios(a, n, spherical, first_a);
        second_kind_ratios(a, n, spherical, second_a);
        inv_first_a.resize(first_a.size());
        for (std::size_t k = 0; k < first_a.size(); ++k) {
            inv_first_a[k] = first_a[k] > 0.0 ? 1.0 / first_a[k] : 0.0;
        }
        cached_a = a;
        cached_spherical = spherical;
        cached_count = n;
    }
};

inline SeriesScratch& series_scratch() {
    thread_local SeriesScratch scratch;
    return scratch;
}

// 1 / (n + 1) for the Legendre recurrence.
inline const double* reciprocal_table() {
    static const std::vector<double> table = [] {
        std::vector<double> t(6002);
        for (std::size_t n = 0; n < t.size(); ++n) {
            t[n] = 1.0 / static_cast<double>(n + 1);
        }
        return t;
    }();
    return table.data();
}

}  // namespace kernel_detail

/// Count of accepted-sample checks where the radial density exceeded the
/// rejection envelope. Any nonzero value means the envelope is invalid for
/// some (R, sigma) that was sampled.
inline std::atomic<std::uint64_t>& envelope_violations() {
    static std::atomic<std::uint64_t> counter{0};
    return counter;
}

template <int Dim>
struct GreenSample {
    Vec<Dim> point;
    double pdf;  // G(x, y) / |G(x)|
};

/// Screened Poisson kernels on the ball B(center, radius) with constant sigma.
template <int Dim>
class BallKernel {
    static_assert(Dim == 2 || Dim == 3, "BallKernel supports 2D and 3D");

public:
    static constexpr double c_d = unit_sphere_area<Dim>();

    BallKernel(const Vec<Dim>& center, double radius, double sigma)
        : center_(center), radius_(radius), sigma_(sigma) {
        if (!(radius > 0.0) || !std::isfinite(radius)) {
            throw DomainError("BallKernel: radius must be positive");
        }
        if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
            throw DomainError("BallKernel: sigma must be nonnegative");
        }
        s_ = std::sqrt(sigma);
        a_ = radius * s_;
        harmonic_ = a_ < kernel_detail::harmonic_cutoff;
        if (harmonic_) {
            norm_ = Dim == 2 ? radius * radius / 4.0 : radius * radius / 6.0;
            poisson_ = 1.0 / sphere_area<Dim>(radius);
            return;
        }
        if constexpr (Dim == 2) {
            i0s_a_ = specfun::bessel_i_scaled(0, a_);
            k0s_a_ = specfun::bessel_k_scaled(0, a_);
            const double inv_i0 = std::exp(-a_) / i0s_a_;
            if (a_ < 2.0) {
                // (I0(a) - 1) / sigma = (R^2/4) sum_{k>=1} (a^2/4)^{k-1} / (k!)^2
                const double q = 0.25 * a_ * a_;
                double term = 1.0;
                double sum = 1.0;
                for (int k = 2; k < 40; ++k) {
                    term *= q / (static_cast<double>(k) * k);
                    sum += term;
                }
                norm_ = 0.25 * radius * radius * sum * inv_i0;
            } else {
                norm_ = (1.0 - inv_i0) / sigma;
            }
            poisson_ = inv_i0 / (2.0 * std::numbers::pi * radius);
        } else {
            em2a_ = std::expm1(-2.0 * a_);
            // a / sinh a
            const double a_over_sinh = -2.0 * a_ * std::exp(-a_) / em2a_;
            if (a_ < 1.0) {
                // (sinh a - a) / sigma = R^2 sum_{k>=1} a^{2k-1} / (2k+1)!
                const double a2 = a_ * a_;
                double power = a_;
                double fact = 6.0;
                double sum = 0.0;
                for (int k = 1; k < 15; ++k) {
                    sum += power / fact;
                    power *= a2;
                    fact *= (2.0 * k + 2.0) * (2.0 * k + 3.0);
                }
                norm_ = radius * radius * sum * a_over_sinh / a_;
            } else {
                norm_ = (1.0 - a_over_sinh) / sigma;
            }
            poisson_ = a_over_sinh / sphere_area<3>(radius);
        }
    }

    const Vec<Dim>& center() const { return center_; }
    double radius() const { return radius_; }
    double sigma() const { return sigma_; }
    bool harmonic() const { return harmonic_; }

    /// Radial profile Q(r) of the centered Green's function. Defined for any
    /// r > 0, including r > R where it is negative.
    double q(double r) const {
        if (harmonic_) {
            if constexpr (Dim == 2) {
                return std::log(radius_ / r);
            } else {
                return 1.0 / r - 1.0 / radius_;
            }
        }
        const double x = r * s_;
        if constexpr (Dim == 2) {
            const double direct = std::exp(-x) * specfun::bessel_k_scaled(0, x);
            const double image = k0s_a_ * specfun::bessel_i_scaled(0, x) / i0s_a_ * std::exp(x - 2.0 * a_);
            return direct - image;
        } else {
            // e^{-x}/r - e^{-a} sinh(x) / (r sinh a)
            const double image = std::exp(x - 2.0 * a_) * std::expm1(-2.0 * x) / em2a_;
            return (std::exp(-x) - image) / r;
        }
    }

    /// V(r) = -Q'(r).
    double v(double r) const {
        if (harmonic_) {
            return Dim == 2 ? 1.0 / r : 1.0 / (r * r);
        }
        const double x = r * s_;
        if constexpr (Dim == 2) {
            const double direct = std::exp(-x) * specfun::bessel_k_scaled(1, x);
            const double image = k0s_a_ * specfun::bessel_i_scaled(1, x) / i0s_a_ * std::exp(x - 2.0 * a_);
            return s_ * (direct + image);
        } else {
            const double direct = std::exp(-x) * (1.0 + 1.0 / x);
            const double image = -2.0 * std::exp(x - 2.0 * a_) * kernel_detail::chs_scaled(x) / em2a_;
            return s_ / r * (direct + image);
        }
    }

    /// G(c, y) for |y - c| = r.
    double green_centered(double r) const {
        if (!(r > 0.0) || r > radius_ * (1.0 + kernel_detail::radius_tolerance)) {
            throw DomainError("green_centered: r must lie in (0, R]");
        }
        if (r >= radius_) {
            return 0.0;
        }
        return std::max(0.0, q(r)) / c_d;
    }

    /// |G| = integral of G(c, y) over the ball.
    double green_norm() const { return norm_; }

    /// P(c, z), constant over the sphere.
    double poisson_centered() const { return poisson_; }

    /// Probability of sampling the interior term under delta tracking.
    double interior_mass() const { return sigma_ * norm_; }

    /// Off-centered Green's function from the eigenfunction series truncated
    /// to n_terms angular modes.
    double green_offcentered_series(const Vec<Dim>& x, const Vec<Dim>& y, int n_terms) const {
        if (n_terms < 1) {
            throw DomainError("green_offcentered_series: n_terms must be positive");
        }
        const Vec<Dim> u = x - center_;
        const Vec<Dim> v = y - center_;
        check_inside(u, "green_offcentered_series");
        check_inside(v, "green_offcentered_series");
        const double nu = u.norm();
        const double nv = v.norm();
        if ((x - y).norm() == 0.0) {
            throw DomainError("green_offcentered_series: x and y coincide");
        }
        const double r_lo = std::min(nu, nv);
        const double r_hi = std::max(nu, nv);
        const double cos_theta =
            r_lo > 0.0 ? std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0) : 1.0;
        const int count = r_lo > 0.0 ? n_terms : 1;
        return harmonic_ ? harmonic_series(r_lo, r_hi, cos_theta, count)
                         : screened_series(r_lo, r_hi, cos_theta, count);
    }

    /// Off-centered Poisson kernel P(x, z) from its eigenfunction series.
    double poisson_offcentered_series(const Vec<Dim>& x, const Vec<Dim>& z, int n_terms) const {
        if (n_terms < 1) {
            throw DomainError("poisson_offcentered_series: n_terms must be positive");
        }
        const Vec<Dim> u = x - center_;
        check_inside(u, "poisson_offcentered_series");
        check_on_sphere(z, "poisson_offcentered_series");
        const double nu = u.norm();
        if (nu == 0.0) {
            return poisson_;
        }
        const Vec<Dim> v = z - center_;
        const double cos_theta = std::clamp(u.dot(v) / (nu * v.norm()), -1.0, 1.0);
        const double surface = sphere_area<Dim>(radius_);
        double sum = 0.0;
        if (harmonic_) {
            const double t = nu / radius_;
            double power = 1.0;
            double p_prev = 1.0;
            double p_cur = cos_theta;
            for (int n = 0; n < n_terms; ++n) {
                double mode = 0.0;
                if constexpr (Dim == 2) {
                    mode = (n == 0 ? 1.0 : 2.0) * std::cos(n * std::acos(cos_theta));
                } else {
                    mode = (2.0 * n + 1.0) * (n == 0 ? 1.0 : p_cur);
                    if (n >= 1) {
                        const double p_next = ((2.0 * n + 1.0) * cos_theta * p_cur - n * p_prev) / (n + 1.0);
                        p_prev = p_cur;
                        p_cur = p_next;
                    }
                }
                sum += mode * power;
                power *= t;
            }
            return sum / surface;
        }
        constexpr bool spherical = Dim == 3;
        std::vector<double> log_i_u;
        std::vector<double> log_i_a;
        kernel_detail::log_first_kind(nu * s_, n_terms, spherical, log_i_u);
        kernel_detail::log_first_kind(a_, n_terms, spherical, log_i_a);
        const double theta = std::acos(cos_theta);
        double p_prev = 1.0;
        double p_cur = cos_theta;
        for (int n = 0; n < n_terms; ++n) {
            const auto idx = static_cast<std::size_t>(n);
            double mode = 0.0;
            if constexpr (Dim == 2) {
                mode = (n == 0 ? 1.0 : 2.0) * std::cos(n * theta);
            } else {
                mode = (2.0 * n + 1.0) * (n == 0 ? 1.0 : p_cur);
                if (n >= 1) {
                    const double p_next = ((2.0 * n + 1.0) * cos_theta * p_cur - n * p_prev) / (n + 1.0);
                    p_prev = p_cur;
                    p_cur = p_next;
                }
            }
            sum += mode * std::exp(log_i_u[idx] - log_i_a[idx]);
        }
        return sum / surface;
    }

    /// Off-centered G(x, y) to double precision: free-space kernel minus the
    /// regular part, whose modes decay like (r_lo r_hi / R^2)^n.
    double green_offcentered_exact(const Vec<Dim>& x, const Vec<Dim>& y) const {
        const Vec<Dim> u = x - center_;
        const Vec<Dim> v = y - center_;
        check_inside(u, "green_offcentered_exact");
        check_inside(v, "green_offcentered_exact");
        const double w = (y - x).norm();
        if (w == 0.0) {
            throw DomainError("green_offcentered_exact: x and y coincide");
        }
        if (harmonic_) {
            return green_offcentered_approx(x, y, OffCenteredForm::kelvin);
        }
        const double nu = u.norm();
        const double nv = v.norm();
        const double r_lo = std::min(nu, nv);
        const double r_hi = std::max(nu, nv);
        if (r_hi >= radius_) {
            return 0.0;
        }
        const double cos_theta = r_lo > 0.0 ? std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0) : 1.0;
        const int count = r_lo > 0.0 ? kernel_detail::series_length(r_lo * r_hi / (radius_ * radius_)) : 1;

        constexpr bool spherical = Dim == 3;
        auto& scratch = kernel_detail::series_scratch();
        const double x_lo = r_lo * s_;
        const double x_hi = r_hi * s_;
        kernel_detail::first_kind_ratios(x_lo, count, spherical, scratch.lo);
        kernel_detail::first_kind_ratios(x_hi, count, spherical, scratch.hi);
        scratch.ensure(a_, spherical, count);

        // Mode n of the regular part is  K_n(a) I_n(a) * A_n * B_n  with
        // A_n = I_n(x_lo) / I_n(a) and B_n = I_n(x_hi) / I_n(a).
        double ratio_lo = kernel_detail::first_kind_zero_ratio(x_lo, a_, spherical);
        double ratio_hi = kernel_detail::first_kind_zero_ratio(x_hi, a_, spherical);
        double ki = spherical ? -std::expm1(-2.0 * a_) / (2.0 * a_ * a_)
                              : specfun::bessel_k_scaled(0, a_) * specfun::bessel_i_scaled(0, a_);
        double regular = ki * ratio_lo * ratio_hi;
        double mode_prev = 1.0;
        double mode_cur = cos_theta;
        const double* inv = kernel_detail::reciprocal_table();
        for (int n = 1; n < count; ++n) {
            const auto idx = static_cast<std::size_t>(n);
            ratio_lo *= scratch.lo[idx] * scratch.inv_first_a[idx];
            ratio_hi *= scratch.hi[idx] * scratch.inv_first_a[idx];
            ki *= scratch.second_a[idx] * scratch.first_a[idx];
            const double weight = spherical ? 2.0 * n + 1.0 : 2.0;
            regular += weight * mode_cur * ki * ratio_lo * ratio_hi;
            // Chebyshev (2D) or Legendre (3D) recurrence for the angular factor.
            const double mode_next = spherical
                                         ? ((2.0 * n + 1.0) * cos_theta * mode_cur - n * mode_prev) * inv[n]
                                         : 2.0 * cos_theta * mode_cur - mode_prev;
            mode_prev = mode_cur;
            mode_cur = mode_next;
            if (ratio_lo * ratio_hi == 0.0) {
                break;
            }
        }
        double value = 0.0;
        if constexpr (Dim == 2) {
            value = std::exp(-w * s_) * specfun::bessel_k_scaled(0, w * s_) - regular;
        } else {
            value = std::exp(-w * s_) / w - s_ * regular;
        }
        return std::max(0.0, value) / c_d;
    }

    /// Off-centered P(x, z) to double precision: harmonic Poisson kernel plus
    /// the screened correction series.
    double poisson_offcentered_exact(const Vec<Dim>& x, const Vec<Dim>& z) const {
        const Vec<Dim> u = x - center_;
        check_inside(u, "poisson_offcentered_exact");
        check_on_sphere(z, "poisson_offcentered_exact");
        const double nu = u.norm();
        if (nu == 0.0) {
            return poisson_;
        }
        const double w = (z - x).norm();
        const double r2 = radius_ * radius_;
        const double harmonic_value =
            (r2 - u.squaredNorm()) / (c_d * radius_ * std::pow(w, Dim));
        if (harmonic_) {
            return harmonic_value;
        }
        const double rho = std::min(1.0, nu / radius_);
        const double cos_theta = std::clamp(u.dot(z - center_) / (nu * radius_), -1.0, 1.0);
        const double x_u = nu * s_;
        // Mode n of the correction is about (2n+1) rho^n (a^2 - x_u^2) / (4n).
        const int count = kernel_detail::series_length(rho, 0.5 * (a_ * a_ - x_u * x_u) + 1e-3);
        constexpr bool spherical = Dim == 3;
        auto& scratch = kernel_detail::series_scratch();
        kernel_detail::first_kind_ratios(x_u, count, spherical, scratch.lo);
        scratch.ensure(a_, spherical, count);
        double ratio = kernel_detail::first_kind_zero_ratio(x_u, a_, spherical);
        double power = 1.0;
        double correction = ratio - power;
        double mode_prev = 1.0;
        double mode_cur = cos_theta;
        const double* inv = kernel_detail::reciprocal_table();
        for (int n = 1; n < count; ++n) {
            const auto idx = static_cast<std::size_t>(n);
            ratio *= scratch.lo[idx] * scratch.inv_first_a[idx];
            power *= rho;
            const double weight = spherical ? 2.0 * n + 1.0 : 2.0;
            correction += weight * mode_cur * (ratio - power);
            const double mode_next = spherical
                                         ? ((2.0 * n + 1.0) * cos_theta * mode_cur - n * mode_prev) * inv[n]
                                         : 2.0 * cos_theta * mode_cur - mode_prev;
            mode_prev = mode_cur;
            mode_cur = mode_next;
        }
        const double value = harmonic_value + correction / sphere_area<Dim>(radius_);
        return std::max(0.0, value);
    }

    /// Closed-form approximation of G(x, y) for x anywhere in the ball.
    double green_offcentered_approx(const Vec<Dim>& x, const Vec<Dim>& y,
                                    OffCenteredForm form = OffCenteredForm::paper) const {
        const Vec<Dim> u = x - center_;
        const Vec<Dim> v = y - center_;
        check_inside(u, "green_offcentered_approx");
        check_inside(v, "green_offcentered_approx");
        const double w = (y - x).norm();
        if (w == 0.0) {
            throw DomainError("green_offcentered_approx: x and y coincide");
        }
        const double rho = image_distance(u, v, form);
        if (rho <= 0.0) {
            return 0.0;
        }
        return (q(w) - q(rho)) / c_d;
    }

    /// Closed-form approximation of P(x, z) for z on the sphere.
    double poisson_offcentered_approx(const Vec<Dim>& x, const Vec<Dim>& z,
                                      OffCenteredForm form = OffCenteredForm::paper) const {
        const Vec<Dim> u = x - center_;
        check_inside(u, "poisson_offcentered_approx");
        check_on_sphere(z, "poisson_offcentered_approx");
        const Vec<Dim> v = z - center_;
        const double w = (z - x).norm();
        if (form == OffCenteredForm::kelvin) {
            return v_of(w) * (radius_ * radius_ - u.squaredNorm()) / (c_d * radius_ * w);
        }
        const double nv = v.norm();
        const double uv = u.dot(v);
        const double rho = (radius_ * radius_ - uv) / radius_;
        double value = v_of(w) * (nv * nv - uv) / (w * nv);
        if (uv != 0.0) {
            value += v_of(rho) * uv / (radius_ * nv);
        }
        return value / c_d;
    }

    /// grad_x G(x, y) evaluated at x = center.
    Vec<Dim> green_gradient_centered(const Vec<Dim>& y) const {
        const Vec<Dim> w = y - center_;
        const double r = w.norm();
        if (!(r > 0.0)) {
            throw DomainError("green_gradient_centered: y coincides with the center");
        }
        if (r > radius_ * (1.0 + kernel_detail::radius_tolerance)) {
            throw DomainError("green_gradient_centered: y lies outside the ball");
        }
        double factor = 0.0;
        if (harmonic_) {
            factor = Dim == 2 ? (1.0 / (r * r) - 1.0 / (radius_ * radius_)) / c_d
                              : (1.0 / (r * r * r) - 1.0 / (radius_ * radius_ * radius_)) / c_d;
        } else {
            const double x = r * s_;
            if constexpr (Dim == 2) {
                const double k1s_a = specfun::bessel_k_scaled(1, a_);
                const double i1s_a = specfun::bessel_i_scaled(1, a_);
                const double bracket = std::exp(-x) * specfun::bessel_k_scaled(1, x) -
                                       k1s_a / i1s_a * specfun::bessel_i_scaled(1, x) * std::exp(x - 2.0 * a_);
                factor = s_ * bracket / (c_d * r);
            } else {
                const double bracket = std::exp(-x) * (1.0 + 1.0 / x) -
                                       std::exp(x - 2.0 * a_) * (1.0 + 1.0 / a_) *
                                           kernel_detail::chs_scaled(x) / kernel_detail::chs_scaled(a_);
                factor = s_ * bracket / (c_d * r * r);
            }
        }
        return factor * w;
    }

    /// grad_x P(x, z) evaluated at x = center.
    Vec<Dim> poisson_gradient_centered(const Vec<Dim>& z) const {
        check_on_sphere(z, "poisson_gradient_centered");
        const Vec<Dim> w = z - center_;
        double factor = 0.0;
        const double r2 = radius_ * radius_;
        if (harmonic_) {
            factor = Dim == 2 ? 1.0 / (std::numbers::pi * r2 * radius_)
                              : 3.0 / (4.0 * std::numbers::pi * r2 * r2);
        } else if constexpr (Dim == 2) {
            factor = sigma_ / (c_d * radius_) * std::exp(-a_) / (a_ * specfun::bessel_i_scaled(1, a_));
        } else {
            factor = sigma_ / (c_d * r2) * std::exp(-a_) / kernel_detail::chs_scaled(a_);
        }
        return factor * w;
    }

    /// Radial density |S| r^{d-1} G(r) / |G| on [0, R].
    double radial_density(double r) const {
        if (r <= 0.0 || r >= radius_) {
            return 0.0;
        }
        return unit_sphere_area<Dim>() * std::pow(r, Dim - 1) * std::max(0.0, q(r)) / (c_d * norm_);
    }

    /// Rejection envelope h(R, sigma) for the radial density.
    double radial_envelope() const { return envelope(radius_, sigma_); }

    static double envelope(double radius, double sigma) {
        const double inv_r = 1.0 / radius;
        const double inv_s = sigma > 0.0 ? 1.0 / sigma : std::numeric_limits<double>::infinity();
        const double sqrt_r = std::sqrt(radius);
        const double sqrt_s = std::sqrt(sigma);
        if (radius <= sigma) {
            return std::max(2.2 * std::max(inv_r, inv_s), 0.6 * std::max(sqrt_r, sqrt_s));
        }
        return std::max(2.2 * std::min(inv_r, inv_s), 0.6 * std::min(sqrt_r, sqrt_s));
    }

    /// Draws y with density G(c, y) / |G|.
    GreenSample<Dim> sample_green_centered(Rng& rng) const {
        const double h = radial_envelope();
        for (int attempt = 0; attempt < 10000; ++attempt) {
            const double r = radius_ * rng.uniform();
            const double u = rng.uniform();
            const double density = radial_density(r);
            if (h * u < density) {
                if (density > h) {
                    envelope_violations().fetch_add(1, std::memory_order_relaxed);
                }
                const Vec<Dim> y = center_ + r * sample_unit_direction<Dim>(rng);
                return {y, std::max(0.0, q(r)) / (c_d * norm_)};
            }
        }
        throw EnvelopeFailure("sample_green_centered: 10000 consecutive rejections");
    }

private:
    void check_inside(const Vec<Dim>& offset, const char* who) const {
        if (!(offset.norm() <= radius_ * (1.0 + kernel_detail::radius_tolerance))) {
            throw DomainError(std::string(who) + ": point lies outside the ball");
        }
    }

    void check_on_sphere(const Vec<Dim>& z, const char* who) const {
        const double r = (z - center_).norm();
        if (!(std::abs(r - radius_) <= kernel_detail::radius_tolerance * radius_)) {
            throw DomainError(std::string(who) + ": point does not lie on the sphere");
        }
    }

    double image_distance(const Vec<Dim>& u, const Vec<Dim>& v, OffCenteredForm form) const {
        const double r2 = radius_ * radius_;
        if (form == OffCenteredForm::kelvin) {
            const double arg = u.squaredNorm() * v.squaredNorm() - 2.0 * r2 * u.dot(v) + r2 * r2;
            return std::sqrt(std::max(0.0, arg)) / radius_;
        }
        return (r2 - u.dot(v)) / radius_;
    }

    double v_of(double r) const { return v(r); }

    double harmonic_series(double r_lo, double r_hi, double cos_theta, int count) const {
        const double r2 = radius_ * radius_;
        if constexpr (Dim == 2) {
            double sum = std::log(radius_ / r_hi);
            const double theta = std::acos(cos_theta);
            const double t_direct = r_lo / r_hi;
            const double t_image = r_lo * r_hi / r2;
            double p_direct = 1.0;
            double p_image = 1.0;
            for (int n = 1; n < count; ++n) {
                p_direct *= t_direct;
                p_image *= t_image;
                sum += std::cos(n * theta) * (p_direct - p_image) / n;
            }
            return sum / c_d;
        } else {
            double sum = 0.0;
            double p_prev = 1.0;
            double p_cur = cos_theta;
            double lo_pow = 1.0;
            double hi_pow = 1.0 / r_hi;
            double image_pow = 1.0 / radius_;
            for (int n = 0; n < count; ++n) {
                const double legendre = n == 0 ? 1.0 : p_cur;
                sum += legendre * lo_pow * (hi_pow - image_pow);
                if (n >= 1) {
                    const double p_next = ((2.0 * n + 1.0) * cos_theta * p_cur - n * p_prev) / (n + 1.0);
                    p_prev = p_cur;
                    p_cur = p_next;
                }
                lo_pow *= r_lo;
                hi_pow /= r_hi;
                image_pow *= r_hi / r2;
            }
            return sum / c_d;
        }
    }

    double screened_series(double r_lo, double r_hi, double cos_theta, int count) const {
        constexpr bool spherical = Dim == 3;
        std::vector<double> log_i_lo;
        std::vector<double> log_i_hi;
        std::vector<double> log_k_hi;
        std::vector<double> log_i_a;
        std::vector<double> log_k_a;
        const double x_lo = r_lo * s_;
        const double x_hi = r_hi * s_;
        if (count > 1) {
            kernel_detail::log_first_kind(x_lo, count, spherical, log_i_lo);
        } else {
            log_i_lo.assign(1, r_lo > 0.0 ? (spherical ? kernel_detail::log_sinhc(x_lo)
                                                       : std::log(specfun::bessel_i_scaled(0, x_lo)) + x_lo)
                                           : 0.0);
        }
        kernel_detail::log_first_kind(x_hi, count, spherical, log_i_hi);
        kernel_detail::log_second_kind(x_hi, count, spherical, log_k_hi);
        kernel_detail::log_first_kind(a_, count, spherical, log_i_a);
        kernel_detail::log_second_kind(a_, count, spherical, log_k_a);

        const double theta = std::acos(cos_theta);
        double p_prev = 1.0;
        double p_cur = cos_theta;
        double sum = 0.0;
        for (int n = 0; n < count; ++n) {
            const auto idx = static_cast<std::size_t>(n);
            const double log_direct = log_i_lo[idx] + log_k_hi[idx];
            const double log_ratio = log_k_a[idx] - log_i_a[idx] + log_i_hi[idx] - log_k_hi[idx];
            const double radial = std::exp(log_direct) * -std::expm1(std::min(0.0, log_ratio));
            double mode = 0.0;
            if constexpr (Dim == 2) {
                mode = (n == 0 ? 1.0 : 2.0) * std::cos(n * theta);
            } else {
                mode = (2.0 * n + 1.0) * (n == 0 ? 1.0 : p_cur);
                if (n >= 1) {
                    const double p_next = ((2.0 * n + 1.0) * cos_theta * p_cur - n * p_prev) / (n + 1.0);
                    p_prev = p_cur;
                    p_cur = p_next;
                }
            }
            sum += mode * radial;
        }
        return spherical ? sum * s_ / c_d : sum / c_d;
    }

    Vec<Dim> center_;
    double radius_;
    double sigma_;
    double s_ = 0.0;
    double a_ = 0.0;
    bool harmonic_ = false;
    double norm_ = 0.0;
    double poisson_ = 0.0;
    double i0s_a_ = 0.0;
    double k0s_a_ = 0.0;
    double em2a_ = 0.0;
};

// Free-function forms of the kernel operations.

template <int Dim>
double green_centered(const BallKernel<Dim>& k, double r) { return k.green_centered(r); }

template <int Dim>
double green_norm(const BallKernel<Dim>& k) { return k.green_norm(); }

template <int Dim>
double poisson_centered(const BallKernel<Dim>& k) { return k.poisson_centered(); }

template <int Dim>
double green_offcentered_series(const BallKernel<Dim>& k, const Vec<Dim>& x, const Vec<Dim>& y, int n_terms) {
    return k.green_offcentered_series(x, y, n_terms);
}

template <int Dim>
double green_offcentered_approx(const BallKernel<Dim>& k, const Vec<Dim>& x, const Vec<Dim>& y,
                                OffCenteredForm form = OffCenteredForm::paper) {
    return k.green_offcentered_approx(x, y, form);
}

template <int Dim>
double poisson_offcentered_approx(const BallKernel<Dim>& k, const Vec<Dim>& x, const Vec<Dim>& z,
                                  OffCenteredForm form = OffCenteredForm::paper) {
    return k.poisson_offcentered_approx(x, z, form);
}

template <int Dim>
Vec<Dim> green_gradient_centered(const BallKernel<Dim>& k, const Vec<Dim>& y) {
    return k.green_gradient_centered(y);
}

template <int Dim>
Vec<Dim> poisson_gradient_centered(const BallKernel<Dim>& k, const Vec<Dim>& z) {
    return k.poisson_gradient_centered(z);
}

template <int Dim>
GreenSample<Dim> sample_green_centered(const BallKernel<Dim>& k, Rng& rng) {
    return k.sample_green_centered(rng);
}

}  // namespace vcwos
