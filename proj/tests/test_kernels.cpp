// SPDX-License-Identifier: Apache-2.0
#include "vcwos/kernels.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

using namespace vcwos;

namespace {

constexpr double pi = std::numbers::pi;

template <int Dim>
Vec<Dim> unit_x(double scale = 1.0) {
    Vec<Dim> v = Vec<Dim>::Zero();
    v[0] = scale;
    return v;
}

template <int Dim>
Vec<Dim> random_in_ball(Rng& rng, double radius) {
    return sample_ball_uniform<Dim>(Vec<Dim>::Zero(), radius, rng);
}

// Independent evaluation of the 3D profile straight from the sinh form.
double q3_reference(double r, double radius, double sigma) {
    const double s = std::sqrt(sigma);
    return std::exp(-r * s) / r -
           std::exp(-radius * s) / radius * (std::sinh(r * s) / (r * s)) * (radius * s / std::sinh(radius * s));
}

// Composite Simpson rule.
template <typename F>
double simpson(F f, double lo, double hi, int intervals) {
    const double h = (hi - lo) / intervals;
    double sum = f(lo) + f(hi);
    for (int i = 1; i < intervals; ++i) {
        sum += f(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return sum * h / 3.0;
}

}  // namespace

TEST(BallKernel, RejectsInvalidParameters) {
    EXPECT_THROW(BallKernel<2>(Vec<2>::Zero(), 0.0, 1.0), DomainError);
    EXPECT_THROW(BallKernel<3>(Vec<3>::Zero(), 1.0, -1.0), DomainError);
    EXPECT_THROW(BallKernel<3>(Vec<3>::Zero(), 1.0, std::nan("")), DomainError);
}

TEST(GreenCentered, FrozenValues) {
    const BallKernel<3> harmonic(Vec<3>::Zero(), 1.0, 0.0);
    EXPECT_NEAR(harmonic.green_centered(0.5), 1.0 / (4 * pi) * (1 / 0.5 - 1.0), 1e-15);
    const BallKernel<3> screened(Vec<3>::Zero(), 1.0, 1.0);
    EXPECT_NEAR(screened.green_centered(0.5), 0.070571, 1e-5);
    EXPECT_NEAR(screened.green_centered(0.5), q3_reference(0.5, 1.0, 1.0) / (4 * pi), 1e-14);
    const BallKernel<2> harmonic2(Vec<2>::Zero(), 2.0, 0.0);
    EXPECT_NEAR(harmonic2.green_centered(0.5), std::log(4.0) / (2 * pi), 1e-15);
}

TEST(GreenCentered, MatchesStandardLibraryBessel) {
    for (double sigma : {0.3, 4.0, 50.0}) {
        const BallKernel<2> k(Vec<2>::Zero(), 1.5, sigma);
        const double s = std::sqrt(sigma);
        const double a = 1.5 * s;
        for (double r : {0.01, 0.4, 1.2}) {
            const double expected = (std::cyl_bessel_k(0.0, r * s) -
                                     std::cyl_bessel_k(0.0, a) / std::cyl_bessel_i(0.0, a) * std::cyl_bessel_i(0.0, r * s)) /
                                    (2 * pi);
            EXPECT_NEAR(k.green_centered(r), expected, 1e-12 * std::abs(expected) + 1e-15);
        }
    }
}

TEST(GreenCentered, ZeroOnBoundaryPositiveInside) {
    for (double sigma : {0.0, 1e-9, 0.7, 30.0, 900.0}) {
        const BallKernel<2> k2(Vec<2>::Zero(), 0.8, sigma);
        const BallKernel<3> k3(Vec<3>::Zero(), 0.8, sigma);
        EXPECT_EQ(k2.green_centered(0.8), 0.0);
        EXPECT_EQ(k3.green_centered(0.8), 0.0);
        for (double r = 0.004; r < 0.8; r += 0.004) {
            ASSERT_GT(k2.green_centered(r), 0.0) << sigma << " " << r;
            ASSERT_GT(k3.green_centered(r), 0.0) << sigma << " " << r;
        }
    }
}

TEST(GreenCentered, DomainErrors) {
    const BallKernel<3> k(Vec<3>::Zero(), 1.0, 1.0);
    EXPECT_THROW(k.green_centered(0.0), DomainError);
    EXPECT_THROW(k.green_centered(1.01), DomainError);
    EXPECT_NO_THROW(k.green_centered(1.0 + 1e-12));
}

TEST(GreenNorm, FrozenValues) {
    EXPECT_NEAR(BallKernel<3>(Vec<3>::Zero(), 1.0, 0.0).green_norm(), 1.0 / 6.0, 1e-15);
    EXPECT_NEAR(BallKernel<3>(Vec<3>::Zero(), 1.0, 1.0).green_norm(), 0.149082, 1e-6);
    EXPECT_NEAR(BallKernel<2>(Vec<2>::Zero(), 2.0, 0.0).green_norm(), 1.0, 1e-15);
    // (1/sigma)(1 - 1/I0(R sqrt sigma)) directly.
    EXPECT_NEAR(BallKernel<2>(Vec<2>::Zero(), 1.0, 9.0).green_norm(), (1.0 - 1.0 / std::cyl_bessel_i(0.0, 3.0)) / 9.0,
                1e-14);
}

TEST(GreenNorm, MatchesRadialQuadrature) {
    for (double sigma : {0.0, 0.01, 1.0, 25.0}) {
        const BallKernel<2> k2(Vec<2>::Zero(), 1.3, sigma);
        const BallKernel<3> k3(Vec<3>::Zero(), 1.3, sigma);
        // r G(r) and r^2 G(r) are bounded, so Simpson converges.
        const double i2 = simpson([&](double r) { return r > 0 ? 2 * pi * r * k2.green_centered(r) : 0.0; }, 0.0, 1.3, 20000);
        const double i3 = simpson([&](double r) { return r > 0 ? 4 * pi * r * r * k3.green_centered(r) : 0.0; }, 0.0, 1.3, 20000);
        EXPECT_NEAR(i2, k2.green_norm(), 1e-6 * k2.green_norm()) << sigma;
        EXPECT_NEAR(i3, k3.green_norm(), 1e-7 * k3.green_norm()) << sigma;
    }
}

TEST(GreenNorm, ScreeningMassBelowOne) {
    for (double radius : {0.01, 1.0, 3.0}) {
        for (double sigma : {0.0, 1e-6, 1.0, 100.0}) {
            EXPECT_LT(sigma * BallKernel<2>(Vec<2>::Zero(), radius, sigma).green_norm(), 1.0);
            EXPECT_LT(sigma * BallKernel<3>(Vec<3>::Zero(), radius, sigma).green_norm(), 1.0);
        }
    }
}

TEST(PoissonCentered, FrozenValues) {
    EXPECT_NEAR(BallKernel<3>(Vec<3>::Zero(), 1.0, 0.0).poisson_centered(), 1.0 / (4 * pi), 1e-15);
    EXPECT_NEAR(BallKernel<3>(Vec<3>::Zero(), 1.0, 1.0).poisson_centered(), 0.067714, 1e-6);
    EXPECT_NEAR(BallKernel<3>(Vec<3>::Zero(), 1.0, 1.0).poisson_centered(), (1.0 - 0.149082) / (4 * pi), 1e-6);
    EXPECT_NEAR(BallKernel<2>(Vec<2>::Zero(), 1.0, 1.0).poisson_centered(), 1.0 / (2 * pi * std::cyl_bessel_i(0.0, 1.0)),
                1e-14);
}

TEST(PoissonCentered, MassIdentityGrid) {
    for (double radius : {0.1, 1.0, 10.0}) {
        for (double sigma : {0.0, 1e-12, 0.5, 2.0, 20.0}) {
            const BallKernel<2> k2(Vec<2>::Zero(), radius, sigma);
            const BallKernel<3> k3(Vec<3>::Zero(), radius, sigma);
            EXPECT_NEAR(k2.poisson_centered() * sphere_area<2>(radius) + sigma * k2.green_norm(), 1.0, 1e-10);
            EXPECT_NEAR(k3.poisson_centered() * sphere_area<3>(radius) + sigma * k3.green_norm(), 1.0, 1e-10);
        }
    }
}

TEST(PoissonCentered, EqualsMinusProfileSlopeAtBoundary) {
    for (double sigma : {0.0, 0.4, 12.0}) {
        const BallKernel<2> k2(Vec<2>::Zero(), 0.7, sigma);
        const BallKernel<3> k3(Vec<3>::Zero(), 0.7, sigma);
        EXPECT_NEAR(k2.v(0.7) / (2 * pi), k2.poisson_centered(), 1e-12 * k2.poisson_centered());
        EXPECT_NEAR(k3.v(0.7) / (4 * pi), k3.poisson_centered(), 1e-12 * k3.poisson_centered());
        const double h = 1e-5;
        EXPECT_NEAR(-(k3.q(0.3 + h) - k3.q(0.3 - h)) / (2 * h), k3.v(0.3), 1e-6 * k3.v(0.3));
        EXPECT_NEAR(-(k2.q(0.3 + h) - k2.q(0.3 - h)) / (2 * h), k2.v(0.3), 1e-6 * k2.v(0.3));
    }
}

TEST(OffCenteredSeries, ReducesToCenteredAtCenter) {
    Rng rng(11);
    for (double sigma : {0.0, 0.3, 5.0, 100.0}) {
        const BallKernel<2> k2(Vec<2>::Zero(), 1.0, sigma);
        const BallKernel<3> k3(Vec<3>::Zero(), 1.0, sigma);
        for (int i = 0; i < 10; ++i) {
            const Vec<2> y2 = random_in_ball<2>(rng, 0.95);
            const Vec<3> y3 = random_in_ball<3>(rng, 0.95);
            for (int terms : {1, 200}) {
                EXPECT_NEAR(k2.green_offcentered_series(Vec<2>::Zero(), y2, terms), k2.green_centered(y2.norm()), 1e-12);
                EXPECT_NEAR(k3.green_offcentered_series(Vec<3>::Zero(), y3, terms), k3.green_centered(y3.norm()), 1e-12);
            }
        }
    }
}

TEST(OffCenteredSeries, ConvergedAt200Terms) {
    Rng rng(12);
    for (double sigma : {0.0, 0.5, 4.0, 40.0}) {
        const BallKernel<2> k2(Vec<2>::Zero(), 1.0, sigma);
        const BallKernel<3> k3(Vec<3>::Zero(), 1.0, sigma);
        int checked = 0;
        while (checked < 20) {
            const Vec<3> x = random_in_ball<3>(rng, 0.9);
            const Vec<3> y = random_in_ball<3>(rng, 0.9);
            const double ratio = std::min(x.norm(), y.norm()) / std::max(x.norm(), y.norm());
            if (ratio > 0.8) {
                continue;  // equal radii converge only through angular cancellation
            }
            ++checked;
            const double g200 = k3.green_offcentered_series(x, y, 200);
            EXPECT_LT(std::abs(g200 - k3.green_offcentered_series(x, y, 190)), 1e-8 * std::abs(g200));
            const Vec<2> x2 = x.head<2>();
            const Vec<2> y2 = y.head<2>();
            const double r2 = std::min(x2.norm(), y2.norm()) / std::max(x2.norm(), y2.norm());
            if (r2 <= 0.8) {
                const double h200 = k2.green_offcentered_series(x2, y2, 200);
                EXPECT_LT(std::abs(h200 - k2.green_offcentered_series(x2, y2, 190)), 1e-8 * std::abs(h200));
            }
        }
    }
}

TEST(OffCenteredSeries, Symmetric) {
    Rng rng(13);
    for (double sigma : {0.0, 1.0, 30.0}) {
        const BallKernel<2> k2(Vec<2>(0.3, -0.2), 1.2, sigma);
        const BallKernel<3> k3(Vec<3>(0.1, 0.2, 0.3), 1.2, sigma);
        for (int i = 0; i < 10; ++i) {
            const Vec<2> x2 = k2.center() + random_in_ball<2>(rng, 1.0);
            const Vec<2> y2 = k2.center() + random_in_ball<2>(rng, 1.0);
            EXPECT_NEAR(k2.green_offcentered_series(x2, y2, 200), k2.green_offcentered_series(y2, x2, 200), 1e-10);
            const Vec<3> x3 = k3.center() + random_in_ball<3>(rng, 1.0);
            const Vec<3> y3 = k3.center() + random_in_ball<3>(rng, 1.0);
            EXPECT_NEAR(k3.green_offcentered_series(x3, y3, 200), k3.green_offcentered_series(y3, x3, 200), 1e-10);
        }
    }
}

TEST(OffCenteredSeries, HarmonicMatchesKelvinImage) {
    Rng rng(14);
    const BallKernel<2> k2(Vec<2>::Zero(), 1.0, 0.0);
    const BallKernel<3> k3(Vec<3>::Zero(), 1.0, 0.0);
    for (int i = 0; i < 20; ++i) {
        const Vec<2> x2 = random_in_ball<2>(rng, 0.6);
        const Vec<2> y2 = random_in_ball<2>(rng, 0.6) * 0.5;
        if (std::min(x2.norm(), y2.norm()) / std::max(x2.norm(), y2.norm()) > 0.8) {
            continue;
        }
        EXPECT_NEAR(k2.green_offcentered_series(x2, y2, 400), k2.green_offcentered_approx(x2, y2, OffCenteredForm::kelvin),
                    1e-12);
        const Vec<3> x3 = random_in_ball<3>(rng, 0.6);
        const Vec<3> y3 = random_in_ball<3>(rng, 0.3);
        if (std::min(x3.norm(), y3.norm()) / std::max(x3.norm(), y3.norm()) > 0.8) {
            continue;
        }
        EXPECT_NEAR(k3.green_offcentered_series(x3, y3, 400), k3.green_offcentered_approx(x3, y3, OffCenteredForm::kelvin),
                    1e-12);
    }
}

TEST(OffCenteredSeries, DomainErrors) {
    const BallKernel<3> k(Vec<3>::Zero(), 1.0, 1.0);
    EXPECT_THROW(k.green_offcentered_series(unit_x<3>(1.2), unit_x<3>(0.1), 10), DomainError);
    EXPECT_THROW(k.green_offcentered_series(unit_x<3>(0.2), unit_x<3>(0.1), 0), DomainError);
    EXPECT_THROW(k.green_offcentered_series(unit_x<3>(0.2), unit_x<3>(0.2), 10), DomainError);
}

TEST(OffCenteredExact, AgreesWithSeriesAwayFromEqualRadii) {
    Rng rng(15);
    for (double sigma : {0.0025, 1.0, 9.0, 100.0, 900.0}) {
        const BallKernel<2> k2(Vec<2>::Zero(), 1.0, sigma);
        const BallKernel<3> k3(Vec<3>::Zero(), 1.0, sigma);
        for (int i = 0; i < 40; ++i) {
            const Vec<3> x = random_in_ball<3>(rng, 0.95);
            const Vec<3> y = random_in_ball<3>(rng, 0.95);
            if (std::min(x.norm(), y.norm()) / std::max(x.norm(), y.norm()) > 0.95) {
                continue;
            }
            const double s3 = k3.green_offcentered_series(x, y, 1500);
            EXPECT_NEAR(k3.green_offcentered_exact(x, y), s3, 1e-11 * std::max(s3, 1e-3));
            const Vec<2> x2 = x.head<2>();
            const Vec<2> y2 = y.head<2>();
            if (std::min(x2.norm(), y2.norm()) / std::max(x2.norm(), y2.norm()) > 0.95) {
                continue;
            }
            const double s2 = k2.green_offcentered_series(x2, y2, 1500);
            EXPECT_NEAR(k2.green_offcentered_exact(x2, y2), s2, 1e-11 * std::max(s2, 1e-3));
        }
    }
}

TEST(OffCenteredExact, ExactAtCenterAndSymmetric) {
    Rng rng(16);
    for (double sigma : {0.0, 0.7, 40.0}) {
        const BallKernel<3> k(Vec<3>(1.0, 0.0, -1.0), 0.5, sigma);
        for (int i = 0; i < 20; ++i) {
            const Vec<3> y = k.center() + random_in_ball<3>(rng, 0.5);
            EXPECT_NEAR(k.green_offcentered_exact(k.center(), y), k.green_centered((y - k.center()).norm()),
                        1e-12 * k.green_centered((y - k.center()).norm()) + 1e-15);
            const Vec<3> x = k.center() + random_in_ball<3>(rng, 0.5);
            EXPECT_NEAR(k.green_offcentered_exact(x, y), k.green_offcentered_exact(y, x),
                        1e-12 * k.green_offcentered_exact(x, y) + 1e-15);
            const Vec<3> z = sample_sphere_uniform<3>(k.center(), 0.5, rng);
            EXPECT_NEAR(k.poisson_offcentered_exact(k.center(), z), k.poisson_centered(), 1e-14);
        }
    }
}

TEST(OffCenteredExact, PoissonMatchesSeries) {
    Rng rng(17);
    for (double sigma : {0.0, 0.5, 8.0, 200.0}) {
        const BallKernel<2> k2(Vec<2>::Zero(), 1.0, sigma);
        const BallKernel<3> k3(Vec<3>::Zero(), 1.0, sigma);
        for (int i = 0; i < 20; ++i) {
            const Vec<3> x = random_in_ball<3>(rng, 0.85);
            const Vec<3> z = sample_sphere_uniform<3>(Vec<3>::Zero(), 1.0, rng);
            const double p3 = k3.poisson_offcentered_series(x, z, 400);
            EXPECT_NEAR(k3.poisson_offcentered_exact(x, z), p3, 1e-10 * std::max(p3, 1e-3));
            const Vec<2> x2 = x.head<2>();
            const Vec<2> z2 = z.head<2>().normalized();
            const double p2 = k2.poisson_offcentered_series(x2, z2, 400);
            EXPECT_NEAR(k2.poisson_offcentered_exact(x2, z2), p2, 1e-10 * std::max(p2, 1e-3));
        }
    }
}

TEST(OffCenteredExact, MassIdentityByQuadrature) {
    // For constant sigma, u = 1 solves the screened problem with source sigma:
    // integral of P over the sphere plus sigma times integral of G equals 1.
    for (double sigma : {0.5, 6.0}) {
        const BallKernel<2> k(Vec<2>::Zero(), 1.0, sigma);
        for (double offset : {0.3, 0.7}) {
            const Vec<2> x(offset, 0.0);
            const int n_angle = 2000;
            double boundary = 0.0;
            for (int i = 0; i < n_angle; ++i) {
                const double t = 2 * pi * (i + 0.5) / n_angle;
                boundary += k.poisson_offcentered_exact(x, Vec<2>(std::cos(t), std::sin(t)));
            }
            boundary *= 2 * pi / n_angle;
            // Polar coordinates around x; r G is bounded.
            double interior = 0.0;
            const int n_phi = 400;
            for (int j = 0; j < n_phi; ++j) {
                const double phi = 2 * pi * (j + 0.5) / n_phi;
                const Vec<2> dir(std::cos(phi), std::sin(phi));
                const double b = x.dot(dir);
                const double reach = -b + std::sqrt(b * b + 1.0 - x.squaredNorm());
                interior += simpson(
                                [&](double r) { return r > 0 && r < reach ? r * k.green_offcentered_exact(x, x + r * dir) : 0.0; },
                                0.0, reach, 400) *
                            (2 * pi / n_phi);
            }
            EXPECT_NEAR(boundary + sigma * interior, 1.0, 2e-4) << sigma << " " << offset;
        }
    }
}

TEST(OffCenteredApprox, ExactAtCenter) {
    Rng rng(18);
    for (double sigma : {0.0, 0.2, 3.0, 60.0}) {
        const BallKernel<2> k2(Vec<2>(0.5, 0.5), 0.9, sigma);
        const BallKernel<3> k3(Vec<3>(0.5, 0.5, 0.5), 0.9, sigma);
        for (int i = 0; i < 10; ++i) {
            const Vec<2> y2 = k2.center() + random_in_ball<2>(rng, 0.9);
            const Vec<3> y3 = k3.center() + random_in_ball<3>(rng, 0.9);
            for (auto form : {OffCenteredForm::paper, OffCenteredForm::kelvin}) {
                EXPECT_NEAR(k2.green_offcentered_approx(k2.center(), y2, form),
                            k2.green_centered((y2 - k2.center()).norm()), 1e-12);
                EXPECT_NEAR(k3.green_offcentered_approx(k3.center(), y3, form),
                            k3.green_centered((y3 - k3.center()).norm()), 1e-12);
                const Vec<2> z2 = sample_sphere_uniform<2>(k2.center(), 0.9, rng);
                const Vec<3> z3 = sample_sphere_uniform<3>(k3.center(), 0.9, rng);
                EXPECT_NEAR(k2.poisson_offcentered_approx(k2.center(), z2, form), k2.poisson_centered(), 1e-12);
                EXPECT_NEAR(k3.poisson_offcentered_approx(k3.center(), z3, form), k3.poisson_centered(), 1e-12);
            }
        }
    }
}

TEST(OffCenteredApprox, KelvinVanishesAtSphere) {
    for (double sigma : {0.0, 1.0, 10.0}) {
        const BallKernel<3> k(Vec<3>::Zero(), 1.0, sigma);
        const Vec<3> x(0.2, -0.3, 0.1);
        const Vec<3> dir = Vec<3>(1.0, 2.0, -0.5).normalized();
        double prev = k.green_offcentered_approx(x, 0.99 * dir, OffCenteredForm::kelvin);
        for (double t : {0.999, 0.9999, 0.99999}) {
            const double value = k.green_offcentered_approx(x, t * dir, OffCenteredForm::kelvin);
            EXPECT_LT(value, prev);
            prev = value;
        }
        EXPECT_LT(prev, 1e-5);
    }
}

TEST(OffCenteredApprox, PaperFormVanishesAtSphereOnlyFromCenter) {
    const BallKernel<3> k(Vec<3>::Zero(), 1.0, 1.0);
    const Vec<3> dir = Vec<3>(1.0, 2.0, -0.5).normalized();
    EXPECT_LT(std::abs(k.green_offcentered_approx(Vec<3>::Zero(), 0.99999 * dir)), 1e-5);
    // Off center the reflected distance differs from |y - x| on the sphere,
    // so the closed form leaves a residual there.
    EXPECT_GT(std::abs(k.green_offcentered_approx(Vec<3>(0.2, -0.3, 0.1), 0.99999 * dir)), 1e-4);
}

TEST(OffCenteredApprox, CenteredPoissonIntegratesToBoundaryMass) {
    for (double sigma : {0.0, 0.8, 15.0}) {
        const BallKernel<2> k(Vec<2>::Zero(), 2.0, sigma);
        const int n = 720;
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            const double t = 2 * pi * i / n;
            sum += k.poisson_offcentered_approx(Vec<2>::Zero(), Vec<2>(2 * std::cos(t), 2 * std::sin(t)));
        }
        EXPECT_NEAR(sum * (2 * pi * 2.0) / n, 1.0 - sigma * k.green_norm(), 1e-6);
    }
}

TEST(OffCenteredApprox, KelvinExactForHarmonic) {
    Rng rng(19);
    const BallKernel<3> k(Vec<3>::Zero(), 1.0, 0.0);
    for (int i = 0; i < 20; ++i) {
        const Vec<3> x = random_in_ball<3>(rng, 0.9);
        const Vec<3> z = sample_sphere_uniform<3>(Vec<3>::Zero(), 1.0, rng);
        const double exact = (1.0 - x.squaredNorm()) / (4 * pi * std::pow((z - x).norm(), 3));
        EXPECT_NEAR(k.poisson_offcentered_approx(x, z, OffCenteredForm::kelvin), exact, 1e-12 * exact);
    }
}

TEST(OffCenteredApprox, DomainErrors) {
    const BallKernel<2> k(Vec<2>::Zero(), 1.0, 1.0);
    EXPECT_THROW(k.poisson_offcentered_approx(Vec<2>(0.1, 0.0), Vec<2>(0.5, 0.0)), DomainError);
    EXPECT_THROW(k.green_offcentered_approx(Vec<2>(1.5, 0.0), Vec<2>(0.5, 0.0)), DomainError);
}

TEST(GradientKernels, ParallelAndAntisymmetric) {
    const BallKernel<3> k(Vec<3>::Zero(), 1.0, 1.0);
    const Vec<3> y(0.2, -0.3, 0.4);
    const Vec<3> g = k.green_gradient_centered(y);
    EXPECT_NEAR(g.normalized().dot(y.normalized()), 1.0, 1e-14);
    EXPECT_NEAR((k.green_gradient_centered(-y) + g).norm(), 0.0, 1e-15);
    EXPECT_THROW(k.green_gradient_centered(Vec<3>::Zero()), DomainError);
    const Vec<3> z = Vec<3>(1.0, 1.0, 0.0).normalized();
    EXPECT_NEAR(k.poisson_gradient_centered(z).normalized().dot(z), 1.0, 1e-14);
    EXPECT_THROW(k.poisson_gradient_centered(Vec<3>(0.5, 0.0, 0.0)), DomainError);
}

TEST(GradientKernels, FrozenPoissonGradient2D) {
    const BallKernel<2> k(Vec<2>::Zero(), 1.0, 1.0);
    const Vec<2> z(0.6, 0.8);
    const double expected = 1.0 / (2 * pi) / (1.0 * 0.5651591);
    EXPECT_NEAR(k.poisson_gradient_centered(z).norm(), expected, 1e-6);
}

TEST(GradientKernels, MatchFiniteDifferencesOfExactKernels) {
    Rng rng(20);
    const double h = 1e-5;
    for (int trial = 0; trial < 20; ++trial) {
        const double radius = 0.3 + 1.5 * rng.uniform();
        const double sigma = trial % 5 == 0 ? 0.0 : std::pow(10.0, -2.0 + 4.0 * rng.uniform());
        {
            const BallKernel<3> k(Vec<3>::Zero(), radius, sigma);
            Vec<3> y = random_in_ball<3>(rng, 0.9 * radius);
            if (y.norm() < 0.1 * radius) {
                y *= 3.0;
            }
            const Vec<3> z = sample_sphere_uniform<3>(Vec<3>::Zero(), radius, rng);
            const Vec<3> g = k.green_gradient_centered(y);
            const Vec<3> p = k.poisson_gradient_centered(z);
            for (int axis = 0; axis < 3; ++axis) {
                Vec<3> e = Vec<3>::Zero();
                e[axis] = h * radius;
                const double fd_g = (k.green_offcentered_exact(e, y) - k.green_offcentered_exact(-e, y)) / (2 * h * radius);
                const double fd_p = (k.poisson_offcentered_exact(e, z) - k.poisson_offcentered_exact(-e, z)) / (2 * h * radius);
                EXPECT_NEAR(g[axis], fd_g, 1e-5 * g.norm()) << trial;
                EXPECT_NEAR(p[axis], fd_p, 1e-5 * p.norm()) << trial;
            }
        }
        {
            const BallKernel<2> k(Vec<2>::Zero(), radius, sigma);
            Vec<2> y = random_in_ball<2>(rng, 0.9 * radius);
            if (y.norm() < 0.1 * radius) {
                y *= 3.0;
            }
            const Vec<2> z = sample_sphere_uniform<2>(Vec<2>::Zero(), radius, rng);
            const Vec<2> g = k.green_gradient_centered(y);
            const Vec<2> p = k.poisson_gradient_centered(z);
            for (int axis = 0; axis < 2; ++axis) {
                Vec<2> e = Vec<2>::Zero();
                e[axis] = h * radius;
                const double fd_g = (k.green_offcentered_exact(e, y) - k.green_offcentered_exact(-e, y)) / (2 * h * radius);
                const double fd_p = (k.poisson_offcentered_exact(e, z) - k.poisson_offcentered_exact(-e, z)) / (2 * h * radius);
                EXPECT_NEAR(g[axis], fd_g, 1e-5 * g.norm()) << trial;
                EXPECT_NEAR(p[axis], fd_p, 1e-5 * p.norm()) << trial;
            }
        }
    }
}

TEST(GradientKernels, PoissonGradientIntegratesToZero) {
    const BallKernel<2> k(Vec<2>::Zero(), 1.0, 0.0);
    Vec<2> sum = Vec<2>::Zero();
    const int n = 1000;
    for (int i = 0; i < n; ++i) {
        const double t = 2 * pi * i / n;
        sum += k.poisson_gradient_centered(Vec<2>(std::cos(t), std::sin(t)));
    }
    EXPECT_LT(sum.norm() * 2 * pi / n, 1e-8);
}

TEST(Envelope, FrozenValue) {
    EXPECT_DOUBLE_EQ(BallKernel<3>::envelope(1.0, 1.0), 2.2);
    EXPECT_DOUBLE_EQ(BallKernel<2>::envelope(0.5, 0.0), 4.4);
}

TEST(Envelope, BoundsRadialDensityOnGrid) {
    for (double radius : {0.01, 0.1, 0.3, 1.0, 3.0, 10.0, 100.0}) {
        for (double sigma : {0.0, 1e-4, 0.01, 0.1, 0.5, 1.0, 2.0, 10.0, 50.0, 200.0, 1000.0}) {
            const BallKernel<2> k2(Vec<2>::Zero(), radius, sigma);
            const BallKernel<3> k3(Vec<3>::Zero(), radius, sigma);
            double peak2 = 0.0;
            double peak3 = 0.0;
            for (int i = 1; i < 4000; ++i) {
                const double r = radius * i / 4000.0;
                peak2 = std::max(peak2, k2.radial_density(r));
                peak3 = std::max(peak3, k3.radial_density(r));
            }
            EXPECT_LE(peak2, k2.radial_envelope()) << radius << " " << sigma;
            EXPECT_LE(peak3, k3.radial_envelope()) << radius << " " << sigma;
        }
    }
}

TEST(SampleGreen, InverseDensityMeanIsVolume) {
    Rng rng(21);
    for (double sigma : {0.0, 2.0}) {
        const BallKernel<3> k(Vec<3>(1.0, 2.0, 3.0), 0.7, sigma);
        const int n = 200000;
        double sum = 0.0;
        double sum2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const auto s = k.sample_green_centered(rng);
            ASSERT_LE((s.point - k.center()).norm(), 0.7);
            const double inv = 1.0 / s.pdf;
            sum += inv;
            sum2 += inv * inv;
        }
        const double mean = sum / n;
        const double se = std::sqrt((sum2 / n - mean * mean) / n);
        EXPECT_NEAR(mean, ball_volume<3>(0.7), 3 * se);
    }
}

TEST(SampleGreen, PdfMatchesKernel) {
    Rng rng(22);
    const BallKernel<2> k(Vec<2>::Zero(), 1.0, 3.0);
    for (int i = 0; i < 100; ++i) {
        const auto s = k.sample_green_centered(rng);
        EXPECT_NEAR(s.pdf, k.green_centered(s.point.norm()) / k.green_norm(), 1e-12);
    }
}

TEST(SampleGreen, RadialHistogram) {
    Rng rng(23);
    const auto before = envelope_violations().load();
    for (double sigma : {0.0, 1.0, 40.0}) {
        const BallKernel<3> k(Vec<3>::Zero(), 1.0, sigma);
        const int n = 200000;
        const int bins = 50;
        std::array<int, 50> counts{};
        for (int i = 0; i < n; ++i) {
            const double r = k.sample_green_centered(rng).point.norm();
            ++counts[std::min(bins - 1, static_cast<int>(r * bins))];
        }
        for (int b = 0; b < bins; ++b) {
            const double expected =
                simpson([&](double r) { return k.radial_density(r); }, b / 50.0, (b + 1) / 50.0, 200);
            EXPECT_LT(std::abs(counts[b] / static_cast<double>(n) - expected), 4.0 / std::sqrt(n)) << sigma << " " << b;
        }
    }
    EXPECT_EQ(envelope_violations().load(), before);
}
