// SPDX-License-Identifier: Apache-2.0
#include "vcwos/coefficients/transform.hpp"
#include "vcwos/geometry/scene.hpp"
#include "vcwos/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>

using namespace vcwos;
using F2 = ScalarField<2>;
using F3 = ScalarField<3>;

namespace {

template <int Dim>
Vec<Dim> random_point(Rng& rng, double half_width) {
    Vec<Dim> x;
    for (int k = 0; k < Dim; ++k) {
        x[k] = (2.0 * rng.uniform() - 1.0) * half_width;
    }
    return x;
}

template <int Dim>
Vec<Dim> fd_gradient(const std::function<double(const Vec<Dim>&)>& f, const Vec<Dim>& x, double h) {
    Vec<Dim> g;
    for (int k = 0; k < Dim; ++k) {
        Vec<Dim> a = x;
        Vec<Dim> b = x;
        a[k] += h;
        b[k] -= h;
        g[k] = (f(a) - f(b)) / (2.0 * h);
    }
    return g;
}

template <int Dim>
double fd_laplacian(const std::function<double(const Vec<Dim>&)>& f, const Vec<Dim>& x, double h) {
    double s = 0.0;
    const double c = f(x);
    for (int k = 0; k < Dim; ++k) {
        Vec<Dim> a = x;
        Vec<Dim> b = x;
        a[k] += h;
        b[k] -= h;
        s += (f(a) - 2.0 * c + f(b)) / (h * h);
    }
    return s;
}

std::vector<F3> field_zoo() {
    const Vec<3> c(0.1, -0.2, 0.3);
    const auto lin = F3::linear(0.5, Vec<3>(1.0, -2.0, 0.5));
    const auto ex = F3::exponential(Vec<3>(0.3, 0.7, -0.4), 1.5);
    const auto bump = F3::gaussian_bump(c, 2.0, 0.6, 1.0);
    const auto wave = F3::sinusoid(0.7, Vec<3>(2.0, -1.0, 3.0), 0.4, 1.2);
    return {
        F3::constant(3.0), lin, ex, bump, wave, lin + wave, bump * wave, F3::product({ex, bump, lin}),
        F3::sum({bump * bump, 2.0 * ex, wave}),
    };
}

Scene<2> unit_disk() { return Scene<2>::from_sdf(sdf::sphere<2>(Vec<2>::Zero(), 1.0), 1e-3); }

}  // namespace

TEST(ScalarField, GradientMatchesFiniteDifferences) {
    Rng rng(1);
    for (const auto& f : field_zoo()) {
        const std::function<double(const Vec<3>&)> v = [&](const Vec<3>& x) { return f.value(x); };
        for (int i = 0; i < 20; ++i) {
            const Vec<3> x = random_point<3>(rng, 1.0);
            const Vec<3> g = f.gradient(x);
            const Vec<3> fd = fd_gradient<3>(v, x, 1e-5);
            EXPECT_LE((g - fd).norm(), 1e-6 * std::max(1.0, g.norm())) << to_string(f.kind());
            EXPECT_DOUBLE_EQ(f.jet(x).value, f.value(x));
        }
    }
}

TEST(ScalarField, LaplacianMatchesFiniteDifferences) {
    Rng rng(2);
    for (const auto& f : field_zoo()) {
        const std::function<double(const Vec<3>&)> v = [&](const Vec<3>& x) { return f.value(x); };
        for (int i = 0; i < 20; ++i) {
            const Vec<3> x = random_point<3>(rng, 1.0);
            const double lap = f.laplacian(x);
            const double fd = fd_laplacian<3>(v, x, 1e-4);
            EXPECT_LE(std::abs(lap - fd), 1e-4 * std::max(1.0, std::abs(lap))) << to_string(f.kind());
        }
    }
}

TEST(ScalarField, ConstancyDetection) {
    EXPECT_TRUE(F2::constant(2.0).is_constant());
    EXPECT_TRUE(F2::linear(1.0, Vec<2>::Zero()).is_constant());
    EXPECT_FALSE(F2::linear(1.0, Vec<2>(0, 1)).is_constant());
    EXPECT_TRUE((F2::constant(2.0) * F2::constant(3.0)).is_constant());
    EXPECT_FALSE((F2::constant(2.0) + F2::sinusoid(1, Vec<2>(1, 0), 0, 0)).is_constant());
    EXPECT_TRUE(F2::constant(0.0).is_zero());
    EXPECT_THROW(F2::gaussian_bump(Vec<2>::Zero(), 1, 0, 0), DomainError);
    EXPECT_THROW(F2::sum({}), DomainError);
}

TEST(Transform, ExponentialAlphaGivesUnitSigmaPrime) {
    Problem<2> p;
    p.alpha = F2::exponential(Vec<2>(2.0, 0.0));
    const auto tp = transform(p);
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        const Vec<2> x = random_point<2>(rng, 1.0);
        EXPECT_NEAR(tp.sigma_prime(x), 1.0, 1e-12);
        EXPECT_NEAR(tp.gamma(x), x[0], 1e-12);
    }
}

TEST(Transform, ConstantAlpha) {
    const double a = 2.5;
    Problem<3> p;
    p.alpha = F3::constant(a);
    p.sigma = F3::constant(4.0);
    p.source = F3::linear(1.0, Vec<3>(1, 2, 3));
    p.dirichlet = F3::sinusoid(1.0, Vec<3>(1, 1, 0), 0.0, 0.5);
    const auto tp = transform(p);
    Rng rng(4);
    for (int i = 0; i < 20; ++i) {
        const Vec<3> x = random_point<3>(rng, 1.0);
        EXPECT_NEAR(tp.sigma_prime(x), 4.0 / a, 1e-14);
        EXPECT_NEAR(tp.f_prime(x), p.source.value(x) * std::sqrt(a) / a, 1e-13);
        EXPECT_NEAR(tp.g_prime(x), std::sqrt(a) * p.dirichlet.value(x), 1e-13);
    }
}

TEST(Transform, GammaFormMatchesAlphaForm) {
    Problem<2> p;
    p.alpha = F2::gaussian_bump(Vec<2>(0.2, -0.1), 3.0, 0.4, 1.0);
    p.sigma = F2::sinusoid(0.5, Vec<2>(3, 1), 0.2, 1.0);
    const auto tp = transform(p);
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        const Vec<2> x = random_point<2>(rng, 1.0);
        const double a = tp.sigma_prime(x);
        const double b = tp.sigma_prime_alpha_form(x);
        EXPECT_LE(std::abs(a - b), 1e-10 * std::max(1.0, std::abs(a)));
    }
}

TEST(Transform, OperatorSubstitution) {
    // lap(e^gamma u) - sigma' e^gamma u == e^gamma / alpha * L u, with the Laplacian by finite differences.
    const auto u = F2::sinusoid(1.0, Vec<2>(1.3, -0.7), 0.3, 0.5) + F2::linear(0.2, Vec<2>(0.4, 0.1));
    std::vector<Problem<2>> problems(4);
    problems[0].alpha = F2::gaussian_bump(Vec<2>(0.3, 0.2), 2.0, 0.5, 1.0);
    problems[1].alpha = F2::sinusoid(0.6, Vec<2>(4.0, 2.0), 0.0, 1.5);
    problems[1].sigma = F2::gaussian_bump(Vec<2>::Zero(), 5.0, 0.5, 1.0);
    problems[2].alpha = F2::exponential(Vec<2>(0.5, -0.3));
    problems[2].drift_potential = F2::linear(0.0, Vec<2>(0.5, 1.0));
    problems[3].alpha = F2::gaussian_bump(Vec<2>(-0.2, 0.1), -0.5, 0.7, 1.0);
    problems[3].sigma = F2::constant(3.0);
    problems[3].drift_potential = F2::sinusoid(0.4, Vec<2>(2.0, 1.0), 0.1, 0.0);
    Rng rng(6);
    for (const auto& p : problems) {
        const auto tp = transform(p);
        const std::function<double(const Vec<2>&)> U = [&](const Vec<2>& x) {
            return std::exp(tp.gamma(x)) * u.value(x);
        };
        for (int i = 0; i < 20; ++i) {
            const Vec<2> x = random_point<2>(rng, 0.8);
            const double lhs = fd_laplacian<2>(U, x, 1e-3) - tp.sigma_prime(x) * U(x);
            const double rhs = std::exp(tp.gamma(x)) / p.alpha.value(x) * p.apply_operator(u, x);
            EXPECT_LE(std::abs(lhs - rhs), 1e-5 * std::max(1.0, std::abs(rhs)));
        }
    }
}

TEST(Transform, ManufacturedSourceAndBoundary) {
    Problem<2> p;
    p.alpha = F2::gaussian_bump(Vec<2>(0.3, 0.2), 2.0, 0.5, 1.0);
    p.sigma = F2::constant(2.0);
    p.drift_potential = F2::linear(0.0, Vec<2>(0.25, -0.5));
    p.manufactured = F2::sinusoid(1.0, Vec<2>(2.0, 1.0), 0.0, 0.0);
    Rng rng(7);
    for (int i = 0; i < 20; ++i) {
        const Vec<2> x = random_point<2>(rng, 0.8);
        const std::function<double(const Vec<2>&)> flux_x = [&](const Vec<2>& y) {
            return p.alpha.value(y) * p.manufactured->gradient(y)[0];
        };
        const std::function<double(const Vec<2>&)> flux_y = [&](const Vec<2>& y) {
            return p.alpha.value(y) * p.manufactured->gradient(y)[1];
        };
        const double div = fd_gradient<2>(flux_x, x, 1e-5)[0] + fd_gradient<2>(flux_y, x, 1e-5)[1];
        const double expected =
            -(div + p.omega(x).dot(p.manufactured->gradient(x)) - 2.0 * p.manufactured->value(x));
        EXPECT_NEAR(p.f(x), expected, 1e-6);
        EXPECT_EQ(p.g(x), p.manufactured->value(x));
    }
}

TEST(SigmaBar, SpreadOfSigmaPrime) {
    // sigma' = 5 + 5 sin(pi x / 2) with the extremes at x = +-1 supplied as extra probes.
    auto scene = Scene<2>::from_sdf(sdf::sphere<2>(Vec<2>::Zero(), 2.0), 1e-3);
    Problem<2> p;
    p.sigma = F2::sinusoid(5.0, Vec<2>(std::numbers::pi / 2, 0), 0.0, 5.0);
    const auto tp = transform(p);
    const auto b = sigma_bar_default(tp, scene, 1024, {Vec<2>(1, 0), Vec<2>(-1, 0)});
    EXPECT_DOUBLE_EQ(b.min, 0.0);
    EXPECT_DOUBLE_EQ(b.max, 10.0);
    EXPECT_DOUBLE_EQ(b.sigma_bar, 10.0);
}

TEST(SigmaBar, ConstantAndLaplaceFallbacks) {
    const auto disk = unit_disk();
    Problem<2> p;
    p.sigma = F2::constant(3.0);
    EXPECT_DOUBLE_EQ(sigma_bar_default(transform(p), disk, 256).sigma_bar, 3.0);
    Problem<2> laplace;
    const auto b = sigma_bar_default(transform(laplace), disk, 256);
    EXPECT_DOUBLE_EQ(b.sigma_bar, 1e-6 / (disk.scale() * disk.scale()));
    EXPECT_GT(b.sigma_bar, 0.0);
}

TEST(SigmaBar, RejectsNonPositiveAlpha) {
    Problem<2> p;
    p.alpha = F2::linear(0.0, Vec<2>(1.0, 0.0));
    EXPECT_THROW(sigma_bar_default(transform(p), unit_disk(), 256), DomainError);
    Problem<2> q;
    q.sigma = F2::constant(-1.0);
    EXPECT_THROW(sigma_bar_default(transform(q), unit_disk(), 256), DomainError);
}

TEST(SigmaBar, DominatesShiftedSigmaPrime) {
    Problem<2> p;
    p.alpha = F2::sinusoid(0.5, Vec<2>(6, 3), 0.0, 1.0);
    p.sigma = F2::gaussian_bump(Vec<2>(0.2, 0.0), 20.0, 0.3, 0.0);
    const auto tp = prepare(p, unit_disk());
    const auto probes = stratified_probes(unit_disk(), 4096);
    for (const auto& x : probes) {
        const double sp = tp.sigma_prime(x);
        EXPECT_GE(tp.sigma_bar() + 1e-9, sp - tp.bounds().min);
        EXPECT_GE(tp.kernel_sigma() + 1e-9, sp);
    }
}

TEST(ShiftedSigma, KernelConstantDominatesSigmaPrime) {
    SigmaBounds pos{3.0, 2.0, 5.0, false};
    EXPECT_DOUBLE_EQ(shifted_sigma_for_kernels(pos), 5.0);
    SigmaBounds mixed{2.0, -1.0, 1.0, false};
    EXPECT_DOUBLE_EQ(shifted_sigma_for_kernels(mixed), 2.0);
    SigmaBounds flat{3.0, 3.0, 3.0, false};
    EXPECT_DOUBLE_EQ(shifted_sigma_for_kernels(flat), 3.0);
    SigmaBounds forced{7.0, 2.0, 5.0, true};
    EXPECT_DOUBLE_EQ(shifted_sigma_for_kernels(forced), 7.0);

    // Null weights land in [0, 1] whenever sigma' >= 0.
    Problem<2> p;
    p.sigma = F2::constant(3.0);
    auto tp = transform(p);
    tp.set_bounds(flat);
    EXPECT_DOUBLE_EQ(tp.null_weight(3.0), 0.0);
    tp.set_bounds(pos);
    for (double sp : {2.0, 3.5, 5.0}) {
        EXPECT_GE(tp.null_weight(sp), 0.0);
        EXPECT_LE(tp.null_weight(sp), 1.0);
    }
}

TEST(DriftPotential, LinearPotentialGivesConstantDrift) {
    Problem<2> p;
    const Vec<2> b(0.6, -1.4);
    p.drift_potential = F2::linear(0.0, 0.5 * b);
    p.declared_drift = std::array<F2, 2>{F2::constant(b[0]), F2::constant(b[1])};
    const auto probes = stratified_probes(unit_disk(), 200);
    const auto report = validate_drift_potential(p, probes);
    EXPECT_TRUE(report.against_declared);
    EXPECT_LT(report.max_deviation, 1e-14);
    EXPECT_NEAR((p.omega(Vec<2>(0.3, 0.1)) - b).norm(), 0.0, 1e-15);
}

TEST(DriftPotential, ZeroPotential) {
    Problem<2> p;
    p.drift_potential = F2::constant(0.0);
    EXPECT_FALSE(p.has_drift());
    EXPECT_EQ(p.omega(Vec<2>(0.5, 0.5)), Vec<2>::Zero());
    EXPECT_EQ(validate_drift_potential(p, stratified_probes(unit_disk(), 64)).max_deviation, 0.0);
}

TEST(DriftPotential, SinusoidMatchesFiniteDifferences) {
    Problem<2> p;
    p.alpha = F2::gaussian_bump(Vec<2>::Zero(), 1.0, 0.5, 1.0);
    p.drift_potential = F2::sinusoid(0.3, Vec<2>(2.0, -3.0), 0.5, 0.0);
    const auto report = validate_drift_potential(p, stratified_probes(unit_disk(), 200));
    EXPECT_FALSE(report.against_declared);
    EXPECT_LT(report.max_deviation, 1e-6);
}

TEST(DriftPotential, MismatchedDeclarationThrows) {
    Problem<2> p;
    p.drift_potential = F2::linear(0.0, Vec<2>(0.5, 0.0));
    p.declared_drift = std::array<F2, 2>{F2::constant(1.0), F2::constant(0.1)};
    EXPECT_THROW(validate_drift_potential(p, stratified_probes(unit_disk(), 16)), ConfigError);
}

TEST(Conformal, UnitScaleIsIdentity) {
    Problem<2> p;
    p.alpha = F2::constant(1.0);
    p.conformal_scale = F2::constant(1.0);
    const auto q = conformal_adapter(p);
    EXPECT_FALSE(q.conformal_scale.has_value());
    EXPECT_DOUBLE_EQ(q.alpha.value(Vec<2>(0.3, 0.4)), 1.0);
    EXPECT_EQ(q.alpha.gradient(Vec<2>(0.3, 0.4)), Vec<2>::Zero());
}

TEST(Conformal, ConstantScaleKeepsHarmonicSolution) {
    Problem<2> p;
    p.dirichlet = F2::linear(0.0, Vec<2>(1, 0));
    p.conformal_scale = F2::constant(2.0);
    const auto tp = transform(p);
    const Vec<2> x(0.3, -0.2);
    EXPECT_DOUBLE_EQ(tp.problem().alpha.value(x), 4.0);
    EXPECT_DOUBLE_EQ(tp.sigma_prime(x), 0.0);
    EXPECT_DOUBLE_EQ(tp.f_prime(x), 0.0);
    // U = 2u on the boundary and in the interior, so u = U / 2 is unchanged.
    EXPECT_DOUBLE_EQ(tp.g_prime(x) * std::exp(-tp.gamma(x)), p.dirichlet.value(x));
}

TEST(Conformal, ExponentialScale) {
    Problem<2> p;
    p.conformal_scale = F2::exponential(Vec<2>(1.0, 0.0));
    const auto tp = transform(p);
    Rng rng(8);
    for (int i = 0; i < 20; ++i) {
        const Vec<2> x = random_point<2>(rng, 1.0);
        EXPECT_NEAR(tp.problem().alpha.value(x), std::exp(2.0 * x[0]), 1e-12 * std::exp(2.0 * x[0]));
        EXPECT_NEAR(tp.sigma_prime(x), 1.0, 1e-12);
    }
}

TEST(Conformal, RejectsNonPositiveScale) {
    Problem<2> p;
    p.conformal_scale = F2::linear(0.0, Vec<2>(1.0, 0.0));
    EXPECT_THROW(conformal_adapter(p, stratified_probes(unit_disk(), 64)), DomainError);
}

TEST(Probes, StratifiedInsideDomain) {
    const auto disk = unit_disk();
    const auto probes = stratified_probes(disk, 4096);
    EXPECT_GT(probes.size(), 2500u);
    for (const auto& x : probes) {
        ASSERT_TRUE(disk.inside(x));
    }
    EXPECT_EQ(probes, stratified_probes(disk, 4096));
}
