#include "doctest.h"

#include <cmath>
#include <random>

#include "mfilm/errors.hpp"
#include "mfilm/linear.hpp"

using namespace mfilm;

namespace {
const double kG = 12.0;
const double kBeta = 0.1865184573;
}  // namespace

TEST_CASE("dispersion coefficients") {
    const auto z = dispersion_coeffs(0.0, FluidParams{3.0, 0.7, 5.0});
    CHECK(z.a0 == 0.0);
    CHECK(z.a1 == doctest::Approx(0.7));
    const auto c = dispersion_coeffs(1.2843299054, FluidParams{kG, kBeta, 8.5144749311});
    CHECK(std::abs(c.a0) < 1e-6);
    const auto h = dispersion_coeffs(1.0, FluidParams{12.0, 1.0, 0.0});
    CHECK(h.a1 == doctest::Approx(1.0 + 16.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("spectral roots") {
    const auto r0 = spectral_roots(0.0, FluidParams{kG, kBeta, 3.0});
    CHECK(std::abs(r0.lambda_plus) < 1e-15);
    CHECK(r0.lambda_minus.real() == doctest::Approx(-kBeta));
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (int i = 0; i < 50; ++i) {
        const FluidParams p{u(rng), u(rng), 4 * u(rng)};
        const double k = u(rng);
        const auto r = spectral_roots(k, p);
        const auto d = dispersion_coeffs(k, p);
        CHECK(std::abs(r.lambda_plus + r.lambda_minus + d.a1) < 1e-10 * std::max(1.0, std::abs(d.a1)));
        CHECK(std::abs(r.lambda_plus * r.lambda_minus - d.a0) < 1e-10 * std::max(1.0, std::abs(d.a0)));
        CHECK(r.lambda_plus.real() >= r.lambda_minus.real());
        if (r.lambda_plus.real() == r.lambda_minus.real()) CHECK(r.lambda_plus.imag() > 0);
    }
    // purely imaginary pair at the oscillatory critical point
    const auto co = critical_oscillatory(12.0, 40.0);
    const FluidParams po{12.0, 40.0, co.M_star};
    const auto ro = spectral_roots(co.k_star, po);
    const double a0 = dispersion_coeffs(co.k_star, po).a0;
    CHECK(std::abs(ro.lambda_plus.real()) < 1e-8);
    CHECK(ro.lambda_plus.imag() == doctest::Approx(std::sqrt(a0)).epsilon(1e-8));
    CHECK(ro.lambda_minus.imag() == doctest::Approx(-std::sqrt(a0)).epsilon(1e-8));
}

TEST_CASE("marginal curves") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0.2, 8.0);
    for (int i = 0; i < 30; ++i) {
        const double k = u(rng), g = u(rng), b = u(rng);
        CHECK(std::abs(dispersion_coeffs(k, FluidParams{g, b, M_monotonic(k, g, b)}).a0) < 1e-9);
        CHECK(std::abs(dispersion_coeffs(k, FluidParams{g, b, M_oscillatory(k, g, b)}).a1) < 1e-9);
    }
    CHECK(M_oscillatory(std::pow(120.0, 0.25), 12.0, 40.0) == doctest::Approx(36.9089023002).epsilon(1e-10));
    CHECK_THROWS_AS(M_monotonic(0.0, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(M_oscillatory(0.0, 1.0, 1.0), DomainError);
}

TEST_CASE("critical values") {
    const auto cm = critical_monotonic(kG, kBeta);
    CHECK(std::abs(cm.M_star - 8.5144749311) < 1e-8);
    CHECK(std::abs(cm.k_star - 1.2843299054) < 1e-8);
    CHECK(cm.regime == Regime::Monotonic);
    CHECK(std::abs(cm.k_closed - cm.k_numeric) < 1e-8);
    const auto co = critical_oscillatory(12.0, 40.0);
    CHECK(std::abs(co.k_star - 3.3097509196) < 1e-8);
    CHECK(std::abs(co.M_star - 36.9089023002) < 1e-8);
    CHECK(std::abs(co.M_numeric - co.M_closed) < 1e-10);
    CHECK_THROWS_AS(critical_monotonic(12.0, 72.0), DomainError);
}

TEST_CASE("critical point is a double root of a0") {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> ug(0.5, 30.0), ub(0.01, 5.0);
    for (int i = 0; i < 20; ++i) {
        const double g = ug(rng), b = ub(rng);
        const auto cm = critical_monotonic(g, b);
        const FluidParams p{g, b, cm.M_star};
        const double h = 1e-5;
        const double d = (dispersion_coeffs(cm.k_star + h, p).a0 - dispersion_coeffs(cm.k_star - h, p).a0) / (2 * h);
        CHECK(std::abs(dispersion_coeffs(cm.k_star, p).a0) < 1e-8);
        // relative to the size of a0 at the same wave number without Marangoni forcing
        const double scale = std::max(1.0, std::abs(dispersion_coeffs(cm.k_star, FluidParams{g, b, 0.0}).a0));
        CHECK(std::abs(d) < 1e-8 * scale);
        CHECK(cm.M_star < 48.0);
        CHECK(std::abs(cm.k_closed - cm.k_numeric) < 1e-8);
    }
}

TEST_CASE("regime classification") {
    CHECK(classify_regime(kG, kBeta) == Regime::Monotonic);
    CHECK(classify_regime(12.0, 40.0) == Regime::Oscillatory);
    // no monotonic minimiser; M_m stays above its limit 48 while M_o* is finite
    CHECK(classify_regime(12.0, 80.0) == Regime::Oscillatory);
    CHECK(critical_point(12.0, 40.0).regime == Regime::Oscillatory);
}

TEST_CASE("eigenpairs and adjoints") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.2, 6.0);
    for (int i = 0; i < 30; ++i) {
        const FluidParams p{u(rng), u(rng), 3 * u(rng)};
        const double k = u(rng);
        const Eigen::Matrix2cd L = symbol(k, p);
        for (Branch b : {Branch::Plus, Branch::Minus}) {
            const auto ep = eigpair(k, p, b);
            CHECK((L * ep.phi.v - ep.lambda * ep.phi.v).norm() < 1e-10 * std::max(1.0, L.norm()));
            CHECK(std::abs(ep.phi.v(0) - 1.0) < 1e-15);
            const auto adj = adjoint_eigvec(k, p, b);
            CHECK((L.adjoint() * adj.v - std::conj(ep.lambda) * adj.v).norm() < 1e-10 * std::max(1.0, L.norm()));
            CHECK(std::abs(adj.v.dot(ep.phi.v)) > 1e-12);
        }
        const auto pp = eigpair(k, p, Branch::Plus).phi.v;
        const auto pm = eigpair(k, p, Branch::Minus).phi.v;
        CHECK((spectral_projection(k, p, Branch::Plus, pp) - pp).norm() < 1e-10);
        CHECK(spectral_projection(k, p, Branch::Plus, pm).norm() < 1e-10);
    }
    const FluidParams p0{kG, kBeta, 8.5};
    const auto e0 = eigpair(0.0, p0, Branch::Plus);
    CHECK(std::abs(e0.lambda) < 1e-15);
    CHECK((symbol(0.0, p0) * e0.phi.v).norm() < 1e-14);
    const auto a0 = adjoint_eigvec(0.0, p0, Branch::Plus).v;
    CHECK(std::abs(a0(1)) < 1e-14 * std::abs(a0(0)));
    const auto th = eigpair(1.0, p0, Branch::Plus, Normalization::ThetaUnit);
    CHECK(std::abs(th.phi.v(1) - 1.0) < 1e-15);
    CHECK(th.phi.norm == Normalization::ThetaUnit);
}

TEST_CASE("kappa") {
    const double kap = kappa(kG, kBeta);
    CHECK(kap == doctest::Approx(0.347324).epsilon(1e-5));
    CHECK(kap == doctest::Approx(kappa_finite_difference(kG, kBeta)).epsilon(1e-6));
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) {
            const double g = 0.5 + 3.0 * i, b = 0.05 + 0.5 * j;
            if (classify_regime(g, b) == Regime::Monotonic) CHECK(kappa(g, b) > 0);
        }
    CHECK_THROWS_AS(kappa(12.0, 40.0), UsageError);
}

TEST_CASE("Turing instability shape at criticality") {
    const auto cm = critical_monotonic(kG, kBeta);
    const FluidParams p{kG, kBeta, cm.M_star};
    double mx = -1e300;
    for (int i = 1; i <= 4000; ++i) {
        const double k = 0.001 * i;
        mx = std::max(mx, spectral_roots(k, p).lambda_plus.real());
    }
    CHECK(mx < 1e-8);
    const double h = 1e-3;
    auto lp = [&](double k, double M) { return spectral_roots(k, FluidParams{kG, kBeta, M}).lambda_plus.real(); };
    CHECK(lp(cm.k_star + h, cm.M_star) + lp(cm.k_star - h, cm.M_star) - 2 * lp(cm.k_star, cm.M_star) < 0);
    CHECK(lp(2 * h, cm.M_star) + 0.0 - 2 * lp(h, cm.M_star) < 0);
    CHECK(lp(cm.k_star, cm.M_star + 1e-2) > 0);
    double below = -1e300;
    for (int i = 1; i <= 4000; ++i) below = std::max(below, lp(0.001 * i, cm.M_star - 1e-2));
    CHECK(below < 0);
    double im = 0;
    for (int i = 0; i <= 1000; ++i) im = std::max(im, std::abs(spectral_roots(0.1 * i, p).lambda_plus.imag()));
    CHECK(im < 10.0);
}

TEST_CASE("invalid parameters") {
    CHECK_THROWS_AS(validate(FluidParams{0.0, 1.0, 1.0}), DomainError);
    CHECK_THROWS_AS(validate(FluidParams{1.0, -1.0, 1.0}), DomainError);
    CHECK_THROWS_AS(validate(FluidParams{1.0, 1.0, -1.0}), DomainError);
}
