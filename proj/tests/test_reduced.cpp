#include "doctest.h"

#include <cmath>
#include <random>

#include "mfilm/errors.hpp"
#include "mfilm/reduced.hpp"

using namespace mfilm;

namespace {

Vec2 grad_fd(const Vec2& A, const ReducedParams& rp) {
    const double h = 1e-6;
    Vec2 g;
    for (int i = 0; i < 2; ++i) {
        Vec2 p = A, m = A;
        p(i) += h;
        m(i) -= h;
        g(i) = (lyapunov(p, rp) - lyapunov(m, rp)) / (2 * h);
    }
    return g;
}

ReducedParams hex_params(double m, double c = 1.0) {
    ReducedParams rp;
    rp.kind = LatticeKind::Hexagonal;
    rp.c = c;
    rp.M0 = m;
    rp.kappa = 1.0;
    rp.K0 = -2.6;
    rp.K2 = -6.5;
    rp.N0 = 1.0;
    return rp;
}

const FixedPointInfo& get(const std::vector<FixedPointInfo>& fps, FixedPointLabel l) {
    for (const auto& f : fps)
        if (f.label == l) return f;
    FAIL("missing fixed point " << to_string(l));
    return fps.front();
}

}  // namespace

TEST_CASE("square right-hand side") {
    ReducedParams rp;
    rp.M0 = 1.0;
    rp.kappa = 1.0;
    rp.K0 = -1.0;
    rp.K1 = -3.0;
    CHECK(square_rhs(Vec2(0, 0), rp).norm() == 0.0);
    CHECK(square_rhs(Vec2(1, 0), rp).norm() < 1e-15);
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    rp.c = 1.7;
    for (int i = 0; i < 50; ++i) {
        const Vec2 A(u(rng), u(rng));
        CHECK((square_rhs(A, rp) + grad_fd(A, rp)).norm() < 1e-6);
        // invariant sets
        CHECK(square_rhs(Vec2(A(0), 0), rp)(1) == 0.0);
        const Vec2 d = square_rhs(Vec2(A(0), A(0)), rp);
        CHECK(d(0) == doctest::Approx(d(1)).epsilon(1e-14));
    }
    CHECK(lyapunov(Vec2(0, 0), rp) == 0.0);
}

TEST_CASE("hexagonal right-hand side") {
    const ReducedParams rp = hex_params(0.3, 1.4);
    CHECK(hex_rhs(Vec2(0, 0), rp).norm() == 0.0);
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const Vec2 A(u(rng), u(rng));
        const Vec2 f = hex_rhs(A, rp);
        const Vec2 gE = grad_fd(A, rp);
        CHECK(gE.dot(f) == doctest::Approx(-f(0) * f(0) - 2 * f(1) * f(1)).epsilon(1e-8));
        const Vec2 fr = hex_rhs(Vec2(A(0), -A(1)), rp);
        CHECK(fr(0) == doctest::Approx(f(0)).epsilon(1e-14));
        CHECK(fr(1) == doctest::Approx(-f(1)).epsilon(1e-14));
    }
}

TEST_CASE("negative N0 is mapped by the sign symmetry") {
    ReducedParams rp = hex_params(0.3);
    rp.N0 = -1.0;
    const auto n = normalised_sign(rp);
    CHECK(n.N0 == 1.0);
    const Vec2 A(0.3, -0.2);
    CHECK((hex_rhs(-A, n) + hex_rhs(A, rp)).norm() < 1e-15);
}

TEST_CASE("fixed points satisfy the equations and match closed forms") {
    for (char r : {'a', 'b', 'c', 'd'}) {
        for (const ReducedParams& rp : {square_regime(r, 1.3), hex_regime(r, -2.6, -6.5, 1.0, 0.23, 0.8)}) {
            for (const auto& fp : fixed_points(rp)) {
                CHECK(fp.residual < 1e-10);
                int pos = (fp.eigenvalues(0) > 0) + (fp.eigenvalues(1) > 0);
                const Stability s = pos == 0 ? Stability::Stable : (pos == 2 ? Stability::Unstable : Stability::Saddle);
                CHECK(fp.stability == s);
                if (fp.closed_form) CHECK((*fp.closed_form - fp.eigenvalues).norm() < 1e-6);
            }
        }
    }
}

TEST_CASE("square stability examples") {
    // M0 > 0 and K1 - K0 > 0: R is a saddle
    ReducedParams rp;
    rp.M0 = 1.0;
    rp.kappa = 1.0;
    rp.K0 = -1.0;
    rp.K1 = 0.5;
    CHECK(get(fixed_points(rp), FixedPointLabel::R).stability == Stability::Saddle);
    // M0 < 0 and K1 - K0 < 0: S is stable
    rp.M0 = -1.0;
    rp.K0 = 1.0;
    rp.K1 = 0.5;
    CHECK(get(fixed_points(rp), FixedPointLabel::S).stability == Stability::Stable);
}

TEST_CASE("hexagonal thresholds for R and H1+") {
    const ReducedParams base = hex_params(1.0);
    const double tR = hex_threshold_R(base);
    CHECK(tR == doctest::Approx(-base.K0 * base.N0 * base.N0 / std::pow(base.K0 - base.K2, 2)).epsilon(1e-14));
    const double tD = hex_threshold_diag(base);
    CHECK(tD == doctest::Approx(-base.N0 * base.N0 * (2 * base.K0 + base.K2) / std::pow(base.K0 - base.K2, 2))
                    .epsilon(1e-14));
    auto l2 = [&](double m, FixedPointLabel l, const Vec2& dir) {
        const auto fp = get(fixed_points(hex_params(m)), l);
        return dir.dot(numerical_jacobian(fp.position, hex_params(m)) * dir) / dir.squaredNorm();
    };
    CHECK(l2(0.9 * tR, FixedPointLabel::R, Vec2(0, 1)) * l2(1.1 * tR, FixedPointLabel::R, Vec2(0, 1)) < 0);
    CHECK(l2(0.9 * tD, FixedPointLabel::H1p, Vec2(-2, 1)) * l2(1.1 * tD, FixedPointLabel::H1p, Vec2(-2, 1)) < 0);
}

TEST_CASE("mixed modes exist between the thresholds") {
    const ReducedParams base = hex_params(1.0);
    const double tR = hex_threshold_R(base), tD = hex_threshold_diag(base);
    const auto fps = fixed_points(hex_params(0.5 * (tR + tD)));
    bool mm = false;
    for (const auto& f : fps) mm = mm || f.label == FixedPointLabel::MMp;
    CHECK(mm);
    for (const auto& f : fixed_points(hex_params(0.5 * tR))) CHECK(f.label != FixedPointLabel::MMp);
}

TEST_CASE("heteroclinic S to R in the square regime with reversed cubic signs") {
    ReducedParams rp;
    rp.M0 = -1.0;
    rp.kappa = 1.0;
    rp.K0 = 1.0;
    rp.K1 = 3.0;
    rp.c = 1.0;
    const auto fps = fixed_points(rp);
    CHECK((get(fps, FixedPointLabel::S).position - Vec2(0.5, 0.5)).norm() < 1e-12);
    CHECK((get(fps, FixedPointLabel::R).position - Vec2(1, 0)).norm() < 1e-12);
    const auto orb = heteroclinic(rp, FixedPointLabel::S, FixedPointLabel::R);
    CHECK(orb.convergence_gap < 1e-6);
    CHECK(orb.lyapunov_decreasing());
    CHECK((orb.samples.front().A - Vec2(0.5, 0.5)).norm() < 1e-3);
    CHECK((orb.samples.back().A - Vec2(1, 0)).norm() < 1e-6);
    for (size_t i = 1; i < orb.samples.size(); ++i) CHECK(orb.samples[i].xi > orb.samples[i - 1].xi);
}

TEST_CASE("heteroclinic R to T stays on the invariant axis") {
    ReducedParams rp;
    rp.M0 = 1.0;
    rp.kappa = 1.0;
    rp.K0 = -1.0;
    rp.K1 = -3.0;
    const auto orb = heteroclinic(rp, FixedPointLabel::R, FixedPointLabel::T);
    CHECK(orb.convergence_gap < 1e-6);
    for (const auto& s : orb.samples) CHECK(s.A(1) == 0.0);
}

TEST_CASE("hexagonal regime c connections into the mixed mode") {
    const ReducedParams rp = hex_regime('c', -2.6, -6.5, 1.0, 0.23);
    for (FixedPointLabel src : {FixedPointLabel::R, FixedPointLabel::H1p}) {
        const auto orb = heteroclinic(rp, src, FixedPointLabel::MMp);
        CHECK(orb.convergence_gap < 1e-6);
        CHECK(orb.lyapunov_decreasing());
    }
}

TEST_CASE("missing connections and fixed points are reported") {
    ReducedParams rp;
    rp.M0 = 1.0;
    rp.kappa = 1.0;
    rp.K0 = -1.0;
    rp.K1 = -3.0;
    // T is a stable node for M0 > 0, so nothing leaves it
    HeteroclinicOptions opt;
    opt.xi_cap = 200;
    CHECK(get(fixed_points(rp), FixedPointLabel::T).stability == Stability::Stable);
    CHECK_THROWS_AS(heteroclinic(rp, FixedPointLabel::T, FixedPointLabel::R, opt), ConnectionNotFound);
    rp.K0 = 1.0;
    rp.K1 = 1.0;
    CHECK_THROWS_AS(heteroclinic(rp, FixedPointLabel::R, FixedPointLabel::T), UsageError);
}

TEST_CASE("phase portrait is a gradient-like bundle") {
    for (const ReducedParams& rp : {square_regime('b'), hex_regime('b', -2.6, -6.5, 1.0, 0.23)}) {
        const auto fps = fixed_points(rp);
        for (const auto& tr : phase_portrait(rp)) {
            for (size_t i = 1; i < tr.samples.size(); ++i) {
                const double e0 = lyapunov(tr.samples[i - 1].A, rp), e1 = lyapunov(tr.samples[i].A, rp);
                if (tr.direction > 0) CHECK(e1 <= e0 + 1e-12 * std::max(1.0, std::abs(e0)));
                else CHECK(e1 >= e0 - 1e-12 * std::max(1.0, std::abs(e0)));
            }
            if (tr.limit) {
                bool known = false;
                for (const auto& f : fps)
                    if (f.label == *tr.limit && (f.position - tr.samples.back().A).norm() < 1e-3) known = true;
                CHECK(known);
            }
        }
    }
}

TEST_CASE("square portrait with negative M0 stays in an inflowing ball") {
    const ReducedParams rp = square_regime('b');
    CHECK(rp.M0 < 0);
    PortraitSpec spec;
    spec.backward = false;
    for (const auto& tr : phase_portrait(rp, spec))
        for (const auto& s : tr.samples) CHECK(s.A.norm() < 1.5 * std::sqrt(2.0) + 1e-9);
}

TEST_CASE("spatial dispersion relation") {
    const FluidParams p{12.0, 0.1865184573, 0.0};
    const auto cp = critical_monotonic(p.g, p.beta);
    const FluidParams pc{p.g, p.beta, cp.M_star};
    CHECK(std::abs(spatial_dispersion(1.0, 0.0, Vec2(0, 0), pc)) < 1e-14);
    CHECK(std::abs(spatial_dispersion(1.0, 0.0, Vec2(cp.k_star, 0), pc)) < 1e-8);
    // polynomial coefficients evaluate to the determinant
    const cplx mu(0.3, -0.7);
    const Vec2 k(0.4, 1.1);
    const auto poly = spatial_dispersion_poly(1.3, k, pc);
    cplx v = 0;
    for (size_t i = poly.size(); i-- > 0;) v = v * mu + poly[i];
    CHECK(std::abs(v - spatial_dispersion(1.3, mu, k, pc)) < 1e-9 * std::abs(v));
    for (const cplx& r : spatial_dispersion_roots(1.3, k, pc))
        CHECK(std::abs(spatial_dispersion(1.3, r, k, pc)) < 1e-6 * std::max(1.0, std::pow(std::abs(r), 6)));
}

TEST_CASE("spectral gap") {
    const auto rep = spectral_gap_check(12.0, 0.1865184573, 1.0);
    CHECK(rep.delta > 0.1);
    CHECK(rep.ok());
    for (const auto& e : rep.entries) {
        CHECK(e.count == e.root_count);
        CHECK(e.count == (e.central ? 1 : 0));
    }
}
