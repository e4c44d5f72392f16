#include "doctest.h"

#include <cmath>
#include <random>

#include "mfilm/model.hpp"

using namespace mfilm;

namespace {

const FluidParams kP{12.0, 0.1865184573, 8.5};

LatticeField random_field(const LatticeSpec& spec, int radius, double scale, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-scale, scale);
    LatticeField f(spec);
    for (const Index& n : f.h.indices()) {
        if (lattice_distance(spec, n) > radius) continue;
        const Index m{-n[0], -n[1]};
        if (n < m) continue;
        const CVec2 v(cplx(u(rng), u(rng)), cplx(u(rng), u(rng)));
        if (n == m) {
            f.set(n, CVec2(v(0).real(), v(1).real()));
        } else {
            f.set(n, v);
            f.set(m, v.conjugate());
        }
    }
    return f;
}

}  // namespace

TEST_CASE("conduction state is steady") {
    const LatticeSpec spec{LatticeKind::Square, 1.28, 6};
    CHECK(rhs_full(LatticeField(spec), kP).max_abs() == 0.0);
}

TEST_CASE("linear part reproduces the symbol") {
    for (LatticeKind kind : {LatticeKind::Square, LatticeKind::Hexagonal}) {
        const LatticeSpec spec{kind, 1.1, 6};
        const TaylorForms tf(kP);
        for (Index n : {Index{1, 0}, Index{1, 1}, Index{-2, 1}}) {
            const CVec2 v(cplx(0.3, -0.1), cplx(-0.7, 0.2));
            const auto L = tf.part(1, single_mode(spec, n, v));
            const CVec2 expect = symbol(wavevector(spec, n).norm(), kP) * v;
            CHECK((L.get(n) - expect).norm() < 1e-10 * std::max(1.0, expect.norm()));
            CHECK(L.max_abs() == doctest::Approx(expect.cwiseAbs().maxCoeff()));
        }
    }
}

TEST_CASE("h equation is in divergence form") {
    const LatticeSpec spec{LatticeKind::Hexagonal, 1.2, 6};
    for (unsigned s = 1; s <= 5; ++s) {
        const auto U = random_field(spec, 2, 0.2, s);
        CHECK(rhs_full(U, kP).h.get({0, 0}) == cplx(0.0, 0.0));
        const TaylorForms tf(kP);
        const auto V = random_field(spec, 2, 0.2, s + 10);
        CHECK(std::abs(tf.N2(U, V).h.get({0, 0})) < 1e-15);
        CHECK(std::abs(tf.N3(U, V, U).h.get({0, 0})) < 1e-15);
    }
}

TEST_CASE("Taylor forms are symmetric and match finite differences") {
    const LatticeSpec spec{LatticeKind::Square, 1.3, 8};
    const TaylorForms tf(kP);
    const auto U = random_field(spec, 1, 0.5, 21);
    const auto V = random_field(spec, 1, 0.5, 22);
    const auto W = random_field(spec, 1, 0.5, 23);
    CHECK((tf.N2(U, V) - tf.N2(V, U)).max_abs() < 1e-10);
    CHECK((tf.N3(U, V, W) - tf.N3(W, U, V)).max_abs() < 1e-10);
    CHECK((tf.N3(U, V, W) - tf.N3(V, W, U)).max_abs() < 1e-10);

    // second difference of F at 0 along U equals 2 N2(U,U)
    const double h = 1e-4;
    const auto fd = cplx(1.0 / (h * h)) * (rhs_full(cplx(h) * U, kP) + rhs_full(cplx(-h) * U, kP));
    const auto n2 = cplx(2.0) * tf.N2(U, U);
    CHECK((fd - n2).max_abs() < 1e-5 * n2.max_abs());

    // N3(U,U,U) is the cubic coefficient of t -> F(tU); least-squares fit on 9 nodes
    const int m = 9;
    Eigen::MatrixXd A(m, 6);
    std::vector<LatticeField> vals;
    for (int i = 0; i < m; ++i) {
        const double t = -1.0 + 2.0 * i / (m - 1);
        for (int d = 0; d < 6; ++d) A(i, d) = std::pow(t, d);
        vals.push_back(rhs_full(cplx(t) * U, kP));
    }
    const Eigen::MatrixXd pinv = A.completeOrthogonalDecomposition().pseudoInverse();
    LatticeField cubic(spec);
    for (int i = 0; i < m; ++i) cubic += cplx(pinv(3, i)) * vals[i];
    const auto n3 = tf.N3(U, U, U);
    CHECK((cubic - n3).max_abs() < 1e-9 * std::max(1.0, n3.max_abs()));
}

TEST_CASE("F(tU) is a polynomial of degree five") {
    const LatticeSpec spec{LatticeKind::Hexagonal, 1.2, 10};
    const auto U = random_field(spec, 1, 0.4, 31);
    const int m = 11;
    Eigen::MatrixXd A(m, 7);
    std::vector<LatticeField> vals;
    for (int i = 0; i < m; ++i) {
        const double t = std::cos(M_PI * (i + 0.5) / m);
        for (int d = 0; d < 7; ++d) A(i, d) = std::pow(t, d);
        vals.push_back(rhs_full(cplx(t) * U, kP));
    }
    const Eigen::MatrixXd pinv = A.completeOrthogonalDecomposition().pseudoInverse();
    LatticeField c5(spec), c6(spec);
    for (int i = 0; i < m; ++i) {
        c5 += cplx(pinv(5, i)) * vals[i];
        c6 += cplx(pinv(6, i)) * vals[i];
    }
    CHECK(c5.max_abs() > 1e-6);
    CHECK(c6.max_abs() < 1e-10 * c5.max_abs());

    // homogeneous parts sum back to F(U)
    const TaylorForms tf(kP);
    const auto parts = tf.homogeneous_parts(U);
    LatticeField sum(spec);
    for (const auto& p : parts) sum += p;
    CHECK((sum - rhs_full(U, kP)).max_abs() < 1e-12);
    CHECK(parts[0].max_abs() < 1e-13);
}

TEST_CASE("reflection commutes with the right-hand side") {
    const LatticeSpec spec{LatticeKind::Square, 1.0, 8};
    const auto U = random_field(spec, 2, 0.2, 41);
    const auto a = rhs_full(U.reflected(), kP);
    const auto b = rhs_full(U, kP).reflected();
    CHECK((a - b).max_abs() < 1e-13);
    CHECK(rhs_full(U, kP).hermitian_defect() < 1e-13);
}

TEST_CASE("truncation overflow is reported") {
    const LatticeSpec tight{LatticeKind::Square, 1.0, 2};
    const auto U = random_field(tight, 2, 0.3, 51);
    double overflow = 0.0;
    rhs_full(U, kP, &overflow);
    CHECK(overflow > 1e-12);
    const LatticeSpec roomy{LatticeKind::Square, 1.0, 12};
    LatticeField V(roomy);
    V.set({1, 0}, CVec2(0.1, 0.05));
    V.set({-1, 0}, CVec2(0.1, 0.05));
    double ov2 = 1.0;
    rhs_full(V, kP, &ov2);
    CHECK(ov2 < 1e-12);
}
