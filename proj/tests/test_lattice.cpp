#include "doctest.h"

#include <cmath>
#include <random>

#include "mfilm/errors.hpp"
#include "mfilm/lattice.hpp"

using namespace mfilm;

namespace {

// Hermitian random field supported on lattice distance <= radius
LatticeField random_field(const LatticeSpec& spec, int radius, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    LatticeField f(spec);
    for (const Index& n : f.h.indices()) {
        if (lattice_distance(spec, n) > radius) continue;
        const Index m{-n[0], -n[1]};
        if (n < m) continue;  // fill each conjugate pair once
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

// pointwise product on a grid in lattice coordinates, where gamma_n . x = 2 pi (n1 s1 + n2 s2)
LatticeField grid_product(const LatticeField& a, const LatticeField& b, int N) {
    const auto& idx = a.h.indices();
    std::vector<CVec2> prod(static_cast<size_t>(N) * N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            CVec2 va = CVec2::Zero(), vb = CVec2::Zero();
            for (const Index& n : idx) {
                const cplx e = std::polar(1.0, 2 * M_PI * (n[0] * i + n[1] * j) / N);
                va += a.get(n) * e;
                vb += b.get(n) * e;
            }
            prod[static_cast<size_t>(i) * N + j] = va.cwiseProduct(vb);
        }
    LatticeField out(a.spec);
    for (const Index& n : idx) {
        CVec2 c = CVec2::Zero();
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j)
                c += prod[static_cast<size_t>(i) * N + j] * std::polar(1.0, -2 * M_PI * (n[0] * i + n[1] * j) / N);
        out.set(n, c / double(N * N));
    }
    return out;
}

}  // namespace

TEST_CASE("wave vectors") {
    const LatticeSpec sq{LatticeKind::Square, 1.0, 4};
    CHECK(wavevector(sq, {1, 0}).isApprox(Vec2(1, 0)));
    const LatticeSpec hx{LatticeKind::Hexagonal, 1.0, 4};
    const Vec2 k3 = wavevector(hx, {-1, -1});
    CHECK(k3(0) == doctest::Approx(-0.5));
    CHECK(k3(1) == doctest::Approx(-std::sqrt(3.0) / 2));
    CHECK(k3.norm() == doctest::Approx(1.0).epsilon(1e-15));
    const LatticeSpec crit{LatticeKind::Square, 1.2843299054, 4};
    CHECK(wavevector(crit, {0, 1})(1) == doctest::Approx(1.2843299054).epsilon(1e-15));
    CHECK_THROWS_AS(wavevector(sq, {5, 0}), RangeError);
}

TEST_CASE("lattice distance") {
    const LatticeSpec sq{LatticeKind::Square, 1.0, 4};
    const LatticeSpec hx{LatticeKind::Hexagonal, 1.0, 4};
    CHECK(lattice_distance(sq, {1, 1}) == 2);
    CHECK(lattice_distance(sq, {0, 0}) == 0);
    CHECK(lattice_distance(hx, {-1, -1}) == 1);
    CHECK(lattice_distance(hx, {1, -1}) == 2);
    for (int j = 1; j <= 3; ++j) {
        CHECK(lattice_distance(hx, generator(hx, j)) == 1);
        CHECK(lattice_distance(hx, generator(hx, -j)) == 1);
    }
}

TEST_CASE("hexagonal circle of radius k* holds exactly the six generators") {
    const LatticeSpec hx{LatticeKind::Hexagonal, 1.3, 2};
    int on_circle = 0;
    for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b) {
            const double r = wavevector(hx, {a, b}).norm();
            if (std::abs(r - 1.3) < 1e-12) ++on_circle;
            else if (a != 0 || b != 0) CHECK(r > 1.3 + 1e-6);
        }
    CHECK(on_circle == 6);
}

TEST_CASE("rotation maps generators cyclically") {
    const LatticeSpec hx{LatticeKind::Hexagonal, 1.0, 4};
    CHECK(rotate_index(LatticeKind::Hexagonal, generator(hx, 1)) == generator(hx, 2));
    CHECK(rotate_index(LatticeKind::Hexagonal, generator(hx, 2)) == generator(hx, 3));
    CHECK(rotate_index(LatticeKind::Hexagonal, {2, 1}, 3) == Index{2, 1});
    const LatticeSpec sq{LatticeKind::Square, 1.0, 4};
    CHECK(rotate_index(LatticeKind::Square, generator(sq, 1)) == generator(sq, 2));
    CHECK(rotate_index(LatticeKind::Square, {1, 2}, 4) == Index{1, 2});
    // rotation is an isometry of the wave vectors
    for (Index n : {Index{1, 2}, Index{-2, 1}, Index{3, 0}}) {
        CHECK(wavevector(hx, rotate_index(LatticeKind::Hexagonal, n)).norm() ==
              doctest::Approx(wavevector(hx, n).norm()));
        CHECK(wavevector(sq, rotate_index(LatticeKind::Square, n)).norm() ==
              doctest::Approx(wavevector(sq, n).norm()));
    }
}

TEST_CASE("product of opposite modes is constant") {
    const LatticeSpec sq{LatticeKind::Square, 1.0, 4};
    const auto a = single_mode(sq, {1, 0}, CVec2(1, 0));
    const auto b = single_mode(sq, {-1, 0}, CVec2(1, 0));
    const auto p = field_product(a, b);
    CHECK(p.h.get({0, 0}) == cplx(1.0, 0.0));
    double other = 0;
    for (const Index& n : p.h.indices())
        if (n != Index{0, 0}) other = std::max(other, std::abs(p.h.get(n)));
    CHECK(other == 0.0);
}

TEST_CASE("product of cosines") {
    const LatticeSpec sq{LatticeKind::Square, 1.0, 4};
    LatticeField c(sq);
    c.set({1, 0}, CVec2(0.5, 0));
    c.set({-1, 0}, CVec2(0.5, 0));
    const auto p = field_product(c, c);
    CHECK(p.h.get({0, 0}).real() == doctest::Approx(0.5));
    CHECK(p.h.get({2, 0}).real() == doctest::Approx(0.25));
    CHECK(p.h.get({-2, 0}).real() == doctest::Approx(0.25));
    CHECK(p.theta.is_zero());
}

TEST_CASE("product agrees with the dense grid") {
    for (LatticeKind kind : {LatticeKind::Square, LatticeKind::Hexagonal}) {
        const LatticeSpec spec{kind, 1.1, 6};
        const auto a = random_field(spec, 3, 1);
        const auto b = random_field(spec, 3, 2);
        const auto p = field_product(a, b);
        const auto q = grid_product(a, b, 16);
        CHECK((p - q).max_abs() < 1e-12);
        CHECK(p.hermitian_defect() < 1e-14);
    }
}

TEST_CASE("product is commutative, bilinear and kills zero") {
    const LatticeSpec spec{LatticeKind::Hexagonal, 1.0, 5};
    const auto a = random_field(spec, 3, 3);
    const auto b = random_field(spec, 3, 4);
    const auto c = random_field(spec, 3, 5);
    CHECK((field_product(a, b) - field_product(b, a)).max_abs() < 1e-14);
    const auto lhs = field_product(a, b + cplx(2.0) * c);
    const auto rhs = field_product(a, b) + cplx(2.0) * field_product(a, c);
    CHECK((lhs - rhs).max_abs() < 1e-13);
    CHECK(field_product(a, LatticeField(spec)).max_abs() == 0.0);
}

TEST_CASE("derivatives keep Hermitian symmetry") {
    const LatticeSpec spec{LatticeKind::Square, 1.3, 5};
    const auto a = random_field(spec, 4, 6);
    CHECK(a.h.dx().hermitian_defect() < 1e-15);
    CHECK(a.h.dy().hermitian_defect() < 1e-15);
    CHECK(a.h.laplacian().hermitian_defect() < 1e-15);
    // laplacian symbol is -|gamma|^2
    const Index n{2, -1};
    const double k2 = wavevector(spec, n).squaredNorm();
    CHECK(std::abs(a.h.laplacian().get(n) + k2 * a.h.get(n)) < 1e-14);
    CHECK(std::abs(a.h.dx().get(n) - cplx(0, wavevector(spec, n)(0)) * a.h.get(n)) < 1e-15);
}

TEST_CASE("mismatched specs are rejected") {
    const LatticeField a(LatticeSpec{LatticeKind::Square, 1.0, 4});
    const LatticeField b(LatticeSpec{LatticeKind::Square, 1.0, 5});
    CHECK_THROWS_AS(field_product(a, b), UsageError);
    CHECK_THROWS_AS(lattice_kind_from_string("triangle"), UsageError);
}

TEST_CASE("json round trip") {
    const LatticeSpec spec{LatticeKind::Hexagonal, 1.25, 3};
    const auto a = random_field(spec, 2, 9);
    const auto j = to_json(a);
    CHECK(j.at("kind") == "hexagonal");
    CHECK(j.at("truncation") == 3);
    CHECK(j.at("coeffs").is_array());
    const auto b = lattice_field_from_json(nlohmann::json::parse(j.dump()));
    CHECK(b.spec == spec);
    CHECK((a - b).max_abs() == 0.0);
}
