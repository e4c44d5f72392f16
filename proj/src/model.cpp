#include "mfilm/model.hpp"

#include <algorithm>
#include <cmath>

#include "mfilm/errors.hpp"

namespace mfilm {

namespace {

struct Products {
    double dropped = 0.0;
    double retained = 0.0;
    Series mul(const Series& a, const Series& b) {
        double d = 0.0;
        Series r = a.mul(b, &d);
        dropped = std::max(dropped, d);
        retained = std::max(retained, r.norm2());
        return r;
    }
};

Series div(const Series& x, const Series& y) { return x.dx() + y.dy(); }

}  // namespace

LatticeField rhs_full(const LatticeField& U, const FluidParams& p, double* overflow) {
    Products pr;
    const Series& u = U.h;
    const Series& v = U.theta;
    const Series h = u.plus_constant(1.0);
    const Series h2 = pr.mul(h, h);
    const Series h3 = pr.mul(h2, h);
    const Series h4 = pr.mul(h3, h);

    // pressure-like term and the temperature-height difference
    const Series P = u.laplacian() - p.g * u;
    const Series Px = P.dx(), Py = P.dy();
    const Series D = u - v;
    const Series Dx = D.dx(), Dy = D.dy();
    const Series ux = u.dx(), uy = u.dy();
    const Series vx = v.dx(), vy = v.dy();

    const Series jx = (1.0 / 3.0) * pr.mul(h3, Px) + (p.M / 2.0) * pr.mul(h2, Dx);
    const Series jy = (1.0 / 3.0) * pr.mul(h3, Py) + (p.M / 2.0) * pr.mul(h2, Dy);

    LatticeField F(U.spec);
    F.h = -1.0 * div(jx, jy);

    const Series qx = (1.0 / 8.0) * pr.mul(h4, Px) + (p.M / 6.0) * pr.mul(h3, Dx);
    const Series qy = (1.0 / 8.0) * pr.mul(h4, Py) + (p.M / 6.0) * pr.mul(h3, Dy);

    F.theta = div(pr.mul(h, vx), pr.mul(h, vy));
    F.theta -= 0.5 * (pr.mul(ux, ux) + pr.mul(uy, uy));
    F.theta += p.beta * D;
    F.theta -= pr.mul(jx, Dx) + pr.mul(jy, Dy);
    F.theta -= div(qx, qy);

    // the mean of a divergence is zero; drop roundoff
    F.h.set({0, 0}, 0.0);

    if (overflow) *overflow = pr.retained > 0 ? pr.dropped / pr.retained : 0.0;
    return F;
}

TaylorForms::TaylorForms(const FluidParams& p) : p_(p) {
    constexpr int n = kDegree + 1;
    Eigen::Matrix<double, n, n> V;
    for (int i = 0; i < n; ++i) {
        nodes_[i] = std::cos((2.0 * i + 1.0) * M_PI / (2.0 * n));
        for (int d = 0; d < n; ++d) V(i, d) = std::pow(nodes_[i], d);
    }
    inv_vandermonde_ = V.inverse();
}

std::array<LatticeField, TaylorForms::kDegree + 1> TaylorForms::homogeneous_parts(const LatticeField& U) const {
    constexpr int n = kDegree + 1;
    std::array<LatticeField, n> samples;
    for (int i = 0; i < n; ++i) samples[i] = rhs_full(cplx(nodes_[i]) * U, p_);
    std::array<LatticeField, n> parts;
    for (int d = 0; d < n; ++d) {
        parts[d] = LatticeField(U.spec);
        for (int i = 0; i < n; ++i) parts[d] += cplx(inv_vandermonde_(d, i)) * samples[i];
    }
    double scale = 0.0;
    for (const auto& s : samples) scale = std::max(scale, s.max_abs());
    if (parts[0].max_abs() > 1e-9 * std::max(1.0, scale))
        throw ExtractionError("Taylor extraction: nonzero constant part, F is not polynomial of degree 5");
    return parts;
}

LatticeField TaylorForms::part(int degree, const LatticeField& U) const {
    if (degree < 0 || degree > kDegree) throw UsageError("Taylor part degree out of range");
    return homogeneous_parts(U)[degree];
}

LatticeField TaylorForms::N2(const LatticeField& U, const LatticeField& V) const {
    LatticeField r = part(2, U + V);
    r -= part(2, U);
    r -= part(2, V);
    r *= 0.5;
    return r;
}

LatticeField TaylorForms::N3(const LatticeField& U, const LatticeField& V, const LatticeField& W) const {
    LatticeField r = part(3, U + V + W);
    r -= part(3, U + V);
    r -= part(3, U + W);
    r -= part(3, V + W);
    r += part(3, U);
    r += part(3, V);
    r += part(3, W);
    r *= 1.0 / 6.0;
    return r;
}

}  // namespace mfilm
