#include "mfilm/linear.hpp"

#include <cmath>
#include <limits>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "mfilm/errors.hpp"

namespace mfilm {

void validate(const FluidParams& p) {
    if (!(p.g > 0)) throw DomainError("g must be positive");
    if (!(p.beta > 0)) throw DomainError("beta must be positive");
    if (!(p.M >= 0)) throw DomainError("M must be nonnegative");
}

std::string to_string(Regime r) {
    switch (r) {
        case Regime::Monotonic: return "monotonic";
        case Regime::Oscillatory: return "oscillatory";
        default: return "degenerate";
    }
}

std::string to_string(Normalization n) { return n == Normalization::HUnit ? "h_unit" : "theta_unit"; }

DispersionCoeffs dispersion_coeffs(double k, const FluidParams& p) {
    const double k2 = k * k;
    const double k4 = k2 * k2;
    const double gk = p.g + k2;
    const double a1 = p.beta + k2 * (gk - p.M + 3.0) / 3.0;
    const double a0 = (48.0 * p.beta * k2 * gk + k4 * (48.0 * gk - p.M * (gk + 72.0))) / 144.0;
    return {a0, a1};
}

SpectralRoots spectral_roots(double k, const FluidParams& p) {
    const auto [a0, a1] = dispersion_coeffs(k, p);
    // lambda^2 + a1 lambda + a0 = 0
    const double disc = a1 * a1 - 4.0 * a0;
    if (disc >= 0) {
        const double sq = std::sqrt(disc);
        const double q = -0.5 * (a1 + std::copysign(sq, a1));
        double r1 = q;
        double r2 = q != 0.0 ? a0 / q : 0.0;
        if (r1 < r2) std::swap(r1, r2);
        return {cplx(r1, 0.0), cplx(r2, 0.0)};
    }
    const double im = 0.5 * std::sqrt(-disc);
    return {cplx(-0.5 * a1, im), cplx(-0.5 * a1, -im)};
}

Eigen::Matrix2cd symbol_of_laplacian(cplx s, const FluidParams& p) {
    const double g = p.g, M = p.M, b = p.beta;
    Eigen::Matrix2cd L;
    L(0, 0) = -s * s / 3.0 + (g / 3.0 - M / 2.0) * s;
    L(0, 1) = (M / 2.0) * s;
    L(1, 0) = -s * s / 8.0 + (g / 8.0 - M / 6.0) * s + b;
    L(1, 1) = (1.0 + M / 6.0) * s - b;
    return L;
}

Eigen::Matrix2cd symbol(double k, const FluidParams& p) { return symbol_of_laplacian(cplx(-k * k, 0.0), p); }

namespace {

template <class T>
T Mm_impl(T k, double g, double beta) {
    const T k2 = k * k;
    return 48.0 * (beta + k2) * (g + k2) / (k2 * (g + k2 + 72.0));
}

template <class T>
T Mo_impl(T k, double g, double beta) {
    const T k2 = k * k;
    return g + 3.0 * beta / k2 + k2 + 3.0;
}

// minimiser of f over k in (lo, hi): Brent on log k, then a root of f' by complex step
template <class F>
double argmin_1d(F f, double lo, double hi) {
    auto in_log = [&](double x) { return f(cplx(std::exp(x), 0.0)).real(); };
    const auto r = boost::math::tools::brent_find_minima(in_log, std::log(lo), std::log(hi),
                                                         std::numeric_limits<double>::digits / 2);
    const double kb = std::exp(r.first);
    auto deriv = [&](double k) {
        const double h = 1e-30 * std::max(1.0, k);
        return f(cplx(k, h)).imag() / h;
    };
    double a = kb * 0.999, b = kb * 1.001;
    double fa = deriv(a), fb = deriv(b);
    for (int i = 0; i < 60 && fa * fb > 0; ++i) {
        a *= 0.98;
        b *= 1.02;
        fa = deriv(a);
        fb = deriv(b);
    }
    if (fa * fb > 0) return kb;
    if (fa == 0) return a;
    if (fb == 0) return b;
    boost::uintmax_t iters = 200;
    const auto bracket = boost::math::tools::toms748_solve(deriv, a, b, fa, fb,
                                                           boost::math::tools::eps_tolerance<double>(50), iters);
    return 0.5 * (bracket.first + bracket.second);
}

}  // namespace

double M_monotonic(double k, double g, double beta) {
    if (!(k > 0)) throw DomainError("M_monotonic: k must be positive");
    return Mm_impl(k, g, beta);
}

double M_oscillatory(double k, double g, double beta) {
    if (!(k > 0)) throw DomainError("M_oscillatory: k must be positive");
    return Mo_impl(k, g, beta);
}

CriticalPoint critical_monotonic(double g, double beta) {
    validate({g, beta, 0.0});
    if (beta >= 72.0) throw DomainError("beta >= 72: M_m has no finite minimiser");
    const double k2 = (beta * g + 6.0 * std::sqrt(2.0) * std::sqrt(beta * g * (72.0 - beta + g))) / (72.0 - beta);
    CriticalPoint cp{};
    cp.regime = Regime::Monotonic;
    cp.k_closed = std::sqrt(k2);
    cp.M_closed = Mm_impl(cp.k_closed, g, beta);
    cp.k_numeric = argmin_1d([&](cplx k) { return Mm_impl(k, g, beta); }, 1e-4, 1e4);
    cp.M_numeric = Mm_impl(cp.k_numeric, g, beta);
    const bool agree = std::abs(cp.k_closed - cp.k_numeric) <= 1e-6 * std::max(1.0, cp.k_closed);
    cp.k_star = agree ? cp.k_closed : cp.k_numeric;
    cp.M_star = agree ? cp.M_closed : cp.M_numeric;
    return cp;
}

CriticalPoint critical_oscillatory(double g, double beta) {
    validate({g, beta, 0.0});
    CriticalPoint cp{};
    cp.regime = Regime::Oscillatory;
    cp.k_closed = std::pow(3.0 * beta, 0.25);
    cp.M_closed = Mo_impl(cp.k_closed, g, beta);
    cp.k_numeric = argmin_1d([&](cplx k) { return Mo_impl(k, g, beta); }, 1e-4, 1e4);
    cp.M_numeric = Mo_impl(cp.k_numeric, g, beta);
    const bool agree = std::abs(cp.k_closed - cp.k_numeric) <= 1e-6 * std::max(1.0, cp.k_closed);
    cp.k_star = agree ? cp.k_closed : cp.k_numeric;
    cp.M_star = cp.M_numeric;
    return cp;
}

Regime classify_regime(double g, double beta) {
    validate({g, beta, 0.0});
    // for beta >= 72 M_m decreases towards its infimum 48 without attaining it
    const double mm = beta < 72.0 ? critical_monotonic(g, beta).M_star : 48.0;
    const double mo = critical_oscillatory(g, beta).M_star;
    if (std::abs(mm - mo) < 1e-10) return Regime::Degenerate;
    return mm < mo ? Regime::Monotonic : Regime::Oscillatory;
}

CriticalPoint critical_point(double g, double beta) {
    switch (classify_regime(g, beta)) {
        case Regime::Monotonic: return critical_monotonic(g, beta);
        case Regime::Oscillatory: return critical_oscillatory(g, beta);
        default: throw UsageError("degenerate regime: M_m* == M_o*");
    }
}

namespace {

CVec2 null_vector(const Eigen::Matrix2cd& A) {
    // (a, b) . (b, -a) = 0 for the dominant row
    const double n0 = A.row(0).norm(), n1 = A.row(1).norm();
    const Eigen::RowVector2cd r = n0 >= n1 ? A.row(0) : A.row(1);
    if (r.norm() == 0.0) return CVec2(1.0, 0.0);
    return CVec2(r(1), -r(0));
}

ModeVector normalise(CVec2 v, Normalization want) {
    const double scale = v.norm();
    const double tiny = 1e-8 * scale;
    Normalization use = want;
    if (want == Normalization::HUnit && std::abs(v(0)) < tiny) use = Normalization::ThetaUnit;
    if (want == Normalization::ThetaUnit && std::abs(v(1)) < tiny) use = Normalization::HUnit;
    v /= use == Normalization::HUnit ? v(0) : v(1);
    if (use == Normalization::HUnit)
        v(0) = 1.0;
    else
        v(1) = 1.0;
    return {v, use};
}

cplx branch_root(double k, const FluidParams& p, Branch b) {
    const auto r = spectral_roots(k, p);
    const double gap = std::abs(r.lambda_plus - r.lambda_minus);
    if (gap < 1e-12 * std::max(1.0, std::abs(r.lambda_plus)))
        throw DegenerateEigenvalueError("eigenvalue collision at k = " + std::to_string(k));
    return b == Branch::Plus ? r.lambda_plus : r.lambda_minus;
}

}  // namespace

EigPair eigpair(double k, const FluidParams& p, Branch b, Normalization norm) {
    const cplx lam = branch_root(k, p, b);
    const Eigen::Matrix2cd A = symbol(k, p) - lam * Eigen::Matrix2cd::Identity();
    return {lam, normalise(null_vector(A), norm)};
}

ModeVector adjoint_eigvec(double k, const FluidParams& p, Branch b) {
    const cplx lam = branch_root(k, p, b);
    const Eigen::Matrix2cd A = symbol(k, p).adjoint() - std::conj(lam) * Eigen::Matrix2cd::Identity();
    return normalise(null_vector(A), Normalization::HUnit);
}

cplx project(const CVec2& psi, const CVec2& phi, const CVec2& v) {
    const cplx den = psi.dot(phi);  // Eigen's dot conjugates the first argument
    if (std::abs(den) < 1e-14) throw DegenerateEigenvalueError("adjoint orthogonal to eigenvector");
    return psi.dot(v) / den;
}

CVec2 spectral_projection(double k, const FluidParams& p, Branch b, const CVec2& v) {
    const auto ep = eigpair(k, p, b);
    const auto psi = adjoint_eigvec(k, p, b);
    return project(psi.v, ep.phi.v, v) * ep.phi.v;
}

double kappa(double g, double beta) {
    if (classify_regime(g, beta) != Regime::Monotonic) throw UsageError("kappa: parameters not in the monotonic regime");
    const auto cp = critical_monotonic(g, beta);
    const double k = cp.k_star, k2 = k * k;
    const double a1 = dispersion_coeffs(k, {g, beta, cp.M_star}).a1;
    return k2 * k2 * (g + k2 + 72.0) / (144.0 * a1);
}

double kappa_finite_difference(double g, double beta, double step) {
    const auto cp = critical_monotonic(g, beta);
    const double up = spectral_roots(cp.k_star, {g, beta, cp.M_star + step}).lambda_plus.real();
    const double dn = spectral_roots(cp.k_star, {g, beta, cp.M_star - step}).lambda_plus.real();
    return (up - dn) / (2.0 * step);
}

}  // namespace mfilm
