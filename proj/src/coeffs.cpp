#include "mfilm/coeffs.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "mfilm/errors.hpp"
#include "mfilm/simulator.hpp"

namespace mfilm {

double AmplitudeCoefficients::scale() const {
    return std::max({std::abs(K0), std::abs(K1), std::abs(K2), std::abs(N), std::abs(kappa)});
}

namespace {

// Everything needed to evaluate the projected forms at criticality.
struct Setup {
    LatticeSpec spec;
    FluidParams p;
    CriticalPoint cp;
    TaylorForms tf;
    int rotation;
    ModeVector phi;  // phi_+(k*)
    CVec2 psi;       // adjoint of phi_+(k*)
    CVec2 phim_k, psim_k;  // phi_-(k*) and its adjoint
    cplx lam_m_k;
    CVec2 phip0, psip0, phim0, psim0;
    cplx lam_m0;

    Setup(LatticeKind kind, double g, double beta, const CoeffOptions& opt)
        : cp(critical_monotonic(g, beta)), tf(FluidParams{g, beta, 0.0}), rotation(opt.rotation) {
        if (classify_regime(g, beta) != Regime::Monotonic)
            throw UsageError("coefficients need (g, beta) in the monotonic regime");
        p = {g, beta, cp.M_star};
        tf = TaylorForms(p);
        spec = {kind, cp.k_star, opt.truncation};
        const auto plus = eigpair(cp.k_star, p, Branch::Plus, opt.norm);
        phi = plus.phi;
        psi = adjoint_eigvec(cp.k_star, p, Branch::Plus).v;
        const auto minus = eigpair(cp.k_star, p, Branch::Minus);
        phim_k = minus.phi.v;
        psim_k = adjoint_eigvec(cp.k_star, p, Branch::Minus).v;
        lam_m_k = minus.lambda;
        phip0 = eigpair(0.0, p, Branch::Plus).phi.v;
        psip0 = adjoint_eigvec(0.0, p, Branch::Plus).v;
        const auto m0 = eigpair(0.0, p, Branch::Minus);
        phim0 = m0.phi.v;
        psim0 = adjoint_eigvec(0.0, p, Branch::Minus).v;
        lam_m0 = m0.lambda;
        if (std::abs(lam_m0 + beta) > 1e-12 * std::max(1.0, beta))
            throw ExtractionError("lambda_-(0) differs from -beta");
    }

    Index at(Index n) const { return rotate_index(spec.kind, n, rotation); }
    LatticeField mode(Index n, const CVec2& v) const { return single_mode(spec, at(n), v); }
    CVec2 value(const LatticeField& f, Index n) const { return f.get(at(n)); }
    // P_+(k*) coefficient along phi_+ of the component of f at index n
    cplx plus(const LatticeField& f, Index n) const { return project(psi, phi.v, value(f, n)); }
    double radius(Index n) const { return wavevector(spec, at(n)).norm(); }

    // x with L(|gamma_n|) x = rhs
    CVec2 solve(Index n, const CVec2& rhs, double* resid) const {
        const Eigen::Matrix2cd L = symbol(radius(n), p);
        const CVec2 x = L.partialPivLu().solve(rhs);
        const double r = (L * x - rhs).norm() / std::max(1e-300, rhs.norm());
        *resid = std::max(*resid, r);
        return x;
    }
};

void check_real(AmplitudeCoefficients& c, std::initializer_list<cplx> values) {
    double im = 0.0, re = 0.0;
    for (const auto& v : values) {
        im = std::max(im, std::abs(v.imag()));
        re = std::max(re, std::abs(v.real()));
    }
    c.max_imag = im;
    if (im > 1e-9 * std::max(1.0, re)) throw ExtractionError("coefficient has an imaginary part " + std::to_string(im));
}

// nu0 from the balance of the mean mode; phi_+(0) component must vanish
cplx mean_correction(const Setup& s, double* resid) {
    const CVec2 phib = s.phi.v.conjugate();
    const LatticeField q = s.tf.N2(s.mode({1, 0}, s.phi.v), s.mode({-1, 0}, phib));
    const CVec2 v = s.value(q, {0, 0});
    const cplx plus0 = project(s.psip0, s.phip0, v);
    if (std::abs(plus0) > 1e-10 * std::max(1.0, v.norm()))
        throw ExtractionError("mean-mode quadratic term has a conserved component");
    const cplx nu0 = (2.0 / s.p.beta) * project(s.psim0, s.phim0, v);
    // residual of lambda_-(0) nu0 phi_-(0) + 2 P_-(0) N2 = 0
    *resid = std::max(*resid, std::abs(s.lam_m0 * nu0 + 2.0 * project(s.psim0, s.phim0, v)) / std::max(1e-300, std::abs(nu0)));
    return nu0;
}

void fill_common(AmplitudeCoefficients& c, const Setup& s) {
    c.kind = s.spec.kind;
    c.g = s.p.g;
    c.beta = s.p.beta;
    c.M_star = s.cp.M_star;
    c.k_star = s.cp.k_star;
    c.norm = s.phi.norm;
    c.phi = s.phi.v;
    c.kappa = kappa(s.p.g, s.p.beta);
    const auto pc = conservation_polynomial(s.p.g, s.p.beta, s.p.M, wavevector(s.spec, s.at({1, 0})));
    c.kappa0 = pc.kappa0;
    c.kappa1 = pc.kappa1;
}

}  // namespace

CoefficientResult square_coefficients(double g, double beta, const CoeffOptions& opt) {
    const Setup s(LatticeKind::Square, g, beta, opt);
    CoefficientResult r;
    auto& c = r.c;
    auto& nu = r.nu;
    fill_common(c, s);
    const CVec2 phi = s.phi.v, phib = phi.conjugate();
    const auto E1 = s.mode({1, 0}, phi), Em1 = s.mode({-1, 0}, phib);
    const auto E2 = s.mode({0, 1}, phi), Em2 = s.mode({0, -1}, phib);

    double resid = 0.0;
    const cplx nu0 = mean_correction(s, &resid);
    nu.nu_mean = nu0 * s.phim0;
    nu.nu_2k1 = -s.solve({2, 0}, s.value(s.tf.N2(E1, E1), {2, 0}), &resid);
    nu.nu_k1_plus_k2 = -2.0 * s.solve({1, 1}, s.value(s.tf.N2(E1, E2), {1, 1}), &resid);
    nu.nu_k1_minus_k2 = -2.0 * s.solve({1, -1}, s.value(s.tf.N2(E1, Em2), {1, -1}), &resid);
    nu.max_residual = resid;

    const auto mean = s.mode({0, 0}, nu.nu_mean);
    const auto N3self = s.tf.N3(E1, E1, Em1);
    const auto N3cross = s.tf.N3(E1, E2, Em2);
    const cplx mean_term = 2.0 * s.plus(s.tf.N2(mean, E1), {1, 0});
    const cplx K0 = mean_term + 2.0 * s.plus(s.tf.N2(s.mode({2, 0}, nu.nu_2k1), Em1), {1, 0}) +
                    3.0 * s.plus(N3self, {1, 0});
    const cplx K1 = mean_term + 2.0 * s.plus(s.tf.N2(s.mode({1, 1}, nu.nu_k1_plus_k2), Em2), {1, 0}) +
                    2.0 * s.plus(s.tf.N2(s.mode({1, -1}, nu.nu_k1_minus_k2), E2), {1, 0}) +
                    6.0 * s.plus(N3cross, {1, 0});
    const cplx Kc = 2.0 * s.plus(s.tf.N2(s.mode({0, 0}, s.phip0), E1), {1, 0});
    check_real(c, {K0, K1, Kc, nu0});
    c.K0 = K0.real();
    c.K1 = K1.real();
    c.Kc = Kc.real();
    c.nu0 = nu0.real();
    return r;
}

CoefficientResult hex_coefficients(double g, double beta, const CoeffOptions& opt) {
    const Setup s(LatticeKind::Hexagonal, g, beta, opt);
    CoefficientResult r;
    auto& c = r.c;
    auto& nu = r.nu;
    fill_common(c, s);
    const CVec2 phi = s.phi.v, phib = phi.conjugate();
    // k1 = (1,0), k2 = (0,1), k3 = (-1,-1)
    const auto E1 = s.mode({1, 0}, phi), Em1 = s.mode({-1, 0}, phib);
    const auto E2 = s.mode({0, 1}, phi), Em2 = s.mode({0, -1}, phib);
    const auto Em3 = s.mode({1, 1}, phib);

    double resid = 0.0;
    const cplx nu0 = mean_correction(s, &resid);
    nu.nu_mean = nu0 * s.phim0;
    nu.nu_2k1 = -s.solve({2, 0}, s.value(s.tf.N2(E1, E1), {2, 0}), &resid);
    nu.nu_k1_minus_k2 = -2.0 * s.solve({1, -1}, s.value(s.tf.N2(E1, Em2), {1, -1}), &resid);
    nu.nu_k1_plus_k2 = CVec2::Zero();  // k1 + k2 = -k3 is resonant
    // phi_-(k*) part of the resonant quadratic term at k3
    const CVec2 q3 = s.value(s.tf.N2(Em1, Em2), {-1, -1});
    nu.nu3 = -2.0 / s.lam_m_k * project(s.psim_k, s.phim_k, q3);
    nu.max_residual = resid;

    const cplx Nq = 2.0 * s.plus(s.tf.N2(Em2, Em3), {1, 0});
    const auto mean = s.mode({0, 0}, nu.nu_mean);
    const cplx mean_term = 2.0 * s.plus(s.tf.N2(mean, E1), {1, 0});
    const cplx K0 = mean_term + 2.0 * s.plus(s.tf.N2(s.mode({2, 0}, nu.nu_2k1), Em1), {1, 0}) +
                    3.0 * s.plus(s.tf.N3(E1, E1, Em1), {1, 0});
    const CVec2 stable_corr = std::conj(nu.nu3) * s.phim_k.conjugate();
    const cplx K2 = mean_term + 2.0 * s.plus(s.tf.N2(s.mode({1, -1}, nu.nu_k1_minus_k2), E2), {1, 0}) +
                    2.0 * s.plus(s.tf.N2(s.mode({1, 1}, stable_corr), Em2), {1, 0}) +
                    6.0 * s.plus(s.tf.N3(E1, E2, Em2), {1, 0});
    const cplx Kc = 2.0 * s.plus(s.tf.N2(s.mode({0, 0}, s.phip0), E1), {1, 0});
    check_real(c, {K0, K2, Nq, Kc, nu0, nu.nu3});
    c.N = Nq.real();
    c.K0 = K0.real();
    c.K2 = K2.real();
    c.Kc = Kc.real();
    c.nu0 = nu0.real();
    return r;
}

CoefficientResult lattice_coefficients(LatticeKind kind, double g, double beta, const CoeffOptions& opt) {
    return kind == LatticeKind::Square ? square_coefficients(g, beta, opt) : hex_coefficients(g, beta, opt);
}

ConservationPolynomial conservation_polynomial(double g, double beta, double M, const Vec2& k) {
    const FluidParams p{g, beta, M};
    validate(p);
    const double kn = k.norm();
    const auto ep = eigpair(kn, p, Branch::Plus, Normalization::HUnit);
    if (std::abs(ep.phi.v(0).imag()) > 1e-9 || std::abs(ep.phi.v(1).imag()) > 1e-9)
        throw DomainError("conservation polynomial needs a real critical eigenvector");
    const double f1 = ep.phi.v(0).real(), f2 = ep.phi.v(1).real();
    return {(g - M) * f1 * f1 + M * f1 * f2 + kn * kn * f1 * f1, 2.0 * f1 * f1};
}

double ConservationCheck::max_rel_error() const {
    return std::max(std::abs(parallel_numeric - parallel_predicted) / std::abs(parallel_predicted),
                    std::abs(perpendicular_numeric - perpendicular_predicted) / std::abs(perpendicular_predicted));
}

namespace {

// slow part of the quadratic h-residual for the modulated mode; returns (fitted coefficient, residual norm)
std::pair<double, double> slow_quadratic_response(const FluidParams& p, double k, const CVec2& phi, double eps,
                                                  bool along) {
    // periodic box holding the envelope exp(-(eps s)^2) in the modulation direction s
    const double span = 12.0 / eps;
    const double lambda = 2.0 * M_PI / k;
    Grid grid;
    const int per = 16;
    if (along) {
        const int cells = static_cast<int>(std::ceil(span / lambda));
        grid = {cells * per, 1, cells * lambda, 1.0};
    } else {
        int ny = 64;
        while (ny < 8.0 * span) ny *= 2;
        grid = {per, ny, lambda, span};
    }
    PseudoSpectral ps(grid, p, 3);
    const TaylorForms tf(p);
    const int nx = grid.nx, ny = grid.ny;
    std::vector<double> env2(static_cast<size_t>(nx) * ny);
    std::vector<double> u(env2.size()), v(env2.size());
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            const double x = grid.Lx * i / nx, y = grid.Ly * j / ny;
            const double s = along ? x - 0.5 * grid.Lx : y - 0.5 * grid.Ly;
            const double a = std::exp(-eps * eps * s * s);
            const size_t id = static_cast<size_t>(i) * ny + j;
            env2[id] = a * a;
            // a e^{ikx} phi + c.c.
            u[id] = 2.0 * a * std::cos(k * x) * phi(0).real();
            v[id] = 2.0 * a * std::cos(k * x) * phi(1).real();
        }
    GridField base(nx, ny, grid.Lx, grid.Ly);
    std::vector<cplx> q2;
    for (int n = 0; n <= TaylorForms::kDegree; ++n) {
        const double t = tf.node(n);
        for (size_t id = 0; id < u.size(); ++id) {
            base.h[id] = 1.0 + t * u[id];
            base.theta[id] = 1.0 + t * v[id];
        }
        const auto F = ps.rhs(ps.to_spectral(base), false);
        if (q2.empty()) q2.assign(F.h.size(), cplx(0.0, 0.0));
        for (size_t s = 0; s < q2.size(); ++s) q2[s] += tf.weight(2, n) * F.h[s];
    }
    // keep the slow band |q| < k/2 and compare with the second derivative of |a|^2
    GridField e(nx, ny, grid.Lx, grid.Ly, 1.0, 1.0);
    for (size_t id = 0; id < env2.size(); ++id) e.h[id] = 1.0 + env2[id];
    const auto E = ps.to_spectral(e);
    std::vector<cplx> slow(q2.size()), model(q2.size());
    const int nyh = ny / 2 + 1;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nyh; ++j) {
            const size_t s = static_cast<size_t>(i) * nyh + j;
            const double qx = ps.kx(i), qy = ps.ky(j);
            if (std::hypot(qx, qy) < 0.5 * k) {
                slow[s] = q2[s];
                model[s] = -(qx * qx + qy * qy) * E.h[s];
            }
        }
    const auto sg = ps.component_to_grid(slow), mg = ps.component_to_grid(model);
    double num = 0.0, den = 0.0, nrm = 0.0;
    for (size_t id = 0; id < sg.size(); ++id) {
        num += sg[id] * mg[id];
        den += mg[id] * mg[id];
        nrm += sg[id] * sg[id];
    }
    return {num / den, std::sqrt(nrm / sg.size())};
}

}  // namespace

ConservationCheck conservation_law_check(double g, double beta, double M, double k, double eps) {
    const FluidParams p{g, beta, M};
    const auto ep = eigpair(k, p, Branch::Plus, Normalization::HUnit);
    const auto pc = conservation_polynomial(g, beta, M, Vec2(k, 0.0));
    ConservationCheck c{};
    c.eps = eps;
    const auto par = slow_quadratic_response(p, k, ep.phi.v, eps, true);
    const auto perp = slow_quadratic_response(p, k, ep.phi.v, eps, false);
    const auto par2 = slow_quadratic_response(p, k, ep.phi.v, 2.0 * eps, true);
    c.parallel_numeric = par.first;
    c.parallel_predicted = pc.kappa0 + pc.kappa1 * k * k;
    c.perpendicular_numeric = perp.first;
    c.perpendicular_predicted = pc.kappa0;
    c.eps_power = std::log(par2.second / par.second) / std::log(2.0);
    return c;
}

double beta_of_g(double g) {
    if (!(g > 0 && g < 18)) throw DomainError("beta_of_g: g must lie in (0, 18)");
    const double disc = 484.0 * g * g * g + 7425.0 * g * g + 34992.0 * g + 46656.0;
    return (2.0 * g * g - std::sqrt(disc) + 87.0 * g + 216.0) / (3.0 * (g + 2.0));
}

namespace {
double N_of(double beta, double g) { return hex_coefficients(g, beta).c.N; }
}  // namespace

double beta_root_of_N(double g, double lo, double hi, double tol) {
    double flo = N_of(lo, g), fhi = N_of(hi, g);
    if (flo * fhi > 0) throw PropertyViolation("N does not change sign on the beta bracket");
    while (hi - lo > tol * std::max(1.0, std::abs(lo))) {
        const double mid = 0.5 * (lo + hi);
        const double fm = N_of(mid, g);
        if (fm == 0.0) return mid;
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::vector<double> N_roots_in_beta(double g, int samples) {
    std::vector<double> roots;
    double prev_b = 0.0, prev_n = 0.0;
    bool have = false;
    for (int i = 0; i < samples; ++i) {
        const double b = std::exp(std::log(1e-3) + (std::log(71.0) - std::log(1e-3)) * i / (samples - 1));
        if (classify_regime(g, b) != Regime::Monotonic) {
            have = false;
            continue;
        }
        const double n = N_of(b, g);
        if (have && prev_n * n <= 0) roots.push_back(beta_root_of_N(g, prev_b, b));
        prev_b = b;
        prev_n = n;
        have = true;
    }
    return roots;
}

double K0_on_curve(double g) { return square_coefficients(g, beta_of_g(g)).c.K0; }

double K0_sign_change_on_curve(double lo, double hi) {
    const double flo = K0_on_curve(lo), fhi = K0_on_curve(hi);
    if (flo * fhi > 0) throw PropertyViolation("K0 does not change sign on the N = 0 curve in the bracket");
    boost::uintmax_t iters = 100;
    const auto br = boost::math::tools::toms748_solve([](double g) { return K0_on_curve(g); }, lo, hi, flo, fhi,
                                                      boost::math::tools::eps_tolerance<double>(40), iters);
    return 0.5 * (br.first + br.second);
}

double ResidualFit::rel_error() const {
    double e = std::abs(kappa_fit - kappa_expected) / std::abs(kappa_expected);
    e = std::max(e, std::abs(cubic_fit - cubic_expected) / std::abs(cubic_expected));
    if (pattern == PatternKind::Hexagons)
        e = std::max(e, std::abs(quadratic_fit - quadratic_expected) / std::max(std::abs(quadratic_expected),
                                                                                 std::abs(cubic_expected)));
    return e;
}

ResidualFit residual_fit(PatternKind pattern, double g, double beta, double delta) {
    const LatticeKind kind = pattern == PatternKind::Hexagons ? LatticeKind::Hexagonal : LatticeKind::Square;
    const auto res = lattice_coefficients(kind, g, beta);
    const auto& c = res.c;
    const auto& nu = res.nu;
    // degree-5 products of distance-2 corrections reach distance 10
    const LatticeSpec spec{kind, c.k_star, 10};
    const FluidParams p{g, beta, c.M_star + delta};
    const auto minus_k = eigpair(c.k_star, {g, beta, c.M_star}, Branch::Minus).phi.v;
    const CVec2 psi = adjoint_eigvec(c.k_star, {g, beta, c.M_star}, Branch::Plus).v;

    // U(A) / A^2 split: linear and quadratic parts of the ansatz for real A
    LatticeField lin(spec), quad(spec);
    auto both = [](LatticeField& f, Index n, const CVec2& v) {
        f.add(n, v);
        f.add({-n[0], -n[1]}, v.conjugate());
    };
    std::vector<Index> gens;
    if (pattern == PatternKind::Rolls) gens = {{1, 0}};
    if (pattern == PatternKind::Squares) gens = {{1, 0}, {0, 1}};
    if (pattern == PatternKind::Hexagons) gens = {{1, 0}, {0, 1}, {-1, -1}};
    for (const auto& n : gens) {
        both(lin, n, c.phi);
        both(quad, {2 * n[0], 2 * n[1]}, nu.nu_2k1);
    }
    quad.add({0, 0}, static_cast<double>(gens.size()) * nu.nu_mean);
    for (size_t a = 0; a < gens.size(); ++a)
        for (size_t b = a + 1; b < gens.size(); ++b) {
            const Index s{gens[a][0] + gens[b][0], gens[a][1] + gens[b][1]};
            const Index d{gens[a][0] - gens[b][0], gens[a][1] - gens[b][1]};
            both(quad, d, nu.nu_k1_minus_k2);
            if (pattern == PatternKind::Squares) both(quad, s, nu.nu_k1_plus_k2);
        }
    if (pattern == PatternKind::Hexagons)
        for (const auto& n : gens) both(quad, n, nu.nu3 * minus_k);

    // exact polynomial of degree <= 10 in A; sample at Chebyshev points and solve the Vandermonde system
    constexpr int deg = 10;
    Eigen::MatrixXd V(deg + 1, deg + 1);
    Eigen::VectorXd y(deg + 1);
    const double amax = 0.3;
    for (int i = 0; i <= deg; ++i) {
        const double A = amax * std::cos((2.0 * i + 1.0) * M_PI / (2.0 * (deg + 1)));
        LatticeField U = cplx(A) * lin + cplx(A * A) * quad;
        const auto F = rhs_full(U, p);
        y(i) = project(psi, c.phi, F.get({1, 0})).real();
        for (int d = 0; d <= deg; ++d) V(i, d) = std::pow(A / amax, d);
    }
    const Eigen::VectorXd sc = V.colPivHouseholderQr().solve(y);
    ResidualFit fit{};
    fit.pattern = pattern;
    fit.delta = delta;
    fit.poly.resize(deg + 1);
    for (int d = 0; d <= deg; ++d) fit.poly[d] = sc(d) / std::pow(amax, d);
    fit.kappa_fit = fit.poly[1] / delta;
    fit.quadratic_fit = fit.poly[2];
    fit.cubic_fit = fit.poly[3];
    fit.kappa_expected = c.kappa;
    fit.quadratic_expected = pattern == PatternKind::Hexagons ? c.N : 0.0;
    fit.cubic_expected = pattern == PatternKind::Rolls     ? c.K0
                         : pattern == PatternKind::Squares ? c.K0 + c.K1
                                                           : c.K0 + 2.0 * c.K2;
    return fit;
}

namespace {

nlohmann::json cjson(const CVec2& v) {
    return {{"h", {v(0).real(), v(0).imag()}}, {"theta", {v(1).real(), v(1).imag()}}};
}

}  // namespace

nlohmann::json to_json(const AmplitudeCoefficients& c) {
    nlohmann::json j{{"lattice", to_string(c.kind)},
                     {"g", c.g},
                     {"beta", c.beta},
                     {"M_star", c.M_star},
                     {"k_star", c.k_star},
                     {"kappa", c.kappa},
                     {"Kc", c.Kc},
                     {"K0", c.K0},
                     {"nu0", c.nu0},
                     {"kappa0", c.kappa0},
                     {"kappa1", c.kappa1},
                     {"normalization", to_string(c.norm)},
                     {"phi", cjson(c.phi)},
                     {"max_imag", c.max_imag},
                     {"scale", c.scale()}};
    if (c.kind == LatticeKind::Square) {
        j["K1"] = c.K1;
    } else {
        j["N"] = c.N;
        j["K2"] = c.K2;
    }
    return j;
}

nlohmann::json to_json(const CorrectionVectors& nu) {
    return {{"mean", cjson(nu.nu_mean)},
            {"twice_k1", cjson(nu.nu_2k1)},
            {"k1_plus_k2", cjson(nu.nu_k1_plus_k2)},
            {"k1_minus_k2", cjson(nu.nu_k1_minus_k2)},
            {"resonant_minus", {nu.nu3.real(), nu.nu3.imag()}},
            {"max_residual", nu.max_residual}};
}

}  // namespace mfilm
