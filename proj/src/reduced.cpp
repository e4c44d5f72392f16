#include "mfilm/reduced.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/numeric/odeint.hpp>

#include "mfilm/errors.hpp"

namespace mfilm {

void validate(const ReducedParams& rp) {
    if (!(rp.c > 0)) throw DomainError("front speed c must be positive");
    if (!(rp.kappa > 0)) throw DomainError("kappa must be positive");
    if (!(rp.epsilon > 0)) throw DomainError("epsilon must be positive");
}

ReducedParams normalised_sign(const ReducedParams& rp) {
    ReducedParams r = rp;
    if (r.kind == LatticeKind::Hexagonal && r.N0 < 0) r.N0 = -r.N0;
    return r;
}

std::string to_string(FixedPointLabel l) {
    switch (l) {
        case FixedPointLabel::T: return "T";
        case FixedPointLabel::R: return "R";
        case FixedPointLabel::S: return "S";
        case FixedPointLabel::H1p: return "H1+";
        case FixedPointLabel::H1m: return "H1-";
        case FixedPointLabel::H2p: return "H2+";
        case FixedPointLabel::H2m: return "H2-";
        case FixedPointLabel::MMp: return "MM+";
        default: return "MM-";
    }
}

FixedPointLabel fixed_point_label_from_string(const std::string& s) {
    for (auto l : {FixedPointLabel::T, FixedPointLabel::R, FixedPointLabel::S, FixedPointLabel::H1p,
                   FixedPointLabel::H1m, FixedPointLabel::H2p, FixedPointLabel::H2m, FixedPointLabel::MMp,
                   FixedPointLabel::MMm})
        if (to_string(l) == s) return l;
    if (s == "MM") return FixedPointLabel::MMp;
    if (s == "H1p") return FixedPointLabel::H1p;
    if (s == "H1m") return FixedPointLabel::H1m;
    if (s == "H2p") return FixedPointLabel::H2p;
    if (s == "H2m") return FixedPointLabel::H2m;
    throw UsageError("unknown fixed point label '" + s + "'");
}

std::string to_string(Stability s) {
    switch (s) {
        case Stability::Stable: return "stable";
        case Stability::Unstable: return "unstable";
        default: return "saddle";
    }
}

Vec2 square_rhs(const Vec2& A, const ReducedParams& rp) {
    const double a = A(0), b = A(1), m = rp.M0kappa();
    return -(1.0 / rp.c) * Vec2(a * (m + rp.K0 * a * a + rp.K1 * b * b), b * (m + rp.K0 * b * b + rp.K1 * a * a));
}

Vec2 hex_rhs(const Vec2& A, const ReducedParams& rp) {
    const double a = A(0), b = A(1), m = rp.M0kappa();
    const double f1 = m * a + rp.N0 * b * b + rp.K0 * a * a * a + rp.K2 * a * (b * b + b * b);
    const double f2 = b * (m + rp.N0 * a + rp.K0 * b * b + rp.K2 * (b * b + a * a));
    return -(1.0 / rp.c) * Vec2(f1, f2);
}

Vec2 reduced_rhs(const Vec2& A, const ReducedParams& rp) {
    return rp.kind == LatticeKind::Square ? square_rhs(A, rp) : hex_rhs(A, rp);
}

Eigen::Matrix2d numerical_jacobian(const Vec2& A, const ReducedParams& rp, double h) {
    Eigen::Matrix2d J;
    for (int j = 0; j < 2; ++j) {
        Vec2 e = Vec2::Zero();
        e(j) = h;
        J.col(j) = (reduced_rhs(A + e, rp) - reduced_rhs(A - e, rp)) / (2.0 * h);
    }
    return J;
}

double lyapunov(const Vec2& A, const ReducedParams& rp) {
    const double a = A(0), b = A(1), a2 = a * a, b2 = b * b, m = rp.M0kappa(), c = rp.c;
    if (rp.kind == LatticeKind::Square)
        return m / (2 * c) * (a2 + b2) + rp.K0 / (4 * c) * (a2 * a2 + b2 * b2) + rp.K1 / (2 * c) * a2 * b2;
    return m / (2 * c) * (a2 + 2 * b2) + rp.N0 / c * a * b2 + rp.K0 / (4 * c) * a2 * a2 + rp.K2 / c * a2 * b2 +
           (rp.K0 + rp.K2) / (2 * c) * b2 * b2;
}

namespace {

FixedPointInfo analyse(const ReducedParams& rp, FixedPointLabel label, const Vec2& pos, std::optional<Vec2> closed) {
    FixedPointInfo fp;
    fp.label = label;
    fp.position = pos;
    fp.residual = reduced_rhs(pos, rp).norm();
    const Eigen::Matrix2d J = numerical_jacobian(pos, rp);
    Eigen::EigenSolver<Eigen::Matrix2d> es(J);
    std::array<int, 2> order{0, 1};
    const auto ev = es.eigenvalues();
    if (ev(1).real() < ev(0).real()) std::swap(order[0], order[1]);
    for (int i = 0; i < 2; ++i) {
        fp.eigenvalues(i) = ev(order[i]).real();
        Vec2 v = es.eigenvectors().col(order[i]).real();
        if (v.norm() == 0.0) v = es.eigenvectors().col(order[i]).imag();
        fp.eigenvectors[i] = v.normalized();
    }
    if (closed) {
        Vec2 c = *closed;
        if (c(1) < c(0)) std::swap(c(0), c(1));
        fp.closed_form = c;
    }
    const int pos_count = (fp.eigenvalues(0) > 0) + (fp.eigenvalues(1) > 0);
    fp.stability = pos_count == 0 ? Stability::Stable : pos_count == 2 ? Stability::Unstable : Stability::Saddle;
    return fp;
}

}  // namespace

double hex_threshold_R(const ReducedParams& rp) {
    const double d = rp.K0 - rp.K2;
    return -rp.K0 * rp.N0 * rp.N0 / (d * d);
}

double hex_threshold_diag(const ReducedParams& rp) {
    const double d = rp.K0 - rp.K2;
    return -rp.N0 * rp.N0 * (2 * rp.K0 + rp.K2) / (d * d);
}

std::vector<FixedPointInfo> fixed_points(const ReducedParams& rp_in) {
    validate(rp_in);
    const ReducedParams rp = normalised_sign(rp_in);
    const double m = rp.M0kappa(), c = rp.c;
    std::vector<FixedPointInfo> out;
    out.push_back(analyse(rp, FixedPointLabel::T, Vec2::Zero(), Vec2(-m / c, -m / c)));
    if (rp.K0 != 0.0 && m * rp.K0 < 0) {
        const double a = std::sqrt(-m / rp.K0);
        Vec2 ev;
        if (rp.kind == LatticeKind::Square)
            ev = Vec2(2 * m / c, (rp.K1 - rp.K0) * m / (c * rp.K0));
        else
            ev = Vec2(2 * m / c, -(rp.K0 - rp.K2) * m / (c * rp.K0) - rp.N0 * a / c);
        out.push_back(analyse(rp, FixedPointLabel::R, Vec2(a, 0.0), ev));
    }
    if (rp.kind == LatticeKind::Square) {
        const double K = rp.K0 + rp.K1;
        if (K != 0.0 && m * K < 0) {
            const double s = std::sqrt(-m / K);
            out.push_back(analyse(rp, FixedPointLabel::S, Vec2(s, s),
                                  Vec2(2 * m / c, -2 * (rp.K1 - rp.K0) * m / (c * K))));
        }
        return out;
    }
    const double K = rp.K0 + 2 * rp.K2;
    const double D = rp.N0 * rp.N0 - 4 * m * K;
    if (K != 0.0 && D > 0) {
        const double sq = std::sqrt(D);
        const double Ap = (-rp.N0 - sq) / (2 * K), Am = (-rp.N0 + sq) / (2 * K);
        auto ev = [&](double A) {
            return Vec2((m - K * A * A) / c, (-2 * m - 2 * (2 * rp.K0 + rp.K2) * A * A) / c);
        };
        out.push_back(analyse(rp, FixedPointLabel::H1p, Vec2(Ap, Ap), ev(Ap)));
        out.push_back(analyse(rp, FixedPointLabel::H1m, Vec2(Am, Am), ev(Am)));
        out.push_back(analyse(rp, FixedPointLabel::H2p, Vec2(Ap, -Ap), ev(Ap)));
        out.push_back(analyse(rp, FixedPointLabel::H2m, Vec2(Am, -Am), ev(Am)));
    }
    const double d = rp.K0 - rp.K2, e = rp.K0 + rp.K2;
    if (d != 0.0 && e != 0.0) {
        const double rad = -(rp.K0 * rp.N0 * rp.N0 + d * d * m) / e;
        if (rad > 0) {
            const double a1 = rp.N0 / d, a2 = std::sqrt(rad) / std::abs(d);
            out.push_back(analyse(rp, FixedPointLabel::MMp, Vec2(a1, a2), std::nullopt));
            out.push_back(analyse(rp, FixedPointLabel::MMm, Vec2(a1, -a2), std::nullopt));
        }
    }
    return out;
}

std::optional<FixedPointInfo> find_fixed_point(const ReducedParams& rp, FixedPointLabel label) {
    for (const auto& fp : fixed_points(rp))
        if (fp.label == label) return fp;
    return std::nullopt;
}

namespace {

using State = std::array<double, 2>;

struct Shot {
    std::vector<OrbitSample> samples;
    bool reached = false;
    double gap = std::numeric_limits<double>::infinity();
};

Shot shoot(const ReducedParams& rp, const Vec2& x0, int dir, const Vec2& goal, double tol, double cap, double dxi,
           double rtol, double blowup) {
    namespace ode = boost::numeric::odeint;
    auto sys = [&](const State& x, State& dx, double) {
        const Vec2 f = static_cast<double>(dir) * reduced_rhs(Vec2(x[0], x[1]), rp);
        dx[0] = f(0);
        dx[1] = f(1);
    };
    auto stepper = ode::make_dense_output(1e-12, rtol, ode::runge_kutta_dopri5<State>());
    State x{x0(0), x0(1)};
    stepper.initialize(x, 0.0, std::min(1e-3, dxi));
    Shot s;
    s.samples.push_back({0.0, x0});
    double next = 0.0;
    while (stepper.current_time() < cap) {
        const auto span = stepper.do_step(sys);
        const State& cur = stepper.current_state();
        const bool escaped = !std::isfinite(cur[0]) || !std::isfinite(cur[1]) || std::hypot(cur[0], cur[1]) > blowup;
        while (next + dxi <= span.second) {
            next += dxi;
            State y;
            stepper.calc_state(next, y);
            const Vec2 A(y[0], y[1]);
            if (!std::isfinite(A.norm()) || A.norm() > blowup) return s;
            s.samples.push_back({static_cast<double>(dir) * next, A});
            const double d = (A - goal).norm();
            s.gap = std::min(s.gap, d);
            if (d < tol) {
                s.reached = true;
                return s;
            }
            if (reduced_rhs(A, rp).norm() < 1e-13) return s;  // settled elsewhere
        }
        if (escaped) return s;
    }
    return s;
}

double lyapunov_slack(double E) { return 1e-13 * std::max(1.0, std::abs(E)); }

bool decreasing(const std::vector<OrbitSample>& s, const ReducedParams& rp) {
    for (size_t i = 1; i < s.size(); ++i) {
        const double e0 = lyapunov(s[i - 1].A, rp), e1 = lyapunov(s[i].A, rp);
        if (e1 > e0 + lyapunov_slack(e0)) return false;
    }
    return true;
}

}  // namespace

HeteroclinicOrbit heteroclinic(const ReducedParams& rp_in, FixedPointLabel source, FixedPointLabel target,
                               const HeteroclinicOptions& opt) {
    const ReducedParams rp = normalised_sign(rp_in);
    const auto all = fixed_points(rp);
    auto pick = [&](FixedPointLabel l) {
        for (const auto& fp : all)
            if (fp.label == l) return fp;
        throw UsageError("fixed point " + to_string(l) + " does not exist in this regime");
    };
    const FixedPointInfo src = pick(source), tgt = pick(target);
    const double cap = opt.xi_cap > 0 ? opt.xi_cap : 1e4 / rp.c;
    double radius = 1.0;
    for (const auto& fp : all) radius = std::max(radius, fp.position.norm());
    const double blowup = 1e3 * radius;
    auto step_size = [&](const FixedPointInfo& fp) {
        return opt.delta0 * (fp.position.norm() > 0 ? fp.position.norm() : 1.0);
    };

    HeteroclinicOrbit orbit;
    orbit.source = src;
    orbit.target = tgt;
    orbit.convergence_gap = std::numeric_limits<double>::infinity();

    auto finish = [&](std::vector<OrbitSample> samples, double gap, const char* method) {
        orbit.samples = std::move(samples);
        orbit.convergence_gap = gap;
        orbit.method = method;
        orbit.energy_decreasing = decreasing(orbit.samples, rp);
        return orbit;
    };

    const int src_unstable = (src.eigenvalues(0) > 0) + (src.eigenvalues(1) > 0);
    const int tgt_stable = (tgt.eigenvalues(0) < 0) + (tgt.eigenvalues(1) < 0);

    // forward along the one-dimensional unstable manifold of the source
    if (src_unstable == 1) {
        const Vec2 vu = src.eigenvectors[1];
        for (double sgn : {1.0, -1.0}) {
            auto s = shoot(rp, src.position + sgn * step_size(src) * vu, +1, tgt.position, opt.tol, cap, opt.max_dxi,
                           opt.rtol, blowup);
            if (s.reached) return finish(std::move(s.samples), s.gap, "unstable-manifold");
        }
    }
    // backward along the one-dimensional stable manifold of the target, then reversed. The seed sits
    // inside the tolerance so no forward tail into the saddle is needed.
    if (tgt_stable == 1) {
        const Vec2 vs = tgt.eigenvectors[0];
        const double seed = 0.1 * opt.tol;
        for (double sgn : {1.0, -1.0}) {
            auto s = shoot(rp, tgt.position + sgn * seed * vs, -1, src.position, opt.tol, cap, opt.max_dxi, opt.rtol,
                           blowup);
            if (!s.reached) continue;
            std::reverse(s.samples.begin(), s.samples.end());
            const double xi0 = s.samples.front().xi;
            for (auto& p : s.samples) p.xi -= xi0;
            const double gap = std::max(s.gap, (s.samples.back().A - tgt.position).norm());
            return finish(std::move(s.samples), gap, "stable-manifold");
        }
    }
    // node to node: eigen-directions first, then a fan of angles
    if (src_unstable == 2 && tgt_stable == 2) {
        std::vector<Vec2> dirs;
        for (const auto& v : src.eigenvectors) {
            dirs.push_back(v);
            dirs.push_back(-v);
        }
        const Vec2 towards = tgt.position - src.position;
        if (towards.norm() > 0) dirs.push_back(towards.normalized());
        for (int m = 0; m < 72; ++m) {
            const double a = 2 * M_PI * m / 72;
            dirs.emplace_back(std::cos(a), std::sin(a));
        }
        for (const auto& d : dirs) {
            auto s = shoot(rp, src.position + step_size(src) * d, +1, tgt.position, opt.tol, cap, opt.max_dxi, opt.rtol,
                           blowup);
            if (s.reached) return finish(std::move(s.samples), s.gap, "fan");
        }
    }
    throw ConnectionNotFound("no orbit from " + to_string(source) + " to " + to_string(target));
}

std::vector<Trajectory> phase_portrait(const ReducedParams& rp_in, const PortraitSpec& spec) {
    const ReducedParams rp = normalised_sign(rp_in);
    const auto fps = fixed_points(rp);
    double radius = 1.0;
    for (const auto& fp : fps) radius = std::max(radius, fp.position.norm());
    std::vector<Trajectory> out;
    int id = 0;
    for (int i = 0; i < spec.n1; ++i)
        for (int j = 0; j < spec.n2; ++j) {
            const double a1 = spec.n1 > 1 ? spec.a1_min + (spec.a1_max - spec.a1_min) * i / (spec.n1 - 1) : spec.a1_min;
            const double a2 = spec.n2 > 1 ? spec.a2_min + (spec.a2_max - spec.a2_min) * j / (spec.n2 - 1) : spec.a2_min;
            for (int dir : {1, -1}) {
                if (dir < 0 && !spec.backward) continue;
                auto s = shoot(rp, Vec2(a1, a2), dir, Vec2(1e300, 1e300), 0.0, spec.xi_max, spec.max_dxi, 1e-9,
                               10.0 * radius);
                Trajectory t{id++, dir, std::move(s.samples), std::nullopt};
                const Vec2 end = t.samples.back().A;
                for (const auto& fp : fps)
                    if ((end - fp.position).norm() < 1e-3) t.limit = fp.label;
                out.push_back(std::move(t));
            }
        }
    return out;
}

ReducedParams square_regime(char regime, double c) {
    ReducedParams rp;
    rp.kind = LatticeKind::Square;
    rp.c = c;
    rp.kappa = 1.0;
    switch (regime) {
        case 'a': rp.M0 = 1; rp.K0 = -1; rp.K1 = -0.5; break;
        case 'b': rp.M0 = -1; rp.K0 = 1; rp.K1 = 3; break;
        case 'c': rp.M0 = 1; rp.K0 = -1; rp.K1 = -3; break;
        case 'd': rp.M0 = -1; rp.K0 = 1; rp.K1 = 0.5; break;
        default: throw UsageError(std::string("unknown square regime '") + regime + "'");
    }
    return rp;
}

ReducedParams hex_regime(char regime, double K0, double K2, double N0, double kappa, double c) {
    if (!(K0 < 0 && K2 < K0 && N0 > 0)) throw DomainError("hexagonal regimes need K2 < K0 < 0 and N0 > 0");
    ReducedParams rp;
    rp.kind = LatticeKind::Hexagonal;
    rp.c = c;
    rp.kappa = kappa;
    rp.K0 = K0;
    rp.K2 = K2;
    rp.N0 = N0;
    const double t1 = hex_threshold_R(rp), t2 = hex_threshold_diag(rp);
    const double tH = N0 * N0 / (4 * (K0 + 2 * K2));  // hexagons exist above this (negative) value
    double m = 0;
    switch (regime) {
        case 'a': m = 0.5 * tH; break;
        case 'b': m = 0.5 * t1; break;
        case 'c': m = 0.5 * (t1 + t2); break;
        case 'd': m = 2.0 * t2; break;
        default: throw UsageError(std::string("unknown hexagonal regime '") + regime + "'");
    }
    rp.M0 = m / kappa;
    return rp;
}

std::vector<std::pair<FixedPointLabel, FixedPointLabel>> expected_connections(LatticeKind kind, char regime) {
    using L = FixedPointLabel;
    if (kind == LatticeKind::Square) {
        switch (regime) {
            case 'a': return {{L::R, L::T}, {L::S, L::T}, {L::S, L::R}};
            case 'b': return {{L::T, L::R}, {L::T, L::S}, {L::S, L::R}};
            case 'c': return {{L::R, L::T}, {L::S, L::T}, {L::R, L::S}};
            case 'd': return {{L::T, L::R}, {L::T, L::S}, {L::R, L::S}};
            default: break;
        }
    } else {
        switch (regime) {
            case 'a': return {{L::T, L::H1m}, {L::H1p, L::H1m}, {L::T, L::H2m}, {L::H2p, L::H2m}};
            case 'b':
                return {{L::R, L::T},   {L::H1p, L::T}, {L::H1m, L::T},  {L::H2p, L::T},
                        {L::H2m, L::T}, {L::H1p, L::R}, {L::H1p, L::H2m}};
            case 'c': return {{L::R, L::MMp}, {L::H1p, L::MMp}, {L::MMp, L::T}, {L::H1p, L::H2m}};
            // R is an unstable node here, so the R/H1+ connection runs from R
            case 'd': return {{L::MMp, L::T}, {L::MMp, L::H1p}, {L::MMp, L::H2m}, {L::R, L::H1p}};
            default: break;
        }
    }
    throw UsageError(std::string("unknown regime '") + regime + "'");
}

namespace {

using Poly = std::vector<cplx>;

Poly pmul(const Poly& a, const Poly& b) {
    Poly r(a.size() + b.size() - 1, cplx(0.0, 0.0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

Poly padd(Poly a, const Poly& b, cplx s = 1.0) {
    if (a.size() < b.size()) a.resize(b.size(), cplx(0.0, 0.0));
    for (size_t i = 0; i < b.size(); ++i) a[i] += s * b[i];
    return a;
}

}  // namespace

cplx spatial_dispersion(double c, cplx mu, const Vec2& k, const FluidParams& p) {
    const cplx a = mu + cplx(0.0, k(0));
    const cplx s = a * a - k(1) * k(1);
    const Eigen::Matrix2cd L = symbol_of_laplacian(s, p) + c * mu * Eigen::Matrix2cd::Identity();
    return L.determinant();
}

std::vector<cplx> spatial_dispersion_poly(double c, const Vec2& k, const FluidParams& p) {
    const Poly s{cplx(-k(0) * k(0) - k(1) * k(1), 0.0), cplx(0.0, 2.0 * k(0)), cplx(1.0, 0.0)};
    const Poly s2 = pmul(s, s);
    const double g = p.g, M = p.M, b = p.beta;
    const Poly cm{0.0, c};
    const Poly L00 = padd(padd(Poly{}, s2, -1.0 / 3.0), s, g / 3.0 - M / 2.0);
    const Poly L01 = padd(Poly{}, s, M / 2.0);
    const Poly L10 = padd(padd(padd(Poly{}, s2, -1.0 / 8.0), s, g / 8.0 - M / 6.0), Poly{b});
    const Poly L11 = padd(padd(Poly{}, s, 1.0 + M / 6.0), Poly{-b});
    return padd(pmul(padd(L00, cm), padd(L11, cm)), pmul(L01, L10), -1.0);
}

std::vector<cplx> spatial_dispersion_roots(double c, const Vec2& k, const FluidParams& p) {
    Poly a = spatial_dispersion_poly(c, k, p);
    double scale = 0.0;
    for (const auto& v : a) scale = std::max(scale, std::abs(v));
    while (a.size() > 1 && std::abs(a.back()) <= 1e-14 * scale) a.pop_back();
    const int n = static_cast<int>(a.size()) - 1;
    if (n < 1) return {};
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) C(i, n - 1) = -a[i] / a[n];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C);
    std::vector<cplx> roots(es.eigenvalues().data(), es.eigenvalues().data() + n);
    std::sort(roots.begin(), roots.end(), [](cplx x, cplx y) {
        return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    return roots;
}

int count_roots_in_strip(double c, const Vec2& k, const FluidParams& p, double half_width) {
    const Poly a = spatial_dispersion_poly(c, k, p);
    double bound = 0.0;
    for (size_t i = 0; i + 1 < a.size(); ++i) bound = std::max(bound, std::abs(a[i] / a.back()));
    const double R = 2.0 + bound;
    auto f = [&](cplx z) { return spatial_dispersion(c, z, k, p); };
    double total = 0.0;
    std::function<void(cplx, cplx, cplx, cplx, int)> seg = [&](cplx z0, cplx z1, cplx f0, cplx f1, int depth) {
        const double d = std::arg(f1 / f0);
        if (std::abs(d) > M_PI / 8 && depth < 50) {
            const cplx zm = 0.5 * (z0 + z1);
            const cplx fm = f(zm);
            seg(z0, zm, f0, fm, depth + 1);
            seg(zm, z1, fm, f1, depth + 1);
            return;
        }
        total += d;
    };
    const std::array<cplx, 5> corners{cplx(-half_width, -R), cplx(half_width, -R), cplx(half_width, R),
                                      cplx(-half_width, R), cplx(-half_width, -R)};
    for (int e = 0; e < 4; ++e) {
        const int pieces = 256;
        for (int i = 0; i < pieces; ++i) {
            const cplx z0 = corners[e] + (corners[e + 1] - corners[e]) * (double(i) / pieces);
            const cplx z1 = corners[e] + (corners[e + 1] - corners[e]) * (double(i + 1) / pieces);
            seg(z0, z1, f(z0), f(z1), 0);
        }
    }
    return static_cast<int>(std::lround(total / (2 * M_PI)));
}

bool SpectralGapReport::ok() const {
    if (!(delta > 0)) return false;
    for (const auto& e : entries) {
        if (e.count != e.root_count) return false;
        if (e.central ? e.count != 1 : e.count != 0) return false;
    }
    return true;
}

SpectralGapReport spectral_gap_check(double g, double beta, double c, LatticeKind kind, int max_distance) {
    const auto cp = critical_monotonic(g, beta);
    const FluidParams p{g, beta, cp.M_star};
    const LatticeSpec spec{kind, cp.k_star, max_distance};
    std::vector<Index> idx;
    for (int a = -max_distance; a <= max_distance; ++a)
        for (int b = -max_distance; b <= max_distance; ++b)
            if (lattice_distance(spec, {a, b}) <= max_distance) idx.push_back({a, b});
    SpectralGapReport rep;
    rep.delta = std::numeric_limits<double>::infinity();
    std::vector<std::vector<cplx>> roots;
    for (const auto& n : idx) {
        roots.push_back(spatial_dispersion_roots(c, wavevector(spec, n), p));
        for (const auto& r : roots.back())
            if (std::abs(r.real()) > 1e-7) rep.delta = std::min(rep.delta, std::abs(r.real()));
    }
    for (size_t i = 0; i < idx.size(); ++i) {
        const Vec2 k = wavevector(spec, idx[i]);
        SpectralGapEntry e{};
        e.n = idx[i];
        e.central = idx[i] == Index{0, 0} || std::abs(k.norm() - cp.k_star) < 1e-9 * cp.k_star;
        e.count = count_roots_in_strip(c, k, p, 0.5 * rep.delta);
        e.min_abs_re_root = std::numeric_limits<double>::infinity();
        for (const auto& r : roots[i]) {
            e.min_abs_re_root = std::min(e.min_abs_re_root, std::abs(r.real()));
            if (std::abs(r.real()) < 0.5 * rep.delta) ++e.root_count;
        }
        rep.entries.push_back(e);
    }
    return rep;
}

}  // namespace mfilm
