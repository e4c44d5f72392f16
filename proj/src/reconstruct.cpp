#include "mfilm/reconstruct.hpp"

#include <algorithm>
#include <cmath>

#include "mfilm/errors.hpp"

namespace mfilm {

std::string to_string(PatternBranch b) {
    switch (b) {
        case PatternBranch::Roll: return "roll";
        case PatternBranch::Square: return "square";
        case PatternBranch::HexN: return "hexN";
        default: return "hexPM";
    }
}

PatternBranch pattern_branch_from_string(const std::string& s) {
    if (s == "roll" || s == "rolls") return PatternBranch::Roll;
    if (s == "square" || s == "squares") return PatternBranch::Square;
    if (s == "hexN" || s == "hexn") return PatternBranch::HexN;
    if (s == "hexPM" || s == "hexpm") return PatternBranch::HexPM;
    throw UsageError("unknown pattern '" + s + "' (roll, square, hexN, hexPM)");
}

LatticeKind lattice_of(PatternBranch b) {
    return (b == PatternBranch::HexN || b == PatternBranch::HexPM) ? LatticeKind::Hexagonal : LatticeKind::Square;
}

Grid natural_cell(LatticeKind kind, double k_star, int nx, int ny, int cells) {
    if (!(k_star > 0) || cells < 1) throw DomainError("natural cell needs k > 0 and cells >= 1");
    Grid g;
    g.nx = nx;
    g.ny = ny;
    if (kind == LatticeKind::Square) {
        g.Lx = g.Ly = cells * 2 * M_PI / k_star;
    } else {
        g.Lx = cells * 4 * M_PI / k_star;
        g.Ly = cells * 4 * M_PI / (std::sqrt(3.0) * k_star);
    }
    return g;
}

nlohmann::json PatternField::metadata() const {
    return {{"branch", to_string(branch)},
            {"mu", mu},
            {"M0", M0},
            {"amplitude", amplitude},
            {"k_star", k_star},
            {"M", coeffs.M_star + mu * M0},
            {"phi", {phi(0).real(), phi(1).real()}},
            {"nx", field.nx},
            {"ny", field.ny},
            {"Lx", field.Lx},
            {"Ly", field.Ly}};
}

double pattern_amplitude(PatternBranch b, const AmplitudeCoefficients& c, double mu, double M0,
                         const PatternOptions& opt) {
    if (!(mu >= 0)) throw DomainError("mu must be non-negative");
    const double m = M0 * c.kappa;
    switch (b) {
        case PatternBranch::Roll:
            if (!(M0 * c.K0 < 0)) throw BranchError("rolls need M0 K0 < 0");
            return std::sqrt(-mu * m / c.K0);
        case PatternBranch::Square: {
            if (c.kind != LatticeKind::Square) throw UsageError("square patterns need square-lattice coefficients");
            const double K = c.K0 + c.K1;
            if (!(M0 * K < 0)) throw BranchError("squares need M0 (K0 + K1) < 0");
            return std::sqrt(-mu * m / K);
        }
        case PatternBranch::HexN:
            if (c.kind != LatticeKind::Hexagonal) throw UsageError("hexagons need hexagonal-lattice coefficients");
            if (c.N == 0.0) throw BranchError("hexagons of this branch need N != 0");
            return -mu * m / c.N;
        case PatternBranch::HexPM: {
            if (c.kind != LatticeKind::Hexagonal) throw UsageError("hexagons need hexagonal-lattice coefficients");
            const double K = c.K0 + 2 * c.K2;
            if (K == 0.0) throw BranchError("hexagons of this branch need K0 + 2 K2 != 0");
            double N0;
            if (opt.N0) {
                N0 = *opt.N0;
            } else {
                if (mu == 0.0) return 0.0;
                N0 = c.N / std::sqrt(mu);
            }
            const double D = N0 * N0 - 4 * m * K;
            if (!(D > 0)) throw BranchError("hexagons of this branch need N0^2 - 4 M0 kappa (K0 + 2 K2) > 0");
            const double s = opt.sign >= 0 ? 1.0 : -1.0;
            return std::sqrt(mu) * (-N0 + s * std::sqrt(D)) / (2 * K);
        }
    }
    throw UsageError("unknown pattern branch");
}

namespace {

std::array<Vec2, 3> generators(LatticeKind kind, double k) {
    const LatticeSpec spec{kind, k, 1};
    if (kind == LatticeKind::Square) return {wavevector(spec, {1, 0}), wavevector(spec, {0, 1}), Vec2::Zero()};
    return {wavevector(spec, {1, 0}), wavevector(spec, {0, 1}), wavevector(spec, {-1, -1})};
}

Grid resolve(const Grid& g, LatticeKind kind, double k) {
    Grid out = natural_cell(kind, k, g.nx, g.ny);
    if (g.Lx > 0) out.Lx = g.Lx;
    if (g.Ly > 0) out.Ly = g.Ly;
    return out;
}

}  // namespace

PatternField pattern_field(PatternBranch b, const AmplitudeCoefficients& c, double mu, double M0, const Grid& grid_in,
                           const PatternOptions& opt) {
    const double A = pattern_amplitude(b, c, mu, M0, opt);
    const LatticeKind kind = lattice_of(b);
    const Grid grid = resolve(grid_in, kind, c.k_star);
    PatternField out;
    out.field = GridField(grid.nx, grid.ny, grid.Lx, grid.Ly);
    out.branch = b;
    out.mu = mu;
    out.M0 = M0;
    out.amplitude = A;
    out.k_star = c.k_star;
    out.phi = c.phi;
    out.coeffs = c;
    const auto k = generators(kind, c.k_star);
    const int active = b == PatternBranch::Roll ? 1 : b == PatternBranch::Square ? 2 : 3;
    const double ph = c.phi(0).real(), pt = c.phi(1).real();
    GridField& f = out.field;
    for (int i = 0; i < f.nx; ++i)
        for (int j = 0; j < f.ny; ++j) {
            double s = 0;
            for (int m = 0; m < active; ++m) s += std::cos(k[m](0) * f.x(i) + k[m](1) * f.y(j));
            f.h[f.idx(i, j)] = 1.0 + 2 * A * s * ph;
            f.theta[f.idx(i, j)] = 1.0 + 2 * A * s * pt;
        }
    if (f.min_h() <= 0) throw BranchError("pattern amplitude too large: film height not positive");
    return out;
}

PatternField pattern_field(PatternBranch b, double g, double beta, double mu, double M0, const Grid& grid,
                           const PatternOptions& opt) {
    CoeffOptions co;
    co.norm = opt.norm;
    const auto res = lattice_coefficients(lattice_of(b), g, beta, co);
    return pattern_field(b, res.c, mu, M0, grid, opt);
}

FrontProfile::FrontProfile(LatticeKind kind, const HeteroclinicOrbit& orbit, double eps, double c, double k_star,
                           const CVec2& phi, double x_center)
    : kind_(kind), eps_(eps), c_(c), k_(k_star), x_center_(x_center), phi_h_(phi(0).real()), phi_t_(phi(1).real()) {
    if (!(eps > 0)) throw DomainError("eps must be positive");
    if (orbit.samples.empty()) throw UsageError("orbit has no samples");
    if (!(orbit.convergence_gap < 1e-3)) throw UsageError("orbit endpoints are not converged");
    for (size_t i = 1; i < orbit.samples.size(); ++i) {
        const double d = orbit.samples[i].xi - orbit.samples[i - 1].xi;
        if (!(d > 0)) throw UsageError("orbit samples must increase in xi");
        if (d >= 0.1) throw UsageError("orbit sampled too coarsely (max step must be < 0.1)");
    }
    for (const auto& s : orbit.samples) {
        Xi_.push_back(s.xi);
        A_.push_back(s.A);
    }
    A_src_ = orbit.source.position;
    A_tgt_ = orbit.target.position;
    Xi_mid_ = Xi_.front();
    for (size_t i = 0; i < A_.size(); ++i)
        if ((A_[i] - A_src_).norm() >= (A_[i] - A_tgt_).norm()) {
            Xi_mid_ = Xi_[i];
            break;
        }
}

std::array<double, 3> FrontProfile::amplitudes(double xi) const {
    const double Xi = eps_ * eps_ * (xi - x_center_) + Xi_mid_;
    Vec2 A;
    if (A_.size() == 1) {
        A = A_.front();
    } else if (Xi <= Xi_.front()) {
        A = A_src_;
    } else if (Xi >= Xi_.back()) {
        A = A_tgt_;
    } else {
        const size_t hi = std::upper_bound(Xi_.begin(), Xi_.end(), Xi) - Xi_.begin();
        const size_t lo = hi - 1;
        const double w = (Xi - Xi_[lo]) / (Xi_[hi] - Xi_[lo]);
        A = (1 - w) * A_[lo] + w * A_[hi];
    }
    if (kind_ == LatticeKind::Square) return {A(0), A(1), 0.0};
    return {A(0), A(1), A(1)};
}

std::array<double, 2> FrontProfile::value(double xi, double x, double y) const {
    const auto a = amplitudes(xi);
    const auto k = generators(kind_, k_);
    double s = 0;
    for (int m = 0; m < 3; ++m) s += 2 * a[m] * std::cos(k[m](0) * x + k[m](1) * y);
    return {1.0 + eps_ * s * phi_h_, 1.0 + eps_ * s * phi_t_};
}

FrontProfile front_profile(LatticeKind kind, const HeteroclinicOrbit& orbit, double eps, double c, double g,
                           double beta, double x_center) {
    const auto cp = critical_monotonic(g, beta);
    const FluidParams p{g, beta, cp.M_star};
    const auto ep = eigpair(cp.k_star, p, Branch::Plus, Normalization::HUnit);
    return FrontProfile(kind, orbit, eps, c, cp.k_star, ep.phi.v, x_center);
}

GridField front_field(LatticeKind kind, const HeteroclinicOrbit& orbit, double eps, double c, double g, double beta,
                      const Grid& grid_in) {
    const auto cp = critical_monotonic(g, beta);
    Grid grid = grid_in;
    if (!(grid.Ly > 0)) grid.Ly = natural_cell(kind, cp.k_star, 1, 1).Ly;
    if (!(grid.Lx > 0)) throw DomainError("front domain length must be positive");
    const FrontProfile fp = front_profile(kind, orbit, eps, c, g, beta, 0.5 * grid.Lx);
    GridField f(grid.nx, grid.ny, grid.Lx, grid.Ly);
    for (int i = 0; i < f.nx; ++i)
        for (int j = 0; j < f.ny; ++j) {
            const auto v = fp.value(f.x(i), f.x(i), f.y(j));
            f.h[f.idx(i, j)] = v[0];
            f.theta[f.idx(i, j)] = v[1];
        }
    return f;
}

Grid front_grid(LatticeKind kind, double k_star, double length, int nx, int ny) {
    const Grid cell = natural_cell(kind, k_star, nx, ny);
    const double period = cell.Lx;
    Grid g = cell;
    g.Lx = std::max(1.0, std::round(length / period)) * period;
    return g;
}

}  // namespace mfilm
