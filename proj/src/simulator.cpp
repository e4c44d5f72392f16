#include "mfilm/simulator.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "mfilm/errors.hpp"

namespace mfilm {

SpectralField::SpectralField(int nx_, int ny_) : nx(nx_), ny(ny_) {
    h.assign(static_cast<size_t>(nx) * nyh(), cplx(0.0, 0.0));
    theta.assign(static_cast<size_t>(nx) * nyh(), cplx(0.0, 0.0));
}

namespace {

struct R2C {
    int nx, ny;
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    fftw_plan fwd = nullptr, bwd = nullptr;

    R2C(int nx_, int ny_) : nx(nx_), ny(ny_) {
        const size_t nr = static_cast<size_t>(nx) * ny;
        const size_t nc = static_cast<size_t>(nx) * (ny / 2 + 1);
        real = fftw_alloc_real(nr);
        spec = fftw_alloc_complex(nc);
        fwd = fftw_plan_dft_r2c_2d(nx, ny, real, spec, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_c2r_2d(nx, ny, spec, real, FFTW_ESTIMATE);
    }
    ~R2C() {
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(real);
        fftw_free(spec);
    }
    R2C(const R2C&) = delete;
    R2C& operator=(const R2C&) = delete;

    size_t nreal() const { return static_cast<size_t>(nx) * ny; }
    size_t nspec() const { return static_cast<size_t>(nx) * (ny / 2 + 1); }

    std::vector<cplx> forward(const std::vector<double>& f) {
        std::copy(f.begin(), f.end(), real);
        fftw_execute(fwd);
        std::vector<cplx> c(nspec());
        const double s = 1.0 / static_cast<double>(nreal());
        for (size_t k = 0; k < c.size(); ++k) c[k] = cplx(spec[k][0], spec[k][1]) * s;
        return c;
    }
    std::vector<double> backward(const std::vector<cplx>& c) {
        for (size_t k = 0; k < c.size(); ++k) {
            spec[k][0] = c[k].real();
            spec[k][1] = c[k].imag();
        }
        fftw_execute(bwd);
        return std::vector<double>(real, real + nreal());
    }
};

int signed_index(int i, int n) { return i <= n / 2 ? i : i - n; }

}  // namespace

struct PseudoSpectral::Impl {
    R2C base;
    R2C padded;
    std::vector<size_t> to_padded;  // base slot -> padded slot
    std::vector<char> nyq;
    Impl(int nx, int ny, int px, int py) : base(nx, ny), padded(px, py) {}
};

PseudoSpectral::PseudoSpectral(const Grid& grid, const FluidParams& p, int pad) : grid_(grid), p_(p), pad_(pad) {
    if (grid.nx < 1 || grid.ny < 1) throw UsageError("grid sizes must be positive");
    if (!(grid.Lx > 0) || !(grid.Ly > 0)) throw UsageError("domain lengths must be positive");
    if (pad < 1 || pad > 3) throw UsageError("dealias_pad must be 1, 2 or 3");
    const int px = pad * grid.nx, py = pad * grid.ny;
    impl_ = std::make_unique<Impl>(grid.nx, grid.ny, px, py);
    const int nyh = grid.ny / 2 + 1, pyh = py / 2 + 1;
    impl_->to_padded.resize(static_cast<size_t>(grid.nx) * nyh);
    impl_->nyq.resize(impl_->to_padded.size());
    for (int i = 0; i < grid.nx; ++i) {
        const int si = signed_index(i, grid.nx);
        const int ip = si >= 0 ? si : si + px;
        for (int j = 0; j < nyh; ++j) {
            const size_t b = static_cast<size_t>(i) * nyh + j;
            impl_->to_padded[b] = static_cast<size_t>(ip) * pyh + j;
            impl_->nyq[b] = nyquist(i, j);
        }
    }
}

PseudoSpectral::~PseudoSpectral() = default;

double PseudoSpectral::kx(int i) const { return 2.0 * M_PI * signed_index(i, grid_.nx) / grid_.Lx; }
double PseudoSpectral::ky(int j) const { return 2.0 * M_PI * j / grid_.Ly; }

bool PseudoSpectral::nyquist(int i, int j) const {
    return (grid_.nx % 2 == 0 && i == grid_.nx / 2) || (grid_.ny % 2 == 0 && j == grid_.ny / 2);
}

SpectralField PseudoSpectral::to_spectral(const GridField& f) const {
    if (f.nx != grid_.nx || f.ny != grid_.ny) throw UsageError("grid field size does not match the evaluator");
    std::vector<double> u(f.h.size()), v(f.theta.size());
    for (size_t k = 0; k < u.size(); ++k) {
        u[k] = f.h[k] - 1.0;
        v[k] = f.theta[k] - 1.0;
    }
    SpectralField U(grid_.nx, grid_.ny);
    U.h = impl_->base.forward(u);
    U.theta = impl_->base.forward(v);
    for (size_t k = 0; k < U.h.size(); ++k)
        if (impl_->nyq[k]) U.h[k] = U.theta[k] = 0.0;
    return U;
}

std::vector<double> PseudoSpectral::component_to_grid(const std::vector<cplx>& c) const {
    return impl_->base.backward(c);
}

GridField PseudoSpectral::to_grid(const SpectralField& U) const {
    GridField f(grid_.nx, grid_.ny, grid_.Lx, grid_.Ly);
    const auto u = impl_->base.backward(U.h);
    const auto v = impl_->base.backward(U.theta);
    for (size_t k = 0; k < u.size(); ++k) {
        f.h[k] = 1.0 + u[k];
        f.theta[k] = 1.0 + v[k];
    }
    return f;
}

SpectralField PseudoSpectral::rhs(const SpectralField& U, bool divide_theta, double* min_h) const {
    Impl& m = *impl_;
    const int nx = grid_.nx, nyh = grid_.ny / 2 + 1;
    const size_t nb = m.base.nspec();
    const size_t np = m.padded.nreal();

    auto phys = [&](const std::vector<cplx>& c) {
        std::vector<cplx> padded(m.padded.nspec(), cplx(0.0, 0.0));
        for (size_t b = 0; b < nb; ++b)
            if (!m.nyq[b]) padded[m.to_padded[b]] = c[b];
        return m.padded.backward(padded);
    };
    auto spec = [&](const std::vector<double>& f) {
        const auto padded = m.padded.forward(f);
        std::vector<cplx> c(nb);
        for (size_t b = 0; b < nb; ++b) c[b] = m.nyq[b] ? cplx(0.0, 0.0) : padded[m.to_padded[b]];
        return c;
    };

    std::vector<cplx> ux(nb), uy(nb), vx(nb), vy(nb), Px(nb), Py(nb);
    for (int i = 0; i < nx; ++i) {
        const double a = kx(i);
        for (int j = 0; j < nyh; ++j) {
            const double b = ky(j);
            const size_t s = static_cast<size_t>(i) * nyh + j;
            const cplx P = -(a * a + b * b + p_.g) * U.h[s];
            ux[s] = cplx(0, a) * U.h[s];
            uy[s] = cplx(0, b) * U.h[s];
            vx[s] = cplx(0, a) * U.theta[s];
            vy[s] = cplx(0, b) * U.theta[s];
            Px[s] = cplx(0, a) * P;
            Py[s] = cplx(0, b) * P;
        }
    }
    const auto u = phys(U.h), v = phys(U.theta);
    const auto gux = phys(ux), guy = phys(uy), gvx = phys(vx), gvy = phys(vy);
    const auto gPx = phys(Px), gPy = phys(Py);

    std::vector<double> jx(np), jy(np), Gx(np), Gy(np), S(np), hh(np);
    double hmin = std::numeric_limits<double>::infinity();
    const double M = p_.M;
    for (size_t k = 0; k < np; ++k) {
        const double h = 1.0 + u[k];
        hmin = std::min(hmin, h);
        hh[k] = h;
        const double h2 = h * h, h3 = h2 * h, h4 = h3 * h;
        const double Dx = gux[k] - gvx[k], Dy = guy[k] - gvy[k];
        jx[k] = h3 / 3.0 * gPx[k] + M / 2.0 * h2 * Dx;
        jy[k] = h3 / 3.0 * gPy[k] + M / 2.0 * h2 * Dy;
        Gx[k] = h * gvx[k] - (h4 / 8.0 * gPx[k] + M / 6.0 * h3 * Dx);
        Gy[k] = h * gvy[k] - (h4 / 8.0 * gPy[k] + M / 6.0 * h3 * Dy);
        S[k] = -0.5 * (gux[k] * gux[k] + guy[k] * guy[k]) + p_.beta * (u[k] - v[k]) - (jx[k] * Dx + jy[k] * Dy);
    }
    if (min_h) *min_h = hmin;

    const auto cjx = spec(jx), cjy = spec(jy), cGx = spec(Gx), cGy = spec(Gy), cS = spec(S);
    SpectralField F(nx, grid_.ny);
    for (int i = 0; i < nx; ++i) {
        const double a = kx(i);
        for (int j = 0; j < nyh; ++j) {
            const double b = ky(j);
            const size_t s = static_cast<size_t>(i) * nyh + j;
            F.h[s] = -(cplx(0, a) * cjx[s] + cplx(0, b) * cjy[s]);
            F.theta[s] = cplx(0, a) * cGx[s] + cplx(0, b) * cGy[s] + cS[s];
        }
    }
    if (divide_theta) {
        auto f2 = phys(F.theta);
        for (size_t k = 0; k < np; ++k) f2[k] /= hh[k];
        F.theta = spec(f2);
    }
    return F;
}

void validate(const SimConfig& cfg) {
    validate(cfg.params);
    if (!(cfg.dt > 0)) throw UsageError("dt must be positive");
    if (!(cfg.t_end > 0)) throw UsageError("t_end must be positive");
    if (!(cfg.h_floor > 0 && cfg.h_floor < 1)) throw UsageError("h_floor must lie in (0,1)");
    if (cfg.dealias_pad < 1 || cfg.dealias_pad > 3) throw UsageError("dealias_pad must be 1, 2 or 3");
    if (cfg.output_every < 1) throw UsageError("output cadence must be >= 1");
    if (cfg.track_front && cfg.modes.empty()) throw UsageError("front tracking needs a tracked mode");
}

Simulator::Simulator(const SimConfig& cfg, const GridField& initial) : cfg_(cfg) {
    validate(cfg_);
    if (initial.nx != cfg.grid.nx || initial.ny != cfg.grid.ny) throw UsageError("initial field does not match grid");
    if (initial.min_h() <= cfg.h_floor) throw SimulationAbort("initial film height below h_floor");
    init();
    U_ = ps_->to_spectral(initial);
}

Simulator::Simulator(const SimConfig& cfg, const SpectralField& initial, double t0) : cfg_(cfg), t_(t0) {
    validate(cfg_);
    if (initial.nx != cfg.grid.nx || initial.ny != cfg.grid.ny) throw UsageError("initial field does not match grid");
    init();
    U_ = initial;
}

void Simulator::init() {
    ps_ = std::make_unique<PseudoSpectral>(cfg_.grid, cfg_.params, cfg_.dealias_pad);
    const int nx = cfg_.grid.nx, nyh = cfg_.grid.ny / 2 + 1;
    symbols_.resize(static_cast<size_t>(nx) * nyh);
    implicit_inv_.resize(symbols_.size());
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nyh; ++j) {
            const size_t s = static_cast<size_t>(i) * nyh + j;
            const double k = std::hypot(ps_->kx(i), ps_->ky(j));
            symbols_[s] = symbol(k, cfg_.params);
            implicit_inv_[s] = (Eigen::Matrix2cd::Identity() - cfg_.dt * symbols_[s]).inverse();
        }
    mode_slots_.clear();
    for (const auto& k : cfg_.modes) {
        const double fx = k(0) * cfg_.grid.Lx / (2 * M_PI), fy = k(1) * cfg_.grid.Ly / (2 * M_PI);
        int mx = static_cast<int>(std::lround(fx)), my = static_cast<int>(std::lround(fy));
        if (std::abs(fx - mx) > 1e-8 || std::abs(fy - my) > 1e-8)
            throw UsageError("tracked wave vector is not a Fourier mode of the grid");
        int conj = 0;
        if (my < 0 || (my == 0 && mx < 0)) {
            mx = -mx;
            my = -my;
            conj = 1;
        }
        const int i = mx >= 0 ? mx : mx + nx;
        if (std::abs(mx) >= (nx + 1) / 2 || my >= (cfg_.grid.ny + 1) / 2)
            throw UsageError("tracked wave vector not resolved by the grid");
        mode_slots_.push_back({i, my, conj});
    }
}

void Simulator::step() {
    double hmin = 0.0;
    const SpectralField F = ps_->rhs(U_, true, &hmin);
    if (!(hmin > cfg_.h_floor)) {
        if (std::isnan(hmin)) throw SimulationAbort("NaN in film height; reduce dt");
        throw SimulationAbort("film height " + std::to_string(hmin) + " below h_floor at t = " + std::to_string(t_));
    }
    const int nx = cfg_.grid.nx, nyh = cfg_.grid.ny / 2 + 1;
    bool bad = false;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nyh; ++j) {
            const size_t s = static_cast<size_t>(i) * nyh + j;
            if (ps_->nyquist(i, j)) {
                U_.h[s] = U_.theta[s] = 0.0;
                continue;
            }
            const CVec2 u(U_.h[s], U_.theta[s]);
            const CVec2 f(F.h[s], F.theta[s]);
            const CVec2 r = u + cfg_.dt * (f - symbols_[s] * u);
            const CVec2 n = implicit_inv_[s] * r;
            U_.h[s] = n(0);
            U_.theta[s] = n(1);
            bad = bad || !std::isfinite(n(0).real()) || !std::isfinite(n(0).imag()) || !std::isfinite(n(1).real()) ||
                  !std::isfinite(n(1).imag());
        }
    if (bad) throw SimulationAbort("non-finite state at t = " + std::to_string(t_) + "; reduce dt");
    t_ += cfg_.dt;
}

void Simulator::advance_to(double t_end) {
    while (t_ < t_end - 1e-9 * cfg_.dt) step();
}

GridField Simulator::field() const { return ps_->to_grid(U_); }

std::vector<double> Simulator::envelope_profile() const {
    if (cfg_.modes.empty()) throw UsageError("no tracked mode for the envelope");
    const int nx = cfg_.grid.nx, ny = cfg_.grid.ny, nyh = ny / 2 + 1;
    const Vec2 k1 = cfg_.modes[0];
    const double band = 0.5 * k1.norm();
    fftw_complex* buf = fftw_alloc_complex(static_cast<size_t>(nx) * ny);
    fftw_plan plan = fftw_plan_dft_2d(nx, ny, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    for (int i = 0; i < nx; ++i)
        for (int jj = 0; jj < ny; ++jj) {
            const int sj = signed_index(jj, ny);
            cplx c;
            double kxv, kyv;
            if (sj >= 0) {
                c = U_.h[static_cast<size_t>(i) * nyh + sj];
                kxv = ps_->kx(i);
                kyv = ps_->ky(sj);
            } else {
                const int ic = (nx - i) % nx;
                c = std::conj(U_.h[static_cast<size_t>(ic) * nyh + (-sj)]);
                kxv = -ps_->kx(ic);
                kyv = -ps_->ky(-sj);
            }
            if (ps_->nyquist(i, std::abs(sj)) || std::hypot(kxv - k1(0), kyv - k1(1)) >= band) c = 0.0;
            buf[static_cast<size_t>(i) * ny + jj][0] = c.real();
            buf[static_cast<size_t>(i) * ny + jj][1] = c.imag();
        }
    fftw_execute(plan);
    std::vector<double> prof(nx, 0.0);
    for (int i = 0; i < nx; ++i) {
        double s = 0.0;
        for (int jj = 0; jj < ny; ++jj) {
            const auto& z = buf[static_cast<size_t>(i) * ny + jj];
            s += std::hypot(z[0], z[1]);
        }
        prof[i] = s / ny;
    }
    fftw_destroy_plan(plan);
    fftw_free(buf);
    return prof;
}

Diagnostics Simulator::diagnostics() const {
    Diagnostics d{};
    d.t = t_;
    d.mean_h = 1.0 + U_.h[0].real();
    const int nx = cfg_.grid.nx, ny = cfg_.grid.ny, nyh = ny / 2 + 1;
    double sh = 0.0, st = 0.0;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nyh; ++j) {
            const double w = (j == 0 || (ny % 2 == 0 && j == ny / 2)) ? 1.0 : 2.0;
            const size_t s = static_cast<size_t>(i) * nyh + j;
            sh += w * std::norm(U_.h[s]);
            st += w * std::norm(U_.theta[s]);
        }
    d.l2_h = std::sqrt(sh);
    d.l2_theta = std::sqrt(st);
    for (const auto& ms : mode_slots_) {
        const size_t s = static_cast<size_t>(ms[0]) * nyh + ms[1];
        CVec2 u(U_.h[s], U_.theta[s]);
        if (ms[2]) u = u.conjugate().eval();
        d.A.push_back(project(cfg_.psi, cfg_.phi, u));
    }
    d.front_x = std::numeric_limits<double>::quiet_NaN();
    if (cfg_.track_front) {
        const auto prof = envelope_profile();
        const int imax = static_cast<int>(std::max_element(prof.begin(), prof.end()) - prof.begin());
        const double half = 0.5 * prof[imax];
        for (int s = 1; s < nx; ++s) {
            const int i = (imax + s) % nx, ip = (imax + s - 1) % nx;
            if (prof[i] < half) {
                const double frac = (prof[ip] - half) / (prof[ip] - prof[i]);
                d.front_x = std::fmod(cfg_.grid.Lx * (imax + s - 1 + frac) / nx, cfg_.grid.Lx);
                break;
            }
        }
    }
    return d;
}

SimState step(const SimState& state, const SimConfig& cfg) {
    Simulator sim(cfg, state.field);
    sim.step();
    return {state.t + cfg.dt, sim.field()};
}

RunResult run(const SimConfig& cfg, const GridField& initial, const std::function<void(const Diagnostics&)>& on_output) {
    Simulator sim(cfg, initial);
    RunResult res;
    auto emit = [&] {
        res.series.push_back(sim.diagnostics());
        if (on_output) on_output(res.series.back());
    };
    emit();
    const long nsteps = std::lround(std::ceil(cfg.t_end / cfg.dt - 1e-9));
    for (long n = 1; n <= nsteps; ++n) {
        sim.step();
        if (n % cfg.output_every == 0 || n == nsteps) emit();
    }
    res.final_state = {sim.time(), sim.field()};
    return res;
}

void write_diagnostics_csv(std::ostream& os, const std::vector<Diagnostics>& d) {
    const size_t nA = d.empty() ? 0 : d.front().A.size();
    os << "t,mean_h,l2_h,l2_theta";
    for (size_t a = 0; a < nA; ++a) os << ",re_A" << a + 1 << ",im_A" << a + 1;
    os << ",front_x\n" << std::setprecision(17);
    for (const auto& r : d) {
        os << r.t << ',' << r.mean_h << ',' << r.l2_h << ',' << r.l2_theta;
        for (const auto& a : r.A) os << ',' << a.real() << ',' << a.imag();
        os << ',';
        if (std::isfinite(r.front_x)) os << r.front_x;
        os << '\n';
    }
}

}  // namespace mfilm
