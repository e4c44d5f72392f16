#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "mfilm/grid.hpp"
#include "mfilm/lattice.hpp"
#include "mfilm/linear.hpp"

namespace mfilm {

// Perturbation (h-1, theta-1) as normalised r2c coefficients, nx x (ny/2+1), x index major.
struct SpectralField {
    int nx = 0, ny = 0;
    std::vector<cplx> h, theta;

    SpectralField() = default;
    SpectralField(int nx_, int ny_);
    int nyh() const { return ny / 2 + 1; }
    size_t idx(int i, int j) const { return static_cast<size_t>(i) * nyh() + j; }
};

// Grid evaluation of (F1, F2) with zero-padded products.
class PseudoSpectral {
public:
    PseudoSpectral(const Grid& grid, const FluidParams& p, int pad);
    ~PseudoSpectral();
    PseudoSpectral(const PseudoSpectral&) = delete;
    PseudoSpectral& operator=(const PseudoSpectral&) = delete;

    const Grid& grid() const { return grid_; }
    const FluidParams& params() const { return p_; }

    // wave numbers of spectral slot (i, j); Nyquist slots report `nyquist`
    double kx(int i) const;
    double ky(int j) const;
    bool nyquist(int i, int j) const;

    SpectralField to_spectral(const GridField& f) const;
    GridField to_grid(const SpectralField& U) const;
    // physical samples of the perturbation of a single component (h if component == 0)
    std::vector<double> component_to_grid(const std::vector<cplx>& c) const;

    // F(U); with divide_theta the second component is F2/h. min_h receives min over the padded grid.
    SpectralField rhs(const SpectralField& U, bool divide_theta, double* min_h = nullptr) const;

private:
    struct Impl;
    Grid grid_;
    FluidParams p_;
    int pad_;
    std::unique_ptr<Impl> impl_;
};

struct SimConfig {
    Grid grid;
    FluidParams params;
    double dt = 0.05;
    double t_end = 1.0;
    int dealias_pad = 3;
    double h_floor = 0.2;
    int output_every = 20;
    // wave vectors whose amplitudes are tracked; must lie on the grid's Fourier lattice
    std::vector<Vec2> modes;
    // eigenvector and adjoint for the amplitude projection
    CVec2 phi = CVec2(1.0, 1.0);
    CVec2 psi = CVec2(1.0, 0.0);
    bool track_front = false;
};

void validate(const SimConfig& cfg);

struct SimState {
    double t = 0.0;
    GridField field;
};

struct Diagnostics {
    double t;
    double mean_h;
    double l2_h;
    double l2_theta;
    std::vector<cplx> A;
    double front_x;  // NaN unless tracked
};

class Simulator {
public:
    Simulator(const SimConfig& cfg, const GridField& initial);
    Simulator(const SimConfig& cfg, const SpectralField& initial, double t0 = 0.0);

    void step();
    void advance_to(double t_end);
    double time() const { return t_; }
    const SpectralField& spectral() const { return U_; }
    GridField field() const;
    Diagnostics diagnostics() const;
    const PseudoSpectral& evaluator() const { return *ps_; }
    // slow envelope |A_1(x)| of the first tracked mode, averaged in y
    std::vector<double> envelope_profile() const;

private:
    void init();
    SimConfig cfg_;
    std::unique_ptr<PseudoSpectral> ps_;
    SpectralField U_;
    double t_ = 0.0;
    std::vector<Eigen::Matrix2cd> implicit_inv_;
    std::vector<Eigen::Matrix2cd> symbols_;
    std::vector<std::array<int, 3>> mode_slots_;  // (i, j, conjugate flag)
};

SimState step(const SimState& state, const SimConfig& cfg);

struct RunResult {
    std::vector<Diagnostics> series;
    SimState final_state;
};

RunResult run(const SimConfig& cfg, const GridField& initial,
              const std::function<void(const Diagnostics&)>& on_output = nullptr);

void write_diagnostics_csv(std::ostream& os, const std::vector<Diagnostics>& d);

}  // namespace mfilm
