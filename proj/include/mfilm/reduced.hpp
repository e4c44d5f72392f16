#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mfilm/coeffs.hpp"
#include "mfilm/lattice.hpp"
#include "mfilm/linear.hpp"

namespace mfilm {

struct ReducedParams {
    LatticeKind kind = LatticeKind::Square;
    double c = 1.0;
    double M0 = 1.0;
    double kappa = 1.0;
    double K0 = -1.0;
    double K1 = 0.0;  // square
    double K2 = 0.0;  // hexagonal
    double N0 = 0.0;  // hexagonal, N0 > 0 by convention
    double epsilon = 0.1;

    double M0kappa() const { return M0 * kappa; }
};

void validate(const ReducedParams& rp);
// N0 < 0 is mapped to N0 > 0 by A -> -A
ReducedParams normalised_sign(const ReducedParams& rp);

enum class FixedPointLabel { T, R, S, H1p, H1m, H2p, H2m, MMp, MMm };
std::string to_string(FixedPointLabel l);
FixedPointLabel fixed_point_label_from_string(const std::string& s);

enum class Stability { Stable, Unstable, Saddle };
std::string to_string(Stability s);

struct FixedPointInfo {
    FixedPointLabel label;
    Vec2 position;
    Vec2 eigenvalues;                 // numerical Jacobian, ascending
    std::array<Vec2, 2> eigenvectors;  // unit, matching eigenvalues
    Stability stability;
    std::optional<Vec2> closed_form;  // closed-form eigenvalues, ascending, when available
    double residual;
};

Vec2 square_rhs(const Vec2& A, const ReducedParams& rp);
Vec2 hex_rhs(const Vec2& A, const ReducedParams& rp);
Vec2 reduced_rhs(const Vec2& A, const ReducedParams& rp);
// centred differences
Eigen::Matrix2d numerical_jacobian(const Vec2& A, const ReducedParams& rp, double h = 1e-6);
double lyapunov(const Vec2& A, const ReducedParams& rp);

std::vector<FixedPointInfo> fixed_points(const ReducedParams& rp);
std::optional<FixedPointInfo> find_fixed_point(const ReducedParams& rp, FixedPointLabel label);

struct HeteroclinicOptions {
    double delta0 = 1e-4;
    double tol = 1e-7;
    double xi_cap = 0.0;  // 0 means 1e4 / c
    double max_dxi = 0.05;
    double rtol = 1e-9;
};

struct OrbitSample {
    double xi;
    Vec2 A;
};

struct HeteroclinicOrbit {
    FixedPointInfo source, target;
    std::vector<OrbitSample> samples;
    double convergence_gap;
    std::string method;  // "unstable-manifold", "stable-manifold" or "fan"
    bool energy_decreasing = false;  // Lyapunov function checked along the samples
    bool lyapunov_decreasing() const { return energy_decreasing; }
};

HeteroclinicOrbit heteroclinic(const ReducedParams& rp, FixedPointLabel source, FixedPointLabel target,
                               const HeteroclinicOptions& opt = {});

struct PortraitSpec {
    double a1_min = -1.5, a1_max = 1.5, a2_min = -1.5, a2_max = 1.5;
    int n1 = 7, n2 = 7;
    double xi_max = 40.0;
    double max_dxi = 0.05;
    bool backward = true;
};

struct Trajectory {
    int id;
    int direction;  // +1 forward, -1 backward in xi
    std::vector<OrbitSample> samples;
    std::optional<FixedPointLabel> limit;  // fixed point reached at the end, if any
};

std::vector<Trajectory> phase_portrait(const ReducedParams& rp, const PortraitSpec& spec = {});

// Preset parameter sets for the four square and four hexagonal sign regimes (letters a-d).
ReducedParams square_regime(char regime, double c = 1.0);
// hexagonal regimes built from given K0 < 0, K2, N0 > 0, kappa; regime fixes M0
ReducedParams hex_regime(char regime, double K0, double K2, double N0, double kappa, double c = 1.0);
// connections of the phase-plane diagram for each regime
std::vector<std::pair<FixedPointLabel, FixedPointLabel>> expected_connections(LatticeKind kind, char regime);
// M0 kappa thresholds: mixed modes bifurcate from R, and cross the diagonal
double hex_threshold_R(const ReducedParams& rp);
double hex_threshold_diag(const ReducedParams& rp);

// det(L_{M*}(e1 mu + i k) + c mu I), with M taken from p
cplx spatial_dispersion(double c, cplx mu, const Vec2& k, const FluidParams& p);
// coefficients (ascending powers of mu) and roots of the degree-6 polynomial
std::vector<cplx> spatial_dispersion_poly(double c, const Vec2& k, const FluidParams& p);
std::vector<cplx> spatial_dispersion_roots(double c, const Vec2& k, const FluidParams& p);
// argument-principle count of roots with |Re mu| < half_width
int count_roots_in_strip(double c, const Vec2& k, const FluidParams& p, double half_width);

struct SpectralGapEntry {
    Index n;
    bool central;  // n in {0, +-k1, +-k2}
    int count;      // argument-principle count inside the strip
    int root_count;  // companion-matrix roots inside the strip
    double min_abs_re_root;
};

struct SpectralGapReport {
    double delta;  // smallest nonzero |Re mu| over all sampled k
    std::vector<SpectralGapEntry> entries;
    bool ok() const;
};

SpectralGapReport spectral_gap_check(double g, double beta, double c, LatticeKind kind = LatticeKind::Square,
                                     int max_distance = 4);

}  // namespace mfilm
