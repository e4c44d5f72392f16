#pragma once

#include <array>
#include <optional>
#include <vector>

#include "json.hpp"
#include "mfilm/coeffs.hpp"
#include "mfilm/grid.hpp"
#include "mfilm/reduced.hpp"

namespace mfilm {

enum class PatternBranch { Roll, Square, HexN, HexPM };
std::string to_string(PatternBranch b);
PatternBranch pattern_branch_from_string(const std::string& s);

LatticeKind lattice_of(PatternBranch b);

// periodic cell that closes every lattice mode: 2pi/k per cell (square), 4pi/k x 4pi/(sqrt3 k) (hexagonal)
Grid natural_cell(LatticeKind kind, double k_star, int nx, int ny, int cells = 1);

struct PatternOptions {
    int sign = +1;                // selects A_+ or A_- for HexPM
    std::optional<double> N0;     // HexPM: defaults to N / sqrt(mu)
    Normalization norm = Normalization::HUnit;
};

struct PatternField {
    GridField field;
    PatternBranch branch;
    double mu = 0, M0 = 0;
    double amplitude = 0;  // coefficient of 2 cos(k_j . x) phi for every active mode
    double k_star = 0;
    CVec2 phi;
    AmplitudeCoefficients coeffs;
    nlohmann::json metadata() const;
};

// leading-order amplitude; BranchError when the branch does not exist
double pattern_amplitude(PatternBranch b, const AmplitudeCoefficients& c, double mu, double M0,
                         const PatternOptions& opt = {});

// grid.Lx/Ly <= 0 select the natural cell
PatternField pattern_field(PatternBranch b, const AmplitudeCoefficients& c, double mu, double M0, const Grid& grid,
                           const PatternOptions& opt = {});
PatternField pattern_field(PatternBranch b, double g, double beta, double mu, double M0, const Grid& grid,
                           const PatternOptions& opt = {});

// Leading-order modulating front V(xi, p) = 1 + eps sum_j A_j(eps^2 xi) e^{i k_j.p} phi + c.c.
class FrontProfile {
public:
    FrontProfile(LatticeKind kind, const HeteroclinicOrbit& orbit, double eps, double c, double k_star,
                 const CVec2& phi, double x_center);

    // real amplitudes of the generator modes (k1, k2, k3); k3 is unused on the square lattice
    std::array<double, 3> amplitudes(double xi) const;
    // (h, theta)
    std::array<double, 2> value(double xi, double x, double y) const;

    LatticeKind kind() const { return kind_; }
    double eps() const { return eps_; }
    double speed() const { return c_; }
    double k_star() const { return k_; }
    double x_center() const { return x_center_; }

private:
    LatticeKind kind_;
    double eps_, c_, k_, x_center_;
    double phi_h_, phi_t_;
    std::vector<double> Xi_;
    std::vector<Vec2> A_;
    Vec2 A_src_, A_tgt_;
    double Xi_mid_;
};

FrontProfile front_profile(LatticeKind kind, const HeteroclinicOrbit& orbit, double eps, double c, double g,
                           double beta, double x_center);
// snapshot at t = 0 (xi = x) centred in the domain; grid.Ly <= 0 selects the natural cell height
GridField front_field(LatticeKind kind, const HeteroclinicOrbit& orbit, double eps, double c, double g, double beta,
                      const Grid& grid);
// domain of about `length` in x rounded to whole lattice periods, natural height
Grid front_grid(LatticeKind kind, double k_star, double length, int nx, int ny);

}  // namespace mfilm
