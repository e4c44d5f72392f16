#pragma once

#include <vector>

#include "json.hpp"

#include "mfilm/lattice.hpp"
#include "mfilm/linear.hpp"
#include "mfilm/model.hpp"

namespace mfilm {

struct AmplitudeCoefficients {
    LatticeKind kind = LatticeKind::Square;
    double g = 0, beta = 0, M_star = 0, k_star = 0;
    double kappa = 0;
    double Kc = 0;
    double N = 0;   // hexagonal only
    double K0 = 0;
    double K1 = 0;  // square only
    double K2 = 0;  // hexagonal only
    double nu0 = 0;
    double kappa0 = 0;
    double kappa1 = 0;
    Normalization norm = Normalization::HUnit;
    CVec2 phi;              // critical eigenvector used for every coefficient
    double max_imag = 0.0;  // largest discarded imaginary part

    // max(|K0|, |K1| or |K2|, |N|, |kappa|)
    double scale() const;
};

struct CorrectionVectors {
    CVec2 nu_mean;  // nu0 * phi_-(0), coefficient of |A_j|^2 at the origin
    CVec2 nu_2k1;   // coefficient of A_1^2 at 2k1
    CVec2 nu_k1_plus_k2;   // of A_1 A_2 at k1+k2 (square)
    CVec2 nu_k1_minus_k2;  // of A_1 conj(A_2) at k1-k2
    cplx nu3 = 0.0;        // of conj(A_1) conj(A_2) along phi_-(k*) at k3 (hexagonal)
    double max_residual = 0.0;
};

struct CoefficientResult {
    AmplitudeCoefficients c;
    CorrectionVectors nu;
};

struct CoeffOptions {
    Normalization norm = Normalization::HUnit;
    // evaluate with every lattice index rotated this many times (symmetry check)
    int rotation = 0;
    int truncation = 8;
};

CoefficientResult square_coefficients(double g, double beta, const CoeffOptions& opt = {});
CoefficientResult hex_coefficients(double g, double beta, const CoeffOptions& opt = {});
CoefficientResult lattice_coefficients(LatticeKind kind, double g, double beta, const CoeffOptions& opt = {});

struct ConservationPolynomial {
    double kappa0;
    double kappa1;
};

// p_c(k k^T) = kappa0 + kappa1 k k^T, so that the slow mean-mode part of the quadratic
// h-residual of a modulated mode a(x) e^{ik.x} phi + c.c. is div(p_c grad |a|^2)
ConservationPolynomial conservation_polynomial(double g, double beta, double M, const Vec2& k);

struct ConservationCheck {
    double eps;
    double parallel_numeric;   // kappa0 + kappa1 |k|^2 from modulation along k
    double parallel_predicted;
    double perpendicular_numeric;  // kappa0 from modulation across k
    double perpendicular_predicted;
    double eps_power;  // log-slope of the slow residual norm in the modulation scale
    double max_rel_error() const;
};

// grid evaluation of the slow quadratic h-residual for Gaussian envelopes A(eps x)
ConservationCheck conservation_law_check(double g, double beta, double M, double k, double eps);

double beta_of_g(double g);
// root of beta -> N(beta, g) inside [lo, hi] by bisection; PropertyViolation if no sign change
double beta_root_of_N(double g, double lo, double hi, double tol = 1e-10);
// sign changes of N on a log grid of beta in the monotonic regime, refined by bisection
std::vector<double> N_roots_in_beta(double g, int samples = 60);
double K0_on_curve(double g);
double K0_sign_change_on_curve(double lo = 8.0, double hi = 12.0);

enum class PatternKind { Rolls, Squares, Hexagons };

struct ResidualFit {
    PatternKind pattern;
    double delta;      // M - M*
    std::vector<double> poly;  // poly[d] = coefficient of A^d, d = 0..10
    double kappa_fit;  // poly[1] / delta
    double quadratic_fit;
    double cubic_fit;
    double kappa_expected;
    double quadratic_expected;  // N for hexagons, 0 otherwise
    double cubic_expected;      // K0, K0+K1 or K0+2K2
    double rel_error() const;
};

// projects F at M*+delta of the quadratic ansatz with real amplitude A onto phi_+(k1)
// and fits the (exactly polynomial) result in A
ResidualFit residual_fit(PatternKind pattern, double g, double beta, double delta = 1e-6);

nlohmann::json to_json(const AmplitudeCoefficients& c);
nlohmann::json to_json(const CorrectionVectors& nu);

}  // namespace mfilm
