#pragma once

#include <complex>
#include <string>

#include <Eigen/Dense>

#include "mfilm/lattice.hpp"

namespace mfilm {

struct FluidParams {
    double g = 12.0;
    double beta = 0.1865184573;
    double M = 0.0;
};

// throws DomainError unless g > 0, beta > 0, M >= 0
void validate(const FluidParams& p);

struct DispersionCoeffs {
    double a0;
    double a1;
};

struct SpectralRoots {
    cplx lambda_plus;
    cplx lambda_minus;
};

enum class Regime { Monotonic, Oscillatory, Degenerate };
std::string to_string(Regime r);

struct CriticalPoint {
    double M_star;
    double k_star;
    Regime regime;
    // closed-form and direct-minimisation values, kept for cross-checks
    double k_closed;
    double M_closed;
    double k_numeric;
    double M_numeric;
};

enum class Normalization { HUnit, ThetaUnit };
std::string to_string(Normalization n);

enum class Branch { Plus, Minus };

struct ModeVector {
    CVec2 v;
    Normalization norm;
};

struct EigPair {
    cplx lambda;
    ModeVector phi;
};

DispersionCoeffs dispersion_coeffs(double k, const FluidParams& p);
SpectralRoots spectral_roots(double k, const FluidParams& p);

// 2x2 Fourier symbol as a function of the Laplacian symbol s (s = -|k|^2 for real wave vectors)
Eigen::Matrix2cd symbol_of_laplacian(cplx s, const FluidParams& p);
Eigen::Matrix2cd symbol(double k, const FluidParams& p);

double M_monotonic(double k, double g, double beta);
double M_oscillatory(double k, double g, double beta);

CriticalPoint critical_monotonic(double g, double beta);
CriticalPoint critical_oscillatory(double g, double beta);
// critical point of the regime that destabilises first; UsageError if Degenerate
CriticalPoint critical_point(double g, double beta);
Regime classify_regime(double g, double beta);

// eigenpair of the symbol at |k|; falls back to the other normalisation when the requested component is ~0
EigPair eigpair(double k, const FluidParams& p, Branch b, Normalization norm = Normalization::HUnit);
// eigenvector of symbol^H for conj(lambda_b)
ModeVector adjoint_eigvec(double k, const FluidParams& p, Branch b);

// <psi, v> / <psi, phi>, <a,b> = conj(a).b
cplx project(const CVec2& psi, const CVec2& phi, const CVec2& v);
// spectral projection P_b(k) v
CVec2 spectral_projection(double k, const FluidParams& p, Branch b, const CVec2& v);

// d lambda_+ / dM at the monotonic critical point
double kappa(double g, double beta);
double kappa_finite_difference(double g, double beta, double step = 1e-5);

}  // namespace mfilm
