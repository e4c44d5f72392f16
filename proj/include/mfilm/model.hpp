#pragma once

#include <array>

#include "mfilm/lattice.hpp"
#include "mfilm/linear.hpp"

namespace mfilm {

// (F1, F2) for the perturbation U = (h-1, theta-1); derivatives spectral, products truncated.
// If overflow is given it receives the largest ratio of discarded to retained convolution mass.
LatticeField rhs_full(const LatticeField& U, const FluidParams& p, double* overflow = nullptr);

// Homogeneous parts of F(tU) (degree <= 5) and the symmetric multilinear forms built from them.
class TaylorForms {
public:
    static constexpr int kDegree = 5;

    explicit TaylorForms(const FluidParams& p);

    const FluidParams& params() const { return p_; }

    std::array<LatticeField, kDegree + 1> homogeneous_parts(const LatticeField& U) const;
    LatticeField part(int degree, const LatticeField& U) const;

    LatticeField N2(const LatticeField& U, const LatticeField& V) const;
    LatticeField N3(const LatticeField& U, const LatticeField& V, const LatticeField& W) const;

    // degree d part of a polynomial sampled at the nodes: sum_i weight(d, i) f(node(i))
    double node(int i) const { return nodes_[i]; }
    double weight(int degree, int i) const { return inv_vandermonde_(degree, i); }

private:
    FluidParams p_;
    std::array<double, kDegree + 1> nodes_{};
    Eigen::Matrix<double, kDegree + 1, kDegree + 1> inv_vandermonde_;
};

}  // namespace mfilm
