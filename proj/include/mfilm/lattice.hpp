#pragma once

#include <array>
#include <complex>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace mfilm {

using cplx = std::complex<double>;
using Index = std::array<int, 2>;
using Vec2 = Eigen::Vector2d;
using CVec2 = Eigen::Vector2cd;

enum class LatticeKind { Square, Hexagonal };

std::string to_string(LatticeKind kind);
LatticeKind lattice_kind_from_string(const std::string& s);

struct LatticeSpec {
    LatticeKind kind = LatticeKind::Square;
    double k_star = 1.0;
    int truncation = 8;

    bool operator==(const LatticeSpec& o) const {
        return kind == o.kind && k_star == o.k_star && truncation == o.truncation;
    }
    bool operator!=(const LatticeSpec& o) const { return !(*this == o); }
};

// d(0, n1 k1 + n2 k2); every generator (and k3 = -k1-k2 on the hexagonal lattice) has distance 1
int lattice_distance(const LatticeSpec& spec, Index n);
bool in_truncation(const LatticeSpec& spec, Index n);

// n1 k1 + n2 k2, throws RangeError outside the truncation
Vec2 wavevector(const LatticeSpec& spec, Index n);
// same without the truncation check
Vec2 wavevector_unchecked(const LatticeSpec& spec, Index n);

// index of the j-th generator, j = 1,2 (square) or 1,2,3 (hexagonal); negative j gives -k_|j|
Index generator(const LatticeSpec& spec, int j);

// maps index of k1 onto k2 etc.: 90 degrees on the square lattice, 120 degrees on the hexagonal one
Index rotate_index(LatticeKind kind, Index n, int times = 1);

// Scalar truncated Fourier series over the lattice. Stored densely over the
// index box [-T,T]^2; entries outside the truncation ball are kept at zero.
class Series {
public:
    Series() = default;
    explicit Series(const LatticeSpec& spec);

    const LatticeSpec& spec() const { return spec_; }
    int box() const { return 2 * spec_.truncation + 1; }

    cplx get(Index n) const;
    void set(Index n, cplx value);
    void add(Index n, cplx value);

    Series& operator+=(const Series& o);
    Series& operator-=(const Series& o);
    Series& operator*=(cplx s);
    friend Series operator+(Series a, const Series& b) { return a += b; }
    friend Series operator-(Series a, const Series& b) { return a -= b; }
    friend Series operator*(Series a, cplx s) { return a *= s; }
    friend Series operator*(cplx s, Series a) { return a *= s; }

    // convolution, truncated; |dropped|^2 mass accumulated into *dropped if given
    Series mul(const Series& o, double* dropped = nullptr) const;
    Series dx() const;
    Series dy() const;
    Series laplacian() const;
    Series plus_constant(cplx c) const;

    bool is_zero() const;
    double norm2() const;
    double max_abs() const;
    // c(-n) - conj(c(n)) over all retained n
    double hermitian_defect() const;

    // retained indices in a fixed order (n1 major, then n2)
    const std::vector<Index>& indices() const;

private:
    int slot(Index n) const;
    LatticeSpec spec_;
    std::vector<cplx> c_;
    std::shared_ptr<const std::vector<Index>> idx_;
};

// (h, theta) coefficient pair at every lattice point.
struct LatticeField {
    LatticeSpec spec;
    Series h;
    Series theta;

    LatticeField() = default;
    explicit LatticeField(const LatticeSpec& s) : spec(s), h(s), theta(s) {}

    CVec2 get(Index n) const { return {h.get(n), theta.get(n)}; }
    void set(Index n, const CVec2& v) {
        h.set(n, v(0));
        theta.set(n, v(1));
    }
    void add(Index n, const CVec2& v) {
        h.add(n, v(0));
        theta.add(n, v(1));
    }

    LatticeField& operator+=(const LatticeField& o);
    LatticeField& operator-=(const LatticeField& o);
    LatticeField& operator*=(cplx s);
    friend LatticeField operator+(LatticeField a, const LatticeField& b) { return a += b; }
    friend LatticeField operator-(LatticeField a, const LatticeField& b) { return a -= b; }
    friend LatticeField operator*(cplx s, LatticeField a) { return a *= s; }

    double hermitian_defect() const { return std::max(h.hermitian_defect(), theta.hermitian_defect()); }
    double max_abs() const { return std::max(h.max_abs(), theta.max_abs()); }
    // (n1,n2) -> (-n1,-n2)
    LatticeField reflected() const;
};

// v e^{i gamma_n . x}
LatticeField single_mode(const LatticeSpec& spec, Index n, const CVec2& v);

// pointwise product in physical space, componentwise in (h, theta)
LatticeField field_product(const LatticeField& a, const LatticeField& b);

nlohmann::json to_json(const LatticeField& f);
LatticeField lattice_field_from_json(const nlohmann::json& j);

}  // namespace mfilm
