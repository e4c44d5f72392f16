#include "mfilm/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>

#include "mfilm/errors.hpp"

namespace mfilm {

std::string to_string(LatticeKind kind) {
    return kind == LatticeKind::Square ? "square" : "hexagonal";
}

LatticeKind lattice_kind_from_string(const std::string& s) {
    if (s == "square" || s == "Square") return LatticeKind::Square;
    if (s == "hexagonal" || s == "hex" || s == "Hexagonal") return LatticeKind::Hexagonal;
    throw UsageError("unknown lattice kind '" + s + "'");
}

int lattice_distance(const LatticeSpec& spec, Index n) {
    const int a = std::abs(n[0]);
    const int b = std::abs(n[1]);
    if (spec.kind == LatticeKind::Square) return a + b;
    // steps along +-k1, +-k2, +-(k1+k2) = -+k3
    return std::max({a, b, std::abs(n[0] - n[1])});
}

bool in_truncation(const LatticeSpec& spec, Index n) {
    return lattice_distance(spec, n) <= spec.truncation;
}

Vec2 wavevector_unchecked(const LatticeSpec& spec, Index n) {
    const double k = spec.k_star;
    if (spec.kind == LatticeKind::Square) return {k * n[0], k * n[1]};
    return {k * (n[0] - 0.5 * n[1]), k * (0.5 * std::sqrt(3.0) * n[1])};
}

Vec2 wavevector(const LatticeSpec& spec, Index n) {
    if (!in_truncation(spec, n))
        throw RangeError("lattice index (" + std::to_string(n[0]) + "," + std::to_string(n[1]) +
                         ") outside truncation " + std::to_string(spec.truncation));
    return wavevector_unchecked(spec, n);
}

Index generator(const LatticeSpec& spec, int j) {
    const int s = j < 0 ? -1 : 1;
    switch (std::abs(j)) {
        case 1: return {s, 0};
        case 2: return {0, s};
        case 3:
            if (spec.kind == LatticeKind::Hexagonal) return {-s, -s};
            break;
        default: break;
    }
    throw UsageError("no generator " + std::to_string(j) + " on the " + to_string(spec.kind) + " lattice");
}

Index rotate_index(LatticeKind kind, Index n, int times) {
    const int period = kind == LatticeKind::Square ? 4 : 3;
    times = ((times % period) + period) % period;
    for (int t = 0; t < times; ++t) {
        if (kind == LatticeKind::Square)
            n = {-n[1], n[0]};
        else
            n = {-n[1], n[0] - n[1]};  // k1 -> k2, k2 -> k3
    }
    return n;
}

namespace {

std::shared_ptr<const std::vector<Index>> index_list(const LatticeSpec& spec) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::shared_ptr<const std::vector<Index>>> cache;
    const auto key = std::make_pair(static_cast<int>(spec.kind), spec.truncation);
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto v = std::make_shared<std::vector<Index>>();
    const int T = spec.truncation;
    for (int a = -T; a <= T; ++a)
        for (int b = -T; b <= T; ++b)
            if (in_truncation(spec, {a, b})) v->push_back({a, b});
    cache[key] = v;
    return v;
}

}  // namespace

Series::Series(const LatticeSpec& spec) : spec_(spec) {
    if (spec.truncation < 0) throw UsageError("negative truncation");
    if (!(spec.k_star > 0)) throw UsageError("k_star must be positive");
    c_.assign(static_cast<size_t>(box() * box()), cplx(0.0, 0.0));
    idx_ = index_list(spec);
}

int Series::slot(Index n) const {
    const int T = spec_.truncation;
    return (n[0] + T) * box() + (n[1] + T);
}

cplx Series::get(Index n) const {
    if (!in_truncation(spec_, n)) return {0.0, 0.0};
    return c_[slot(n)];
}

void Series::set(Index n, cplx value) {
    if (!in_truncation(spec_, n)) throw RangeError("set outside truncation");
    c_[slot(n)] = value;
}

void Series::add(Index n, cplx value) {
    if (!in_truncation(spec_, n)) throw RangeError("add outside truncation");
    c_[slot(n)] += value;
}

Series& Series::operator+=(const Series& o) {
    if (o.spec_ != spec_) throw UsageError("series on different lattices");
    for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

Series& Series::operator-=(const Series& o) {
    if (o.spec_ != spec_) throw UsageError("series on different lattices");
    for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

Series& Series::operator*=(cplx s) {
    for (auto& v : c_) v *= s;
    return *this;
}

Series Series::mul(const Series& o, double* dropped) const {
    if (o.spec_ != spec_) throw UsageError("series on different lattices");
    struct Entry {
        Index n;
        cplx v;
    };
    std::vector<Entry> a, b;
    for (const auto& n : *idx_) {
        const cplx x = c_[slot(n)];
        if (x != 0.0) a.push_back({n, x});
        const cplx y = o.c_[slot(n)];
        if (y != 0.0) b.push_back({n, y});
    }
    Series r(spec_);
    double lost = 0.0;
    for (const auto& ea : a) {
        for (const auto& eb : b) {
            const Index n{ea.n[0] + eb.n[0], ea.n[1] + eb.n[1]};
            const cplx p = ea.v * eb.v;
            if (in_truncation(spec_, n))
                r.c_[r.slot(n)] += p;
            else
                lost += std::norm(p);
        }
    }
    if (dropped) *dropped += lost;
    return r;
}

Series Series::dx() const {
    Series r(spec_);
    for (const auto& n : *idx_) {
        const cplx x = c_[slot(n)];
        if (x == 0.0) continue;
        r.c_[slot(n)] = cplx(0.0, wavevector_unchecked(spec_, n)(0)) * x;
    }
    return r;
}

Series Series::dy() const {
    Series r(spec_);
    for (const auto& n : *idx_) {
        const cplx x = c_[slot(n)];
        if (x == 0.0) continue;
        r.c_[slot(n)] = cplx(0.0, wavevector_unchecked(spec_, n)(1)) * x;
    }
    return r;
}

Series Series::laplacian() const {
    Series r(spec_);
    for (const auto& n : *idx_) {
        const cplx x = c_[slot(n)];
        if (x == 0.0) continue;
        r.c_[slot(n)] = -wavevector_unchecked(spec_, n).squaredNorm() * x;
    }
    return r;
}

Series Series::plus_constant(cplx c) const {
    Series r = *this;
    r.c_[slot({0, 0})] += c;
    return r;
}

bool Series::is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](cplx v) { return v == 0.0; });
}

double Series::norm2() const {
    double s = 0.0;
    for (const auto& v : c_) s += std::norm(v);
    return s;
}

double Series::max_abs() const {
    double m = 0.0;
    for (const auto& v : c_) m = std::max(m, std::abs(v));
    return m;
}

double Series::hermitian_defect() const {
    double d = 0.0;
    for (const auto& n : *idx_) d = std::max(d, std::abs(get({-n[0], -n[1]}) - std::conj(get(n))));
    return d;
}

const std::vector<Index>& Series::indices() const { return *idx_; }

LatticeField& LatticeField::operator+=(const LatticeField& o) {
    if (o.spec != spec) throw UsageError("fields on different lattices");
    h += o.h;
    theta += o.theta;
    return *this;
}

LatticeField& LatticeField::operator-=(const LatticeField& o) {
    if (o.spec != spec) throw UsageError("fields on different lattices");
    h -= o.h;
    theta -= o.theta;
    return *this;
}

LatticeField& LatticeField::operator*=(cplx s) {
    h *= s;
    theta *= s;
    return *this;
}

LatticeField LatticeField::reflected() const {
    LatticeField r(spec);
    for (const auto& n : h.indices()) r.set(n, get({-n[0], -n[1]}));
    return r;
}

LatticeField single_mode(const LatticeSpec& spec, Index n, const CVec2& v) {
    LatticeField f(spec);
    f.set(n, v);
    return f;
}

LatticeField field_product(const LatticeField& a, const LatticeField& b) {
    if (a.spec != b.spec) throw UsageError("field_product: mismatched lattice specs");
    LatticeField r(a.spec);
    r.h = a.h.mul(b.h);
    r.theta = a.theta.mul(b.theta);
    return r;
}

nlohmann::json to_json(const LatticeField& f) {
    nlohmann::json j;
    j["kind"] = to_string(f.spec.kind);
    j["k_star"] = f.spec.k_star;
    j["truncation"] = f.spec.truncation;
    auto arr = nlohmann::json::array();
    for (const auto& n : f.h.indices()) {
        const CVec2 v = f.get(n);
        if (v(0) == 0.0 && v(1) == 0.0) continue;
        arr.push_back({{"n", {n[0], n[1]}},
                       {"h", {v(0).real(), v(0).imag()}},
                       {"theta", {v(1).real(), v(1).imag()}}});
    }
    j["coeffs"] = arr;
    return j;
}

LatticeField lattice_field_from_json(const nlohmann::json& j) {
    LatticeSpec spec;
    spec.kind = lattice_kind_from_string(j.at("kind").get<std::string>());
    spec.k_star = j.at("k_star").get<double>();
    spec.truncation = j.at("truncation").get<int>();
    LatticeField f(spec);
    for (const auto& e : j.at("coeffs")) {
        const Index n{e.at("n")[0].get<int>(), e.at("n")[1].get<int>()};
        const cplx h(e.at("h")[0].get<double>(), e.at("h")[1].get<double>());
        const cplx t(e.at("theta")[0].get<double>(), e.at("theta")[1].get<double>());
        f.set(n, CVec2(h, t));
    }
    return f;
}

}  // namespace mfilm
