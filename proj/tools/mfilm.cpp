#include <algorithm>
#include <charconv>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "mfilm/acceptance.hpp"
#include "mfilm/coeffs.hpp"
#include "mfilm/errors.hpp"
#include "mfilm/grid.hpp"
#include "mfilm/linear.hpp"
#include "mfilm/reconstruct.hpp"
#include "mfilm/reduced.hpp"
#include "mfilm/simulator.hpp"

#ifndef MFILM_VERSION
#define MFILM_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mfilm;

namespace {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr double kBetaReference = 0.1865184573;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// default text for option help and manifests; shortest round-trip form for floating point
template <class T>
std::string default_text(const T& v) {
    if constexpr (std::is_floating_point_v<T>) {
        char buf[40];
        const auto r = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, r.ptr);
    } else {
        std::ostringstream os;
        os << v;
        return os.str();
    }
}

class Output {
public:
    Output(std::string dir, std::string command) : dir_(std::move(dir)), command_(std::move(command)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec || !fs::is_directory(dir_)) throw IoError("cannot create output directory '" + dir_ + "'");
    }

    std::ofstream open(const std::string& name) {
        const std::string path = (fs::path(dir_) / name).string();
        std::ofstream os(path);
        if (!os) throw IoError("cannot write '" + path + "'");
        os.precision(17);
        files_.push_back(name);
        return os;
    }

    std::string path(const std::string& name) {
        files_.push_back(name);
        return (fs::path(dir_) / name).string();
    }

    void json_file(const std::string& name, const json& j) {
        auto os = open(name);
        os << j.dump(2) << "\n";
        if (!os) throw IoError("write failed for '" + name + "'");
    }

    void manifest(const CLI::App* sub, const json& extra = json::object()) {
        json params = json::object();
        for (const CLI::Option* o : sub->get_options()) {
            if (o->get_name() == "--help" || o->get_name().empty()) continue;
            std::string key = o->get_lnames().empty() ? o->get_name() : o->get_lnames().front();
            if (o->count() > 0) {
                const auto& r = o->results();
                params[key] = r.size() == 1 ? json(r.front()) : json(r);
            } else {
                params[key] = o->get_default_str();
            }
        }
        json m{{"command", command_}, {"version", MFILM_VERSION}, {"parameters", params}, {"outputs", files_}};
        for (auto& [k, v] : extra.items()) m[k] = v;
        json_file(command_ + "_manifest.json", m);
    }

private:
    std::string dir_, command_;
    std::vector<std::string> files_;
};

int thread_count() {
    if (const char* e = std::getenv("MFILM_THREADS")) {
        const int n = std::atoi(e);
        if (n > 0) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

Normalization norm_from(const std::string& s) {
    if (s == "h") return Normalization::HUnit;
    if (s == "theta") return Normalization::ThetaUnit;
    throw UsageError("normalization must be 'h' or 'theta'");
}

void write_field(Output& out, const std::string& stem, const GridField& f, const std::string& format) {
    if (format == "csv") {
        auto os = out.open(stem + ".csv");
        write_csv(os, f);
        if (!os) throw IoError("write failed for '" + stem + ".csv'");
    } else if (format == "binary") {
        const std::string p = out.path(stem + ".bin");
        out.path(stem + ".bin.json");
        try {
            write_binary(p, f);
        } catch (const std::exception& e) {
            throw IoError(e.what());
        }
    } else {
        throw UsageError("format must be 'csv' or 'binary'");
    }
}

void write_orbit(std::ostream& os, const HeteroclinicOrbit& o) {
    os << "xi,a1,a2\n";
    for (const auto& s : o.samples) os << num(s.xi) << ',' << num(s.A(0)) << ',' << num(s.A(1)) << '\n';
}

json fixed_point_json(const FixedPointInfo& fp) {
    json j{{"label", to_string(fp.label)},
           {"a1", fp.position(0)},
           {"a2", fp.position(1)},
           {"lambda1", fp.eigenvalues(0)},
           {"lambda2", fp.eigenvalues(1)},
           {"stability", to_string(fp.stability)},
           {"residual", fp.residual}};
    if (fp.closed_form) j["closed_form"] = {(*fp.closed_form)(0), (*fp.closed_form)(1)};
    return j;
}

// Reduced-system parameters shared by phaseplane and front.
struct ReducedArgs {
    std::string lattice = "square";
    std::string regime = "b";
    double c = 1.0;
    double g_hex = 14.0;
    double N0 = 1.0;
    std::optional<double> M0, kappa, K0, K1, K2;

    void add(CLI::App* s) {
        s->add_option("--lattice", lattice, "square or hex")->default_str(default_text(lattice));
        s->add_option("--regime", regime, "sign regime a, b, c or d")->default_str(default_text(regime));
        s->add_option("--c", c, "front speed")->default_str(default_text(c));
        s->add_option("--hex-g", g_hex, "g on the N = 0 curve supplying K0, K2, kappa (hex)")->default_str(default_text(g_hex));
        s->add_option("--N0", N0, "scaled quadratic coefficient (hex)")->default_str(default_text(N0));
        s->add_option("--M0", M0, "override M0");
        s->add_option("--kappa", kappa, "override kappa");
        s->add_option("--K0", K0, "override K0");
        s->add_option("--K1", K1, "override K1 (square)");
        s->add_option("--K2", K2, "override K2 (hex)");
    }

    ReducedParams build() const {
        const LatticeKind kind = lattice_kind_from_string(lattice);
        if (regime.size() != 1) throw UsageError("regime must be a single letter a-d");
        ReducedParams rp;
        if (kind == LatticeKind::Square) {
            rp = square_regime(regime[0], c);
        } else {
            const auto b = hex_reduced_base(g_hex);
            rp = hex_regime(regime[0], K0.value_or(b.K0), K2.value_or(b.K2), N0, kappa.value_or(b.kappa), c);
        }
        if (M0) rp.M0 = *M0;
        if (kappa) rp.kappa = *kappa;
        if (K0) rp.K0 = *K0;
        if (K1) rp.K1 = *K1;
        if (K2) rp.K2 = *K2;
        validate(rp);
        return rp;
    }
};

json reduced_json(const ReducedParams& rp) {
    json j{{"lattice", to_string(rp.kind)}, {"c", rp.c}, {"M0", rp.M0}, {"kappa", rp.kappa}, {"K0", rp.K0}};
    if (rp.kind == LatticeKind::Square) {
        j["K1"] = rp.K1;
    } else {
        j["K2"] = rp.K2;
        j["N0"] = rp.N0;
        j["threshold_R"] = hex_threshold_R(rp);
        j["threshold_diag"] = hex_threshold_diag(rp);
    }
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bifurcation analysis and simulation of the long-wave thermocapillary thin-film model"};
    app.set_version_flag("--version", MFILM_VERSION);
    app.set_config("--config", "", "TOML/INI configuration file; flags override it");
    app.require_subcommand(1);
    std::string out_dir = ".";
    app.add_option("--out", out_dir, "output directory")->default_str(default_text(out_dir));

    // dispersion
    auto* dispersion = app.add_subcommand("dispersion", "growth rates lambda_+-(k) on a k grid");
    double d_g = 12.0, d_beta = kBetaReference, d_kmax = 4.0;
    std::optional<double> d_M;
    int d_n = 401;
    dispersion->add_option("--g", d_g, "gravity number")->default_str(default_text(d_g));
    dispersion->add_option("--beta", d_beta, "Biot number")->default_str(default_text(d_beta));
    dispersion->add_option("--M", d_M, "Marangoni number (default: critical)");
    dispersion->add_option("--k-max", d_kmax)->default_str(default_text(d_kmax));
    dispersion->add_option("--n", d_n, "grid points")->default_str(default_text(d_n))->check(CLI::Range(2, 1000000));

    // critical
    auto* critical = app.add_subcommand("critical", "critical Marangoni number and wave number");
    double c_g = 12.0, c_beta = kBetaReference;
    critical->add_option("--g", c_g)->default_str(default_text(c_g));
    critical->add_option("--beta", c_beta)->default_str(default_text(c_beta));

    // coeffs
    auto* coeffs = app.add_subcommand("coeffs", "amplitude-equation coefficients");
    double k_g = 12.0, k_beta = kBetaReference;
    bool k_on_curve = false;
    std::string k_lattice = "square", k_norm = "h";
    int k_trunc = 8;
    coeffs->add_option("--g", k_g)->default_str(default_text(k_g));
    coeffs->add_option("--beta", k_beta)->default_str(default_text(k_beta));
    coeffs->add_flag("--beta-on-curve", k_on_curve, "use beta on the N = 0 curve");
    coeffs->add_option("--lattice", k_lattice, "square or hex")->default_str(default_text(k_lattice));
    coeffs->add_option("--norm", k_norm, "eigenvector normalisation: h or theta")->default_str(default_text(k_norm));
    coeffs->add_option("--truncation", k_trunc)->default_str(default_text(k_trunc))->check(CLI::Range(4, 40));

    // coeffmap
    auto* coeffmap = app.add_subcommand("coeffmap", "coefficients on a (g, beta) grid");
    std::string m_lattice = "square";
    double m_gmin = 0.5, m_gmax = 20.0, m_bmin = 0.05, m_bmax = 10.0;
    int m_ng = 40, m_nb = 40;
    coeffmap->add_option("--lattice", m_lattice)->default_str(default_text(m_lattice));
    coeffmap->add_option("--g-min", m_gmin)->default_str(default_text(m_gmin));
    coeffmap->add_option("--g-max", m_gmax)->default_str(default_text(m_gmax));
    coeffmap->add_option("--ng", m_ng)->default_str(default_text(m_ng))->check(CLI::Range(1, 100000));
    coeffmap->add_option("--beta-min", m_bmin)->default_str(default_text(m_bmin));
    coeffmap->add_option("--beta-max", m_bmax)->default_str(default_text(m_bmax));
    coeffmap->add_option("--nb", m_nb)->default_str(default_text(m_nb))->check(CLI::Range(1, 100000));

    // patterns
    auto* patterns = app.add_subcommand("patterns", "leading-order pattern fields");
    std::string p_kind = "roll", p_format = "csv";
    double p_g = 12.0, p_beta = kBetaReference, p_mu = 1e-3, p_M0 = 1.0;
    int p_nx = 64, p_ny = 64, p_sign = 1;
    std::optional<double> p_N0;
    patterns->add_option("--pattern", p_kind, "roll, square, hexN or hexPM")->default_str(default_text(p_kind));
    patterns->add_option("--g", p_g)->default_str(default_text(p_g));
    patterns->add_option("--beta", p_beta)->default_str(default_text(p_beta));
    patterns->add_option("--mu", p_mu)->default_str(default_text(p_mu));
    patterns->add_option("--M0", p_M0)->default_str(default_text(p_M0));
    patterns->add_option("--nx", p_nx)->default_str(default_text(p_nx));
    patterns->add_option("--ny", p_ny)->default_str(default_text(p_ny));
    patterns->add_option("--sign", p_sign, "+1 or -1 branch of hexPM")->default_str(default_text(p_sign));
    patterns->add_option("--N0", p_N0, "hexPM scaled quadratic coefficient (default N/sqrt(mu))");
    patterns->add_option("--format", p_format, "csv or binary")->default_str(default_text(p_format));

    // phaseplane
    auto* phaseplane = app.add_subcommand("phaseplane", "fixed points, trajectories and heteroclinic orbits");
    ReducedArgs pp;
    pp.add(phaseplane);
    int pp_n = 9;
    double pp_range = 0.0, pp_ximax = 40.0;
    phaseplane->add_option("--n", pp_n, "seed grid points per axis")->default_str(default_text(pp_n));
    phaseplane->add_option("--range", pp_range, "half-width of the seed box (default from the fixed points)");
    phaseplane->add_option("--xi-max", pp_ximax)->default_str(default_text(pp_ximax));

    // front
    auto* front = app.add_subcommand("front", "heteroclinic orbit and leading-order front field");
    ReducedArgs fr;
    fr.add(front);
    std::string f_src = "T", f_tgt = "R", f_format = "csv";
    double f_eps = 0.1, f_g = 12.0, f_beta = kBetaReference, f_length = 0.0;
    int f_nx = 512, f_ny = 16;
    front->add_option("--source", f_src)->default_str(default_text(f_src));
    front->add_option("--target", f_tgt)->default_str(default_text(f_tgt));
    front->add_option("--eps", f_eps)->default_str(default_text(f_eps));
    front->add_option("--g", f_g, "fluid g for the field (hex default: --hex-g)");
    front->add_option("--beta", f_beta, "fluid beta for the field (hex default: on the curve)");
    front->add_option("--length", f_length, "domain length (default from the orbit)");
    front->add_option("--nx", f_nx)->default_str(default_text(f_nx));
    front->add_option("--ny", f_ny)->default_str(default_text(f_ny));
    front->add_option("--format", f_format)->default_str(default_text(f_format));

    // simulate
    auto* simulate = app.add_subcommand("simulate", "pseudo-spectral time integration");
    std::string s_lattice = "square", s_init = "random", s_file;
    double s_g = 12.0, s_beta = kBetaReference, s_dM = 0.0, s_dt = 0.05, s_tend = 10.0, s_amp = 1e-4, s_floor = 0.2;
    std::optional<double> s_M, s_Lx, s_Ly;
    int s_nx = 32, s_ny = 32, s_cells = 1, s_pad = 3, s_every = 20;
    unsigned s_seed = 1;
    simulate->add_option("--g", s_g)->default_str(default_text(s_g));
    simulate->add_option("--beta", s_beta)->default_str(default_text(s_beta));
    simulate->add_option("--M", s_M, "Marangoni number (default: critical + dM)");
    simulate->add_option("--dM", s_dM, "offset from the critical Marangoni number")->default_str(default_text(s_dM));
    simulate->add_option("--lattice", s_lattice, "cell shape: square or hex")->default_str(default_text(s_lattice));
    simulate->add_option("--cells", s_cells)->default_str(default_text(s_cells));
    simulate->add_option("--nx", s_nx)->default_str(default_text(s_nx));
    simulate->add_option("--ny", s_ny)->default_str(default_text(s_ny));
    simulate->add_option("--Lx", s_Lx);
    simulate->add_option("--Ly", s_Ly);
    simulate->add_option("--dt", s_dt)->default_str(default_text(s_dt));
    simulate->add_option("--t-end", s_tend)->default_str(default_text(s_tend));
    simulate->add_option("--pad", s_pad, "dealiasing padding factor 1-3")->default_str(default_text(s_pad));
    simulate->add_option("--h-floor", s_floor)->default_str(default_text(s_floor));
    simulate->add_option("--output-every", s_every)->default_str(default_text(s_every));
    simulate->add_option("--init", s_init, "flat, random, mode or file")->default_str(default_text(s_init));
    simulate->add_option("--init-file", s_file, "CSV field (x,y,h,theta) for --init file");
    simulate->add_option("--amp", s_amp)->default_str(default_text(s_amp));
    simulate->add_option("--seed", s_seed)->default_str(default_text(s_seed));

    // verify
    auto* verify = app.add_subcommand("verify", "run the acceptance checks");
    std::vector<std::string> v_only;
    verify->add_option("--only", v_only, "criterion ids");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*dispersion) {
            const FluidParams base{d_g, d_beta, 0.0};
            validate(base);
            const double M = d_M ? *d_M : critical_point(d_g, d_beta).M_star;
            const FluidParams p{d_g, d_beta, M};
            validate(p);
            Output out(out_dir, "dispersion");
            auto os = out.open("dispersion.csv");
            os << "k,re_lambda_plus,im_lambda_plus,re_lambda_minus,im_lambda_minus\n";
            for (int i = 0; i < d_n; ++i) {
                const double k = d_kmax * i / (d_n - 1);
                const auto r = spectral_roots(k, p);
                os << num(k) << ',' << num(r.lambda_plus.real()) << ',' << num(r.lambda_plus.imag()) << ','
                   << num(r.lambda_minus.real()) << ',' << num(r.lambda_minus.imag()) << '\n';
            }
            json meta{{"g", d_g}, {"beta", d_beta}, {"M", M}, {"regime", to_string(classify_regime(d_g, d_beta))}};
            if (classify_regime(d_g, d_beta) != Regime::Degenerate) meta["k_star"] = critical_point(d_g, d_beta).k_star;
            out.json_file("dispersion.json", meta);
            out.manifest(dispersion);
        } else if (*critical) {
            validate(FluidParams{c_g, c_beta, 0.0});
            const Regime r = classify_regime(c_g, c_beta);
            json j{{"g", c_g}, {"beta", c_beta}, {"regime", to_string(r)}};
            if (c_beta < 72) {
                const auto m = critical_monotonic(c_g, c_beta);
                j["monotonic"] = {{"M_star", m.M_star}, {"k_star", m.k_star}, {"M_closed", m.M_closed},
                                  {"k_closed", m.k_closed}};
            }
            const auto o = critical_oscillatory(c_g, c_beta);
            j["oscillatory"] = {{"M_star", o.M_star}, {"k_star", o.k_star}, {"M_closed", o.M_closed}};
            if (r != Regime::Degenerate) {
                const auto cp = critical_point(c_g, c_beta);
                j["M_star"] = cp.M_star;
                j["k_star"] = cp.k_star;
            }
            Output out(out_dir, "critical");
            out.json_file("critical.json", j);
            out.manifest(critical);
            std::cout << j.dump(2) << "\n";
        } else if (*coeffs) {
            const double beta = k_on_curve ? beta_of_g(k_g) : k_beta;
            CoeffOptions opt;
            opt.norm = norm_from(k_norm);
            opt.truncation = k_trunc;
            const auto res = lattice_coefficients(lattice_kind_from_string(k_lattice), k_g, beta, opt);
            json j = to_json(res.c);
            j["corrections"] = to_json(res.nu);
            Output out(out_dir, "coeffs");
            out.json_file("coeffs.json", j);
            out.manifest(coeffs);
            std::cout << j.dump(2) << "\n";
        } else if (*coeffmap) {
            const LatticeKind kind = lattice_kind_from_string(m_lattice);
            const size_t n = static_cast<size_t>(m_ng) * m_nb;
            std::vector<std::string> rows(n);
            std::atomic<size_t> next{0};
            auto work = [&] {
                for (size_t i; (i = next++) < n;) {
                    const double g = m_ng > 1 ? m_gmin + (m_gmax - m_gmin) * (i / m_nb) / (m_ng - 1) : m_gmin;
                    const double b = m_nb > 1 ? m_bmin + (m_bmax - m_bmin) * (i % m_nb) / (m_nb - 1) : m_bmin;
                    std::string row = num(g) + ',' + num(b) + ',';
                    const Regime r = b < 72 ? classify_regime(g, b) : Regime::Oscillatory;
                    row += to_string(r);
                    if (r == Regime::Monotonic) {
                        try {
                            const auto c = lattice_coefficients(kind, g, b).c;
                            row += ',' + num(c.M_star) + ',' + num(c.k_star) + ',' + num(c.kappa) + ',' +
                                   num(kind == LatticeKind::Hexagonal ? c.N : 0.0) + ',' + num(c.K0) + ',' +
                                   num(kind == LatticeKind::Square ? c.K1 : c.K2);
                        } catch (const std::exception&) {
                            row += ",nan,nan,nan,nan,nan,nan";
                        }
                    } else {
                        row += ",nan,nan,nan,nan,nan,nan";
                    }
                    rows[i] = row;
                }
            };
            std::vector<std::thread> pool;
            const int nt = std::min<int>(thread_count(), static_cast<int>(n));
            for (int t = 1; t < nt; ++t) pool.emplace_back(work);
            work();
            for (auto& t : pool) t.join();
            Output out(out_dir, "coeffmap");
            auto os = out.open("coeffmap.csv");
            os << "g,beta,regime,M_star,k_star,kappa,N,K0," << (kind == LatticeKind::Square ? "K1" : "K2") << "\n";
            for (const auto& r : rows) os << r << '\n';
            if (kind == LatticeKind::Hexagonal) {
                auto cs = out.open("curve.csv");
                cs << "g,beta,N,K0,K2\n";
                for (int i = 1; i < 180; ++i) {
                    const double g = 0.1 * i;
                    const double b = beta_of_g(g);
                    const auto c = hex_coefficients(g, b).c;
                    cs << num(g) << ',' << num(b) << ',' << num(c.N) << ',' << num(c.K0) << ',' << num(c.K2) << '\n';
                }
            }
            out.manifest(coeffmap);
        } else if (*patterns) {
            PatternOptions opt;
            opt.sign = p_sign;
            opt.N0 = p_N0;
            Grid grid;
            grid.nx = p_nx;
            grid.ny = p_ny;
            grid.Lx = grid.Ly = 0.0;
            const auto pf = pattern_field(pattern_branch_from_string(p_kind), p_g, p_beta, p_mu, p_M0, grid, opt);
            Output out(out_dir, "patterns");
            write_field(out, "pattern", pf.field, p_format);
            out.json_file("pattern.json", pf.metadata());
            out.manifest(patterns);
        } else if (*phaseplane) {
            const ReducedParams rp = pp.build();
            const auto fps = fixed_points(rp);
            double R = pp_range;
            if (!(R > 0)) {
                R = 0.5;
                for (const auto& fp : fps) R = std::max(R, 1.3 * fp.position.cwiseAbs().maxCoeff());
            }
            PortraitSpec spec;
            spec.a1_min = spec.a2_min = -R;
            spec.a1_max = spec.a2_max = R;
            spec.n1 = spec.n2 = pp_n;
            spec.xi_max = pp_ximax;
            const auto traj = phase_portrait(rp, spec);
            Output out(out_dir, "phaseplane");
            {
                auto os = out.open("fixed_points.csv");
                os << "label,a1,a2,lambda1,lambda2,stability\n";
                for (const auto& fp : fps)
                    os << to_string(fp.label) << ',' << num(fp.position(0)) << ',' << num(fp.position(1)) << ','
                       << num(fp.eigenvalues(0)) << ',' << num(fp.eigenvalues(1)) << ',' << to_string(fp.stability)
                       << '\n';
            }
            {
                auto os = out.open("trajectories.csv");
                os << "id,direction,xi,a1,a2\n";
                for (const auto& t : traj)
                    for (const auto& s : t.samples)
                        os << t.id << ',' << t.direction << ',' << num(s.xi) << ',' << num(s.A(0)) << ','
                           << num(s.A(1)) << '\n';
            }
            json conns = json::array();
            {
                auto os = out.open("connections.csv");
                os << "source,target,xi,a1,a2\n";
                if (!pp.M0 && !pp.kappa && !pp.K0 && !pp.K1 && !pp.K2 && pp.regime.size() == 1) {
                    for (const auto& [s, t] : expected_connections(rp.kind, pp.regime[0])) {
                        json c{{"source", to_string(s)}, {"target", to_string(t)}};
                        try {
                            const auto o = heteroclinic(rp, s, t);
                            c["found"] = true;
                            c["gap"] = o.convergence_gap;
                            c["method"] = o.method;
                            c["lyapunov_decreasing"] = o.lyapunov_decreasing();
                            for (const auto& smp : o.samples)
                                os << to_string(s) << ',' << to_string(t) << ',' << num(smp.xi) << ','
                                   << num(smp.A(0)) << ',' << num(smp.A(1)) << '\n';
                        } catch (const ConnectionNotFound& e) {
                            c["found"] = false;
                            c["error"] = e.what();
                        }
                        conns.push_back(c);
                    }
                }
            }
            json fj = json::array();
            for (const auto& fp : fps) fj.push_back(fixed_point_json(fp));
            out.json_file("phaseplane.json", {{"params", reduced_json(rp)}, {"fixed_points", fj}, {"connections", conns}});
            out.manifest(phaseplane);
        } else if (*front) {
            const ReducedParams rp = fr.build();
            const auto src = fixed_point_label_from_string(f_src), tgt = fixed_point_label_from_string(f_tgt);
            const auto orbit = heteroclinic(rp, src, tgt);
            const LatticeKind kind = rp.kind;
            double g = f_g, beta = f_beta;
            if (kind == LatticeKind::Hexagonal && front->count("--g") == 0) g = fr.g_hex;
            if (kind == LatticeKind::Hexagonal && front->count("--beta") == 0) beta = beta_of_g(g);
            const double k = critical_monotonic(g, beta).k_star;
            double length = f_length;
            if (!(length > 0)) {
                const double span = orbit.samples.back().xi - orbit.samples.front().xi;
                length = 2.0 * span / (f_eps * f_eps);
            }
            const Grid grid = front_grid(kind, k, length, f_nx, f_ny);
            const GridField field = front_field(kind, orbit, f_eps, rp.c, g, beta, grid);
            Output out(out_dir, "front");
            {
                auto os = out.open("orbit.csv");
                write_orbit(os, orbit);
            }
            write_field(out, "front", field, f_format);
            out.json_file("front.json", {{"params", reduced_json(rp)},
                                         {"source", fixed_point_json(orbit.source)},
                                         {"target", fixed_point_json(orbit.target)},
                                         {"gap", orbit.convergence_gap},
                                         {"method", orbit.method},
                                         {"lyapunov_decreasing", orbit.lyapunov_decreasing()},
                                         {"eps", f_eps},
                                         {"g", g},
                                         {"beta", beta},
                                         {"k_star", k},
                                         {"Lx", grid.Lx},
                                         {"Ly", grid.Ly}});
            out.manifest(front);
        } else if (*simulate) {
            const auto cp = critical_monotonic(s_g, s_beta);
            SimConfig cfg;
            cfg.params = FluidParams{s_g, s_beta, s_M ? *s_M : cp.M_star + s_dM};
            validate(cfg.params);
            const LatticeKind kind = lattice_kind_from_string(s_lattice);
            cfg.grid = natural_cell(kind, cp.k_star, s_nx, s_ny, s_cells);
            if (s_Lx) cfg.grid.Lx = *s_Lx;
            if (s_Ly) cfg.grid.Ly = *s_Ly;
            cfg.dt = s_dt;
            cfg.t_end = s_tend;
            cfg.dealias_pad = s_pad;
            cfg.h_floor = s_floor;
            cfg.output_every = s_every;
            const double kx = 2 * M_PI * std::round(cp.k_star * cfg.grid.Lx / (2 * M_PI)) / cfg.grid.Lx;
            const auto ep = eigpair(kx, cfg.params, Branch::Plus);
            cfg.modes = {Vec2(kx, 0.0)};
            cfg.phi = ep.phi.v;
            cfg.psi = adjoint_eigvec(kx, cfg.params, Branch::Plus).v;
            validate(cfg);
            GridField init(cfg.grid.nx, cfg.grid.ny, cfg.grid.Lx, cfg.grid.Ly);
            if (s_init == "random") {
                std::mt19937 rng(s_seed);
                std::normal_distribution<double> nd(0.0, s_amp);
                for (auto& v : init.h) v += nd(rng);
                for (auto& v : init.theta) v += nd(rng);
            } else if (s_init == "mode") {
                for (int i = 0; i < init.nx; ++i)
                    for (int j = 0; j < init.ny; ++j) {
                        const double c = 2 * s_amp * std::cos(kx * init.x(i));
                        init.h[init.idx(i, j)] += c * ep.phi.v(0).real();
                        init.theta[init.idx(i, j)] += c * ep.phi.v(1).real();
                    }
            } else if (s_init == "file") {
                std::ifstream is(s_file);
                if (!is) throw IoError("cannot read '" + s_file + "'");
                init = read_csv(is, cfg.grid.nx, cfg.grid.ny, cfg.grid.Lx, cfg.grid.Ly);
            } else if (s_init != "flat") {
                throw UsageError("init must be flat, random, mode or file");
            }
            const auto res = run(cfg, init);
            Output out(out_dir, "simulate");
            {
                auto os = out.open("diagnostics.csv");
                write_diagnostics_csv(os, res.series);
            }
            write_field(out, "final", res.final_state.field, "csv");
            out.manifest(simulate, {{"seed", s_seed}, {"M", cfg.params.M}, {"Lx", cfg.grid.Lx}, {"Ly", cfg.grid.Ly}});
        } else if (*verify) {
            AcceptanceOptions opt;
            opt.only = v_only;
            bool all = true;
            json rows = json::array();
            run_acceptance(opt, [&](const CriterionResult& r) {
                std::cout << format_result_line(r) << std::endl;
                all = all && r.pass;
                rows.push_back(to_json(r));
            });
            Output out(out_dir, "verify");
            out.json_file("verify.json", rows);
            out.manifest(verify);
            return all ? 0 : 1;
        }
    } catch (const IoError& e) {
        std::cerr << "error [io]: " << e.what() << "\n";
        return 3;
    } catch (const DomainError& e) {
        std::cerr << "error [domain]: " << e.what() << "\n";
        return 2;
    } catch (const RangeError& e) {
        std::cerr << "error [range]: " << e.what() << "\n";
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "error [usage]: " << e.what() << "\n";
        return 2;
    } catch (const BranchError& e) {
        std::cerr << "error [branch]: " << e.what() << "\n";
        return 2;
    } catch (const DegenerateEigenvalueError& e) {
        std::cerr << "error [degenerate eigenvalue]: " << e.what() << "\n";
        return 2;
    } catch (const ConnectionNotFound& e) {
        std::cerr << "error [connection not found]: " << e.what() << "\n";
        return 4;
    } catch (const SimulationAbort& e) {
        std::cerr << "error [simulation abort]: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
