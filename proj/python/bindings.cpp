#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mfilm/acceptance.hpp"
#include "mfilm/coeffs.hpp"
#include "mfilm/errors.hpp"
#include "mfilm/linear.hpp"
#include "mfilm/reconstruct.hpp"
#include "mfilm/reduced.hpp"
#include "mfilm/simulator.hpp"

namespace py = pybind11;
using namespace mfilm;

namespace {

py::object from_json(const nlohmann::json& j) {
    switch (j.type()) {
        case nlohmann::json::value_t::null: return py::none();
        case nlohmann::json::value_t::boolean: return py::bool_(j.get<bool>());
        case nlohmann::json::value_t::number_integer: return py::int_(j.get<long long>());
        case nlohmann::json::value_t::number_unsigned: return py::int_(j.get<unsigned long long>());
        case nlohmann::json::value_t::number_float: return py::float_(j.get<double>());
        case nlohmann::json::value_t::string: return py::str(j.get<std::string>());
        case nlohmann::json::value_t::array: {
            py::list l;
            for (const auto& e : j) l.append(from_json(e));
            return std::move(l);
        }
        default: {
            py::dict d;
            for (auto it = j.begin(); it != j.end(); ++it) d[py::str(it.key())] = from_json(it.value());
            return std::move(d);
        }
    }
}

// (nx, ny) arrays of h and theta
py::tuple field_arrays(const GridField& f) {
    py::array_t<double> h({f.nx, f.ny}), th({f.nx, f.ny});
    std::copy(f.h.begin(), f.h.end(), h.mutable_data());
    std::copy(f.theta.begin(), f.theta.end(), th.mutable_data());
    return py::make_tuple(h, th);
}

GridField field_from_arrays(py::array_t<double, py::array::c_style | py::array::forcecast> h,
                            py::array_t<double, py::array::c_style | py::array::forcecast> theta, double Lx,
                            double Ly) {
    if (h.ndim() != 2 || theta.ndim() != 2 || h.shape(0) != theta.shape(0) || h.shape(1) != theta.shape(1))
        throw UsageError("h and theta must be 2-d arrays of equal shape");
    GridField f(static_cast<int>(h.shape(0)), static_cast<int>(h.shape(1)), Lx, Ly);
    std::copy(h.data(), h.data() + h.size(), f.h.begin());
    std::copy(theta.data(), theta.data() + theta.size(), f.theta.begin());
    return f;
}

py::dict fixed_point_dict(const FixedPointInfo& fp) {
    py::dict d;
    d["label"] = to_string(fp.label);
    d["position"] = fp.position;
    d["eigenvalues"] = fp.eigenvalues;
    d["stability"] = to_string(fp.stability);
    d["residual"] = fp.residual;
    if (fp.closed_form) d["closed_form"] = *fp.closed_form;
    return d;
}

py::array_t<double> samples_array(const std::vector<OrbitSample>& s) {
    py::array_t<double> a({static_cast<py::ssize_t>(s.size()), py::ssize_t{3}});
    auto r = a.mutable_unchecked<2>();
    for (size_t i = 0; i < s.size(); ++i) {
        r(i, 0) = s[i].xi;
        r(i, 1) = s[i].A(0);
        r(i, 2) = s[i].A(1);
    }
    return a;
}

Normalization norm_from(const std::string& s) {
    if (s == "h") return Normalization::HUnit;
    if (s == "theta") return Normalization::ThetaUnit;
    throw UsageError("normalisation must be 'h' or 'theta'");
}

}  // namespace

PYBIND11_MODULE(_mfilm, m) {
    m.doc() = "Thin-film Marangoni bifurcation toolkit";

    py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<RangeError>(m, "RangeError", PyExc_IndexError);
    py::register_exception<BranchError>(m, "BranchError", PyExc_ValueError);
    py::register_exception<DegenerateEigenvalueError>(m, "DegenerateEigenvalueError", PyExc_RuntimeError);
    py::register_exception<ExtractionError>(m, "ExtractionError", PyExc_RuntimeError);
    py::register_exception<ConnectionNotFound>(m, "ConnectionNotFound", PyExc_RuntimeError);
    py::register_exception<PropertyViolation>(m, "PropertyViolation", PyExc_RuntimeError);
    py::register_exception<SimulationAbort>(m, "SimulationAbort", PyExc_RuntimeError);

    // linear
    m.def("dispersion_coeffs", [](double k, double g, double beta, double M) {
        const auto d = dispersion_coeffs(k, FluidParams{g, beta, M});
        return py::make_tuple(d.a0, d.a1);
    }, py::arg("k"), py::arg("g"), py::arg("beta"), py::arg("M"));
    m.def("growth_rates", [](double k, double g, double beta, double M) {
        const auto r = spectral_roots(k, FluidParams{g, beta, M});
        return py::make_tuple(r.lambda_plus, r.lambda_minus);
    }, py::arg("k"), py::arg("g"), py::arg("beta"), py::arg("M"));
    m.def("critical_point", [](double g, double beta) {
        const auto c = critical_point(g, beta);
        py::dict d;
        d["M_star"] = c.M_star;
        d["k_star"] = c.k_star;
        d["regime"] = to_string(c.regime);
        return d;
    }, py::arg("g"), py::arg("beta"));
    m.def("kappa", &kappa, py::arg("g"), py::arg("beta"));
    m.def("beta_on_curve", &beta_of_g, py::arg("g"));

    // coefficients
    m.def("coefficients", [](const std::string& lattice, double g, double beta, const std::string& norm,
                             int truncation) {
        CoeffOptions opt;
        opt.norm = norm_from(norm);
        opt.truncation = truncation;
        const auto r = lattice_coefficients(lattice_kind_from_string(lattice), g, beta, opt);
        return from_json(to_json(r.c));
    }, py::arg("lattice"), py::arg("g"), py::arg("beta"), py::arg("norm") = "h", py::arg("truncation") = 8);

    // reduced dynamics
    py::class_<ReducedParams>(m, "ReducedParams")
        .def(py::init<>())
        .def_property("lattice", [](const ReducedParams& r) { return to_string(r.kind); },
                      [](ReducedParams& r, const std::string& s) { r.kind = lattice_kind_from_string(s); })
        .def_readwrite("c", &ReducedParams::c)
        .def_readwrite("M0", &ReducedParams::M0)
        .def_readwrite("kappa", &ReducedParams::kappa)
        .def_readwrite("K0", &ReducedParams::K0)
        .def_readwrite("K1", &ReducedParams::K1)
        .def_readwrite("K2", &ReducedParams::K2)
        .def_readwrite("N0", &ReducedParams::N0)
        .def_readwrite("epsilon", &ReducedParams::epsilon);
    m.def("square_regime", &square_regime, py::arg("regime"), py::arg("c") = 1.0);
    m.def("hex_regime", &hex_regime, py::arg("regime"), py::arg("K0"), py::arg("K2"), py::arg("N0"),
          py::arg("kappa"), py::arg("c") = 1.0);
    m.def("reduced_rhs", &reduced_rhs, py::arg("A"), py::arg("params"));
    m.def("fixed_points", [](const ReducedParams& rp) {
        py::list l;
        for (const auto& fp : fixed_points(rp)) l.append(fixed_point_dict(fp));
        return l;
    }, py::arg("params"));
    m.def("heteroclinic", [](const ReducedParams& rp, const std::string& source, const std::string& target,
                             double tol) {
        HeteroclinicOptions opt;
        opt.tol = tol;
        const auto o = heteroclinic(rp, fixed_point_label_from_string(source), fixed_point_label_from_string(target),
                                    opt);
        py::dict d;
        d["source"] = fixed_point_dict(o.source);
        d["target"] = fixed_point_dict(o.target);
        d["samples"] = samples_array(o.samples);
        d["gap"] = o.convergence_gap;
        d["method"] = o.method;
        d["lyapunov_decreasing"] = o.energy_decreasing;
        return d;
    }, py::arg("params"), py::arg("source"), py::arg("target"), py::arg("tol") = 1e-7);

    // reconstruction
    m.def("pattern_field", [](const std::string& branch, double g, double beta, double mu, double M0, int nx, int ny,
                              int sign) {
        PatternOptions opt;
        opt.sign = sign;
        const auto pf = pattern_field(pattern_branch_from_string(branch), g, beta, mu, M0, Grid{nx, ny, 0.0, 0.0}, opt);
        py::dict d;
        const auto hf = field_arrays(pf.field);
        d["h"] = hf[0];
        d["theta"] = hf[1];
        d["Lx"] = pf.field.Lx;
        d["Ly"] = pf.field.Ly;
        d["metadata"] = from_json(pf.metadata());
        return d;
    }, py::arg("branch"), py::arg("g"), py::arg("beta"), py::arg("mu"), py::arg("M0"), py::arg("nx") = 32,
       py::arg("ny") = 32, py::arg("sign") = 1);

    // simulation
    m.def("simulate", [](py::array_t<double> h, py::array_t<double> theta, double Lx, double Ly, double g, double beta,
                         double M, double dt, double t_end, int output_every, int pad, double h_floor) {
        SimConfig cfg;
        const GridField init = field_from_arrays(h, theta, Lx, Ly);
        cfg.grid = Grid{init.nx, init.ny, Lx, Ly};
        cfg.params = FluidParams{g, beta, M};
        cfg.dt = dt;
        cfg.t_end = t_end;
        cfg.output_every = output_every;
        cfg.dealias_pad = pad;
        cfg.h_floor = h_floor;
        RunResult res;
        {
            py::gil_scoped_release nogil;
            res = run(cfg, init);
        }
        py::dict d;
        std::vector<double> t, mean_h, l2_h, l2_theta;
        for (const auto& s : res.series) {
            t.push_back(s.t);
            mean_h.push_back(s.mean_h);
            l2_h.push_back(s.l2_h);
            l2_theta.push_back(s.l2_theta);
        }
        d["t"] = py::array_t<double>(t.size(), t.data());
        d["mean_h"] = py::array_t<double>(mean_h.size(), mean_h.data());
        d["l2_h"] = py::array_t<double>(l2_h.size(), l2_h.data());
        d["l2_theta"] = py::array_t<double>(l2_theta.size(), l2_theta.data());
        const auto ff = field_arrays(res.final_state.field);
        d["h"] = ff[0];
        d["theta"] = ff[1];
        return d;
    }, py::arg("h"), py::arg("theta"), py::arg("Lx"), py::arg("Ly"), py::arg("g"), py::arg("beta"), py::arg("M"),
       py::arg("dt") = 0.05, py::arg("t_end") = 1.0, py::arg("output_every") = 20, py::arg("pad") = 3,
       py::arg("h_floor") = 0.2);

    m.def("acceptance_ids", &acceptance_ids);
}
