#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qlm/engine.hpp"
#include "qlm/first_iteration.hpp"
#include "qlm/numerics.hpp"
#include "qlm/reference_solver.hpp"
#include "qlm/report.hpp"
#include "qlm/zeroth_iteration.hpp"

namespace py = pybind11;

namespace {

qlm::PotentialSpec make_spec(double g, double lambda, double m) {
    return lambda == 0.0 ? qlm::PotentialSpec::coulomb(g, m) : qlm::PotentialSpec::yukawa(g, lambda, m);
}

py::dict energies(double lambda, double g, double m) {
    const auto spec = make_spec(g, lambda, m);
    const auto p = qlm::solve_eta(spec);
    qlm::ReferenceOptions opt;
    opt.energy_hint = p.E0;
    py::dict out;
    out["eta"] = p.eta;
    out["E0"] = p.E0;
    out["E1"] = qlm::energy_first(p, spec).E1;
    out["E_D"] = qlm::solve_ground_state(spec, opt).E_D;
    return out;
}

py::list converge(double lambda, double g, double m, double tol_energy, int max_iter) {
    const auto spec = make_spec(g, lambda, m);
    const auto p = qlm::solve_eta(spec);
    const auto grid = qlm::default_grid(p.eta);
    qlm::EngineOptions opt;
    opt.tol_energy = tol_energy;
    opt.max_iter = max_iter;
    py::list out;
    for (const auto& rec : qlm::solve(spec, qlm::yukawa_guess(p, grid), grid, opt)) {
        out.append(py::make_tuple(rec.n, rec.energy, rec.delta_energy, rec.residual_norm));
    }
    return out;
}

std::string table_csv(const std::vector<double>& lambdas, double g, double m) {
    qlm::report::RunConfig cfg;
    cfg.lambdas = lambdas;
    cfg.g = g;
    cfg.m = m;
    cfg.provenance = false;
    return qlm::report::to_csv(qlm::report::run_table(cfg));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Quasilinearization solver for screened Coulomb ground states";

    py::register_exception<qlm::NoBoundState>(m, "NoBoundState");
    py::register_exception<qlm::NonConvergence>(m, "NonConvergence");
    py::register_exception<qlm::DomainError>(m, "DomainError", PyExc_ValueError);

    m.def("expint_ei", &qlm::numerics::expint_ei, py::arg("x"), "Exponential integral Ei(x) for x < 0.");
    m.def("energies", &energies, py::arg("lam"), py::arg("g") = 1.0, py::arg("m") = 1.0,
          "eta, E0, E1 and E_D (hartree) for the Yukawa potential -g exp(-lam r)/r.");
    m.def("converge", &converge, py::arg("lam"), py::arg("g") = 1.0, py::arg("m") = 1.0,
          py::arg("tol_energy") = 1e-10, py::arg("max_iter") = 20,
          "QLM history as (n, E_n, delta_E, residual_norm) tuples.");
    m.def("table_csv", &table_csv, py::arg("lambdas"), py::arg("g") = 1.0, py::arg("m") = 1.0);
    m.attr("__version__") = qlm::report::kToolVersion;
}
