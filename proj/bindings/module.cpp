#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dp4d/bench.hpp"
#include "dp4d/constellation.hpp"
#include "dp4d/link.hpp"
#include "dp4d/nli_model.hpp"
#include "dp4d/ssfm.hpp"

namespace py = pybind11;
using namespace dp4d;

PYBIND11_MODULE(_dp4d, m) {
    m.doc() = "NLI power coefficients for dual-polarization 4D modulation formats";

    py::class_<LinkSpec>(m, "LinkSpec")
        .def(py::init<>())
        .def_readwrite("alpha_db_km", &LinkSpec::alpha_db_km)
        .def_readwrite("dispersion_ps_nm_km", &LinkSpec::dispersion_ps_nm_km)
        .def_readwrite("lambda_nm", &LinkSpec::lambda_nm)
        .def_readwrite("gamma_w_km", &LinkSpec::gamma_w_km)
        .def_readwrite("span_length_km", &LinkSpec::span_length_km)
        .def_readwrite("span_count", &LinkSpec::span_count)
        .def_readwrite("symbol_rate", &LinkSpec::symbol_rate)
        .def_readwrite("rolloff", &LinkSpec::rolloff)
        .def_readwrite("power_dbm", &LinkSpec::power_dbm);

    py::class_<QuadratureSettings>(m, "QuadratureSettings")
        .def(py::init<>())
        .def_readwrite("nodes", &QuadratureSettings::nodes)
        .def_readwrite("max_nodes", &QuadratureSettings::max_nodes)
        .def_readwrite("rel_tol", &QuadratureSettings::rel_tol);

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("link", &SimConfig::link)
        .def_readwrite("num_symbols", &SimConfig::num_symbols)
        .def_readwrite("samples_per_symbol", &SimConfig::samples_per_symbol)
        .def_readwrite("phi_nl_max", &SimConfig::phi_nl_max)
        .def_readwrite("max_step_km", &SimConfig::max_step_km)
        .def_readwrite("seed", &SimConfig::seed);

    py::class_<Constellation4D>(m, "Constellation4D")
        .def(py::init<>())
        .def_readwrite("name", &Constellation4D::name)
        .def_readwrite("points", &Constellation4D::points)
        .def("mean_energy", &Constellation4D::mean_energy)
        .def("__len__", [](const Constellation4D& c) { return c.points.size(); });

    py::class_<LinkIntegrals>(m, "LinkIntegrals")
        .def_readonly("chi_bar", &LinkIntegrals::chi_bar)
        .def_readonly("abs_err", &LinkIntegrals::abs_err)
        .def_readonly("nodes", &LinkIntegrals::nodes)
        .def_readonly("converged", &LinkIntegrals::converged);

    py::class_<EtaEstimate>(m, "EtaEstimate")
        .def_readonly("eta_x", &EtaEstimate::eta_x)
        .def_readonly("eta_y", &EtaEstimate::eta_y)
        .def_readonly("constellation", &EtaEstimate::constellation)
        .def_readonly("cardinality", &EtaEstimate::cardinality)
        .def("eta_x_db", &EtaEstimate::eta_x_db)
        .def("eta_y_db", &EtaEstimate::eta_y_db)
        .def("eta_bar_db", &EtaEstimate::eta_bar_db);

    py::class_<EtaSsfm>(m, "EtaSsfm")
        .def_readonly("eta_x", &EtaSsfm::eta_x)
        .def_readonly("eta_y", &EtaSsfm::eta_y);

    m.def("load_constellation_file", &load_constellation_file, py::arg("path"));
    m.def("generate_pm_qam", &generate_pm_qam, py::arg("m_per_pol"));
    m.def("generate_2a8psk", &generate_2a8psk, py::arg("bits_per_symbol"),
          py::arg("ring_ratio"));
    m.def("normalize_energy", &normalize_energy);
    m.def("swap_polarizations", &swap_polarizations);
    m.def(
        "compute_moments",
        [](const Constellation4D& c) {
            py::dict out;
            for (const auto& [sig, v] : compute_moments(c).m)
                out[py::make_tuple(sig[0], sig[1], sig[2], sig[3])] = v;
            return out;
        },
        py::arg("constellation"));
    m.def("compute_chi_integrals", &compute_chi_integrals, py::arg("link"),
          py::arg("quadrature") = QuadratureSettings{},
          py::call_guard<py::gil_scoped_release>());
    m.def("eta_4d", &eta_4d, py::arg("constellation"), py::arg("link"),
          py::arg("integrals"));
    m.def("eta_egn_projection", &eta_egn_projection, py::arg("constellation"),
          py::arg("link"), py::arg("integrals"));
    m.def("run_ssfm", &run_ssfm, py::arg("constellation"), py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
}
