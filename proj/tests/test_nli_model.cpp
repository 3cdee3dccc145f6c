#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>

#include "doctest.h"
#include "dp4d/constellation.hpp"
#include "dp4d/nli_model.hpp"

using namespace dp4d;

#ifndef DP4D_CATALOG_PATH
#define DP4D_CATALOG_PATH "catalog"
#endif

namespace {

LinkSpec table1_link() { return LinkSpec{}; }

// fast quadrature for relative-structure tests (absolute accuracy irrelevant)
QuadratureSettings coarse_quad() {
    QuadratureSettings q;
    q.nodes = 50;
    q.max_nodes = 100;
    q.rel_tol = 1.0;  // accept the first Richardson level
    return q;
}

const LinkIntegrals& shared_integrals() {
    static LinkIntegrals li = compute_chi_integrals(table1_link(), coarse_quad());
    return li;
}

double db(double v) { return 10.0 * std::log10(v); }

}  // namespace

TEST_CASE("link kernel: zero phase-mismatch point") {
    LinkSpec l = table1_link();
    // f1 = f2 = f makes kappa = 0: single-span efficiency L_eff, array factor N
    cplx k = link_kernel(5e9, 5e9, 5e9, l);
    double leff = (1.0 - std::exp(-l.alpha() * l.span_length())) / l.alpha();
    CHECK(std::abs(k) == doctest::Approx(leff * l.span_count).epsilon(1e-9));
}

TEST_CASE("gaussian moments zero every coefficient except Phi_1") {
    ModulationCoefficients co = compute_modulation_coefficients(gaussian_moments());
    CHECK(co.phi[0].real() == doctest::Approx(3.0 / 8.0).epsilon(1e-12));
    CHECK(std::abs(co.phi[0].imag()) <= 1e-12);
    CHECK(std::abs(co.phi[1]) <= 1e-12);
    CHECK(std::abs(co.phi[2]) <= 1e-12);
    for (const auto& v : co.psi) CHECK(std::abs(v) <= 1e-12);
    for (const auto& v : co.lam) CHECK(std::abs(v) <= 1e-12);
    CHECK(std::abs(co.xi) <= 1e-12);
}

TEST_CASE("coordinate-swap equivariance is exact") {
    Constellation4D c = load_constellation_file(std::string(DP4D_CATALOG_PATH) + "/c4_16.txt");
    EtaEstimate a = eta_4d(c, table1_link(), shared_integrals());
    EtaEstimate b = eta_4d(swap_polarizations(c), table1_link(), shared_integrals());
    CHECK(a.eta_x == b.eta_y);
    CHECK(a.eta_y == b.eta_x);
}

TEST_CASE("pm-2d reduction: model equals egn projection for product formats") {
    for (int m : {4, 16, 64}) {
        Constellation4D c = generate_pm_qam(m);
        EtaEstimate model = eta_4d(c, table1_link(), shared_integrals());
        EtaEstimate egn = eta_egn_projection(c, table1_link(), shared_integrals());
        INFO("pm-" << m << "qam");
        CHECK(std::abs(model.eta_x_db() - egn.eta_x_db()) <= 0.01);
        CHECK(std::abs(model.eta_y_db() - egn.eta_y_db()) <= 0.01);
    }
}

TEST_CASE("gaussian eta dominates the 120-cell on the same integrals") {
    LinkSpec l = table1_link();
    double eta_gauss =
        eta_one_pol(compute_modulation_coefficients(gaussian_moments()), shared_integrals(), l);
    Constellation4D c =
        load_constellation_file(std::string(DP4D_CATALOG_PATH) + "/120cell4_600.txt");
    EtaEstimate cell = eta_4d(c, l, shared_integrals());
    CHECK(eta_gauss >= cell.eta_x);
    CHECK(eta_gauss >= cell.eta_y);
}

TEST_CASE("2a8psk family: eta_x equals eta_y under the model") {
    for (int bits : {5, 6, 7}) {
        EtaEstimate e = eta_4d(generate_2a8psk(bits, 0.65), table1_link(), shared_integrals());
        INFO("bits=" << bits);
        CHECK(e.eta_x == doctest::Approx(e.eta_y).epsilon(1e-12));
    }
}

TEST_CASE("model eta is independent of launch power") {
    Constellation4D c = generate_pm_qam(4);
    LinkSpec l1 = table1_link();
    LinkSpec l2 = table1_link();
    l2.power_dbm = -25.0;
    EtaEstimate a = eta_4d(c, l1, shared_integrals());
    EtaEstimate b = eta_4d(c, l2, shared_integrals());
    CHECK(a.eta_x == b.eta_x);
    CHECK(a.eta_y == b.eta_y);
}

TEST_CASE("table-1 known values at full quadrature") {
    // regression against the independently derived reference pipeline
    LinkSpec l = table1_link();
    LinkIntegrals li = compute_chi_integrals(l, QuadratureSettings{});
    CHECK(li.converged);
    EtaEstimate qpsk = eta_4d(generate_pm_qam(4), l, li);
    CHECK(qpsk.eta_x_db() == doctest::Approx(30.305).epsilon(0.0005));
    EtaEstimate qam64 = eta_4d(generate_pm_qam(64), l, li);
    CHECK(qam64.eta_x_db() == doctest::Approx(31.012).epsilon(0.0005));
    double eta_gauss =
        eta_one_pol(compute_modulation_coefficients(gaussian_moments()), li, l);
    CHECK(db(eta_gauss) == doctest::Approx(32.104).epsilon(0.0005));
}

TEST_CASE("unconverged quadrature throws") {
    QuadratureSettings q;
    q.nodes = 20;
    q.max_nodes = 40;
    q.rel_tol = 1e-9;
    CHECK_THROWS(compute_chi_integrals(table1_link(), q));
}
