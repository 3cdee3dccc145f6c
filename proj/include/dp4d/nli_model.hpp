#ifndef DP4D_NLI_MODEL_HPP
#define DP4D_NLI_MODEL_HPP

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "dp4d/constellation.hpp"
#include "dp4d/link.hpp"

namespace dp4d {

struct QuadratureSettings {
    int nodes = 200;          // per-axis midpoint nodes at the base level
    int max_nodes = 800;      // per-term refinement cap for the convergence loop
    double rel_tol = 1e-3;    // target relative error per integral
};

// the 11 distinct band-averaged link integrals of the model, plus the
// quadrature metadata for the level they were computed at
struct LinkIntegrals {
    std::array<cplx, 11> chi_bar{};
    std::array<double, 11> abs_err{};
    int nodes = 0;
    bool converged = true;
};

struct ModulationCoefficients {
    // phi[0..2], psi[0..3], lambda[0..5], xi
    std::array<cplx, 3> phi{};
    std::array<cplx, 4> psi{};
    std::array<cplx, 6> lam{};
    cplx xi{};
};

enum class EtaMethod { MODEL_4D, EGN_4D, SSFM };

struct EtaEstimate {
    double eta_x = 0.0, eta_y = 0.0;  // 1/W^2
    EtaMethod method = EtaMethod::MODEL_4D;
    std::string constellation;
    std::size_t cardinality = 0;

    double eta_x_db() const;
    double eta_y_db() const;
    double eta_bar_db() const;  // mean in linear units, then dB
};

struct EtaMetrics {
    double delta_x_db = 0.0, delta_y_db = 0.0, delta_bar_db = 0.0;
};

// single-span FWM efficiency times the N-span phased-array factor
cplx link_kernel(double f1, double f2, double f, const LinkSpec& link);

LinkIntegrals compute_chi_integrals(const LinkSpec& link, const QuadratureSettings& quad);
ModulationCoefficients compute_modulation_coefficients(const MomentSet& m);

// eta for one polarization from coefficients + integrals (the Eq.-(1) sum)
double eta_one_pol(const ModulationCoefficients& co, const LinkIntegrals& li,
                   const LinkSpec& link);

EtaEstimate eta_4d(const Constellation4D& c, const LinkSpec& link,
                   const LinkIntegrals& integrals);
EtaEstimate eta_egn_projection(const Constellation4D& c, const LinkSpec& link,
                               const LinkIntegrals& integrals);
EtaMetrics eta_metrics(const EtaEstimate& a, const EtaEstimate& ref);

}  // namespace dp4d

#endif
