#ifndef DP4D_LINK_HPP
#define DP4D_LINK_HPP

#include <cmath>

namespace dp4d {

double beta2_from_dispersion(double D_ps_nm_km, double lambda_nm);

// Table-1-style homogeneous multi-span link. Stored in SI units internally;
// constructor takes the customary engineering units.
struct LinkSpec {
    double alpha_db_km = 0.2;
    double dispersion_ps_nm_km = 17.0;
    double lambda_nm = 1550.0;
    double gamma_w_km = 1.3;
    double span_length_km = 100.0;
    int span_count = 10;
    double symbol_rate = 32e9;
    double rolloff = 0.01;
    double power_dbm = -20.0;

    double alpha() const { return alpha_db_km * std::log(10.0) / 10.0 / 1e3; }  // 1/m
    double beta2() const { return beta2_from_dispersion(dispersion_ps_nm_km, lambda_nm); }
    double gamma() const { return gamma_w_km * 1e-3; }  // 1/(W m)
    double span_length() const { return span_length_km * 1e3; }
    double bandwidth() const { return symbol_rate * (1.0 + rolloff); }
    double power_w() const { return std::pow(10.0, power_dbm / 10.0) * 1e-3; }
};

}  // namespace dp4d

#endif
