#include "dp4d/link.hpp"

namespace dp4d {

double beta2_from_dispersion(double D_ps_nm_km, double lambda_nm) {
    constexpr double c = 299792458.0;
    constexpr double pi = 3.14159265358979323846;
    double D = D_ps_nm_km * 1e-6;       // s/m^2
    double lambda = lambda_nm * 1e-9;   // m
    return -D * lambda * lambda / (2.0 * pi * c);  // s^2/m
}

}  // namespace dp4d
