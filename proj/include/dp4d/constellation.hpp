#ifndef DP4D_CONSTELLATION_HPP
#define DP4D_CONSTELLATION_HPP

#include <array>
#include <complex>
#include <map>
#include <string>
#include <vector>

namespace dp4d {

using cplx = std::complex<double>;

// M points over the four quadrature/polarization dimensions, stored as
// the complex pair (s_x, s_y). Uniform probabilities.
struct Constellation4D {
    std::string name;
    std::vector<std::array<cplx, 2>> points;

    std::size_t cardinality() const { return points.size(); }
    double mean_energy() const;
};

struct Constellation2D {
    std::vector<cplx> points;  // multiplicities retained
};

// exponent signature (a,b,c,d) -> E[sx^a conj(sx)^b sy^c conj(sy)^d]
struct MomentSet {
    std::map<std::array<int, 4>, cplx> m;

    cplx get(int a, int b, int c, int d) const;
    // |sx|^2k for k<=3
    double abs_x(int k) const { return get(k, k, 0, 0).real(); }
    double abs_y(int k) const { return get(0, 0, k, k).real(); }
};

// 2D moments E[s^a conj(s)^b], a+b <= 6
struct MomentSet2D {
    std::map<std::array<int, 2>, cplx> m;
    cplx get(int a, int b) const;
};

Constellation4D parse_constellation_file(std::istream& in, const std::string& name);
Constellation4D load_constellation_file(const std::string& path);
Constellation4D generate_pm_qam(int m_per_pol);
Constellation4D generate_2a8psk(int bits_per_symbol, double ring_ratio);
Constellation4D normalize_energy(const Constellation4D& c);
Constellation4D swap_polarizations(const Constellation4D& c);
Constellation2D project_polarization(const Constellation4D& c, char pol);
MomentSet compute_moments(const Constellation4D& c);
MomentSet2D compute_moments_2d(const Constellation2D& c);

// moment set of a unit-energy circular-Gaussian pair (analytic)
MomentSet gaussian_moments();
MomentSet swap_moments(const MomentSet& m);

}  // namespace dp4d

#endif
