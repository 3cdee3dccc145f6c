#include "dp4d/constellation.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace dp4d {

double Constellation4D::mean_energy() const {
    double acc = 0.0, comp = 0.0;
    for (const auto& p : points) {
        double e = std::norm(p[0]) + std::norm(p[1]) - comp;
        double t = acc + e;
        comp = (t - acc) - e;
        acc = t;
    }
    return acc / static_cast<double>(points.size());
}

cplx MomentSet::get(int a, int b, int c, int d) const {
    auto it = m.find({a, b, c, d});
    if (it == m.end()) throw std::out_of_range("missing moment signature");
    return it->second;
}

cplx MomentSet2D::get(int a, int b) const {
    auto it = m.find({a, b});
    if (it == m.end()) throw std::out_of_range("missing 2D moment signature");
    return it->second;
}

Constellation4D parse_constellation_file(std::istream& in, const std::string& name) {
    Constellation4D c;
    c.name = name;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ss(line);
        double v[4];
        int n = 0;
        std::string tok;
        while (ss >> tok) {
            if (n >= 4)
                throw std::runtime_error(name + ":" + std::to_string(lineno) +
                                         ": expected 4 columns");
            std::size_t pos = 0;
            double x;
            try {
                x = std::stod(tok, &pos);
            } catch (const std::exception&) {
                pos = 0;
            }
            if (pos != tok.size() || !std::isfinite(x))
                throw std::runtime_error(name + ":" + std::to_string(lineno) +
                                         ": bad token '" + tok + "'");
            v[n++] = x;
        }
        if (n != 4)
            throw std::runtime_error(name + ":" + std::to_string(lineno) +
                                     ": expected 4 columns, got " + std::to_string(n));
        c.points.push_back({cplx(v[0], v[1]), cplx(v[2], v[3])});
    }
    if (c.points.size() < 2)
        throw std::runtime_error(name + ": cardinality must be >= 2");
    std::set<std::array<double, 4>> seen;
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        const auto& p = c.points[i];
        auto key = std::array<double, 4>{p[0].real(), p[0].imag(), p[1].real(), p[1].imag()};
        if (!seen.insert(key).second)
            throw std::runtime_error(name + ": duplicate point at index " + std::to_string(i));
    }
    return c;
}

Constellation4D load_constellation_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::size_t slash = path.find_last_of('/');
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    std::size_t dot = base.find_last_of('.');
    if (dot != std::string::npos) base = base.substr(0, dot);
    return parse_constellation_file(f, base);
}

Constellation4D normalize_energy(const Constellation4D& c) {
    double e = c.mean_energy();
    if (!(e > 0.0)) throw std::runtime_error(c.name + ": zero-energy constellation");
    double s = 1.0 / std::sqrt(e);
    Constellation4D out = c;
    for (auto& p : out.points) {
        p[0] *= s;
        p[1] *= s;
    }
    return out;
}

Constellation4D generate_pm_qam(int m_per_pol) {
    int side = static_cast<int>(std::lround(std::sqrt(double(m_per_pol))));
    if (side * side != m_per_pol || side < 2 || side % 2 != 0)
        throw std::invalid_argument("m_per_pol must be a square QAM size (4,16,64,256)");
    std::vector<cplx> pol;
    for (int i = 0; i < side; ++i)
        for (int q = 0; q < side; ++q)
            pol.emplace_back(2 * i - side + 1, 2 * q - side + 1);
    Constellation4D c;
    c.name = "pm_" + std::to_string(m_per_pol) + "qam";
    for (const auto& u : pol)
        for (const auto& v : pol) c.points.push_back({u, v});
    return normalize_energy(c);
}

// 4D-2A8PSK: each polarization carries an 8PSK point on one of two rings
// (radii r and 1); the set-partitioned 5b/6b/7b variants select which
// (phase, phase, ring) combinations are allowed. Ring assignment is
// complementary across polarizations so the 4D modulus is constant.
Constellation4D generate_2a8psk(int bits_per_symbol, double ring_ratio) {
    if (!(ring_ratio > 0.0) || ring_ratio > 1.0)
        throw std::invalid_argument("ring_ratio must be in (0, 1]");
    if (bits_per_symbol < 5 || bits_per_symbol > 7)
        throw std::invalid_argument("bits_per_symbol must be 5, 6 or 7");
    const double pi = 3.14159265358979323846;
    auto psk = [&](int k, double r, double off) {
        return std::polar(r, 2.0 * pi * k / 8.0 + off);
    };
    Constellation4D c;
    c.name = "2a8psk_" + std::to_string(bits_per_symbol) + "b";
    double r = ring_ratio;
    if (bits_per_symbol == 7) {
        // 7b: free 8PSK phases on both pols, one ring-select bit;
        // ring of y is complementary to ring of x. Outer ring rotated pi/8.
        for (int kx = 0; kx < 8; ++kx)
            for (int ky = 0; ky < 8; ++ky)
                for (int s = 0; s < 2; ++s) {
                    double rx = s ? 1.0 : r;
                    double ry = s ? r : 1.0;
                    double ox = s ? pi / 8.0 : 0.0;
                    double oy = s ? 0.0 : pi / 8.0;
                    c.points.push_back({psk(kx, rx, ox), psk(ky, ry, oy)});
                }
    } else if (bits_per_symbol == 6) {
        // 6b: ring-select bit equals the parity of the two phase indices.
        for (int kx = 0; kx < 8; ++kx)
            for (int ky = 0; ky < 8; ++ky) {
                int s = (kx + ky) & 1;
                double rx = s ? 1.0 : r;
                double ry = s ? r : 1.0;
                double ox = s ? pi / 8.0 : 0.0;
                double oy = s ? 0.0 : pi / 8.0;
                c.points.push_back({psk(kx, rx, ox), psk(ky, ry, oy)});
            }
    } else {
        // 5b: even phase-index sum; ring bit derived from the indices so the
        // format stays antipodally symmetric (k -> k+4 on both pols).
        for (int kx = 0; kx < 8; ++kx)
            for (int ky = 0; ky < 8; ++ky) {
                if ((kx + ky) & 1) continue;
                int s = (kx + (kx + ky) / 2) & 1;
                double rx = s ? 1.0 : r;
                double ry = s ? r : 1.0;
                double ox = s ? pi / 8.0 : 0.0;
                double oy = s ? 0.0 : pi / 8.0;
                c.points.push_back({psk(kx, rx, ox), psk(ky, ry, oy)});
            }
    }
    return normalize_energy(c);
}

Constellation4D swap_polarizations(const Constellation4D& c) {
    Constellation4D out;
    out.name = c.name + "_swapped";
    out.points.reserve(c.points.size());
    for (const auto& p : c.points) out.points.push_back({p[1], p[0]});
    return out;
}

Constellation2D project_polarization(const Constellation4D& c, char pol) {
    if (pol != 'x' && pol != 'y') throw std::invalid_argument("pol must be 'x' or 'y'");
    Constellation2D out;
    out.points.reserve(c.points.size());
    for (const auto& p : c.points) out.points.push_back(pol == 'x' ? p[0] : p[1]);
    return out;
}

namespace {
// compensated complex mean over the point set
template <typename F>
cplx kahan_mean(std::size_t n, F f) {
    double sr = 0, cr = 0, si = 0, ci = 0;
    for (std::size_t i = 0; i < n; ++i) {
        cplx v = f(i);
        double yr = v.real() - cr, tr = sr + yr;
        cr = (tr - sr) - yr;
        sr = tr;
        double yi = v.imag() - ci, ti = si + yi;
        ci = (ti - si) - yi;
        si = ti;
    }
    return {sr / double(n), si / double(n)};
}
}  // namespace

MomentSet compute_moments(const Constellation4D& c) {
    if (std::abs(c.mean_energy() - 1.0) > 1e-9)
        throw std::runtime_error(c.name + ": constellation not normalized");
    MomentSet ms;
    std::size_t M = c.points.size();
    // precompute powers up to 6
    std::vector<std::array<cplx, 7>> px(M), pxc(M), py(M), pyc(M);
    for (std::size_t i = 0; i < M; ++i) {
        cplx sx = c.points[i][0], sy = c.points[i][1];
        px[i][0] = pxc[i][0] = py[i][0] = pyc[i][0] = 1.0;
        for (int k = 1; k <= 6; ++k) {
            px[i][k] = px[i][k - 1] * sx;
            pxc[i][k] = pxc[i][k - 1] * std::conj(sx);
            py[i][k] = py[i][k - 1] * sy;
            pyc[i][k] = pyc[i][k - 1] * std::conj(sy);
        }
    }
    for (int a = 0; a <= 6; ++a)
        for (int b = 0; a + b <= 6; ++b)
            for (int cc = 0; a + b + cc <= 6; ++cc)
                for (int d = 0; a + b + cc + d <= 6; ++d)
                    ms.m[{a, b, cc, d}] = kahan_mean(M, [&](std::size_t i) {
                        // group per polarization: the final complex multiply is
                        // bitwise commutative, so swapping polarizations yields
                        // bit-identical moments under index exchange
                        cplx fx = px[i][a] * pxc[i][b];
                        cplx fy = py[i][cc] * pyc[i][d];
                        return fx * fy;
                    });
    return ms;
}

MomentSet2D compute_moments_2d(const Constellation2D& c) {
    MomentSet2D ms;
    std::size_t M = c.points.size();
    std::vector<std::array<cplx, 7>> p(M), pc(M);
    for (std::size_t i = 0; i < M; ++i) {
        p[i][0] = pc[i][0] = 1.0;
        for (int k = 1; k <= 6; ++k) {
            p[i][k] = p[i][k - 1] * c.points[i];
            pc[i][k] = pc[i][k - 1] * std::conj(c.points[i]);
        }
    }
    for (int a = 0; a <= 6; ++a)
        for (int b = 0; a + b <= 6; ++b)
            ms.m[{a, b}] = kahan_mean(M, [&](std::size_t i) { return p[i][a] * pc[i][b]; });
    return ms;
}

MomentSet gaussian_moments() {
    // sx, sy iid CN(0, 1/2): E[|s|^{2k}] = k! / 2^k, off-diagonal zero
    MomentSet ms;
    auto fact = [](int n) { return n == 0 ? 1.0 : n == 1 ? 1.0 : n == 2 ? 2.0 : 6.0; };
    for (int a = 0; a <= 6; ++a)
        for (int b = 0; a + b <= 6; ++b)
            for (int cc = 0; a + b + cc <= 6; ++cc)
                for (int d = 0; a + b + cc + d <= 6; ++d) {
                    double v = 0.0;
                    if (a == b && cc == d)
                        v = fact(a) * std::pow(0.5, a) * fact(cc) * std::pow(0.5, cc);
                    ms.m[{a, b, cc, d}] = v;
                }
    return ms;
}

MomentSet swap_moments(const MomentSet& min) {
    MomentSet out;
    for (const auto& [k, v] : min.m) out.m[{k[2], k[3], k[0], k[1]}] = v;
    return out;
}

}  // namespace dp4d
