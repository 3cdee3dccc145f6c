#include "dp4d/nli_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "nli_terms.inc"

namespace dp4d {

namespace {
const double PI = 3.14159265358979323846;

// (e^w - 1) / w with the removable singularity handled by series
cplx phi_fn(cplx w) {
    if (std::abs(w) < 1e-6)
        return 1.0 + w / 2.0 + w * w / 6.0;
    return (std::exp(w) - 1.0) / w;
}
}  // namespace

cplx link_kernel(double f1, double f2, double f, const LinkSpec& link) {
    double kappa = 4.0 * PI * PI * link.beta2() * (f1 - f) * (f2 - f);
    double L = link.span_length();
    cplx z(link.alpha(), -kappa);
    // single span: integral_0^L e^{-(alpha - j kappa) s} ds
    cplx single = L * phi_fn(-z * L);
    // phased array over identical spans: sum_{n=0}^{N-1} e^{j n kappa L}
    int N = link.span_count;
    double half = kappa * L / 2.0;
    cplx pa;
    if (std::abs(std::sin(half)) < 1e-12) {
        pa = double(N);
    } else {
        pa = std::sin(N * half) / std::sin(half) *
             std::exp(cplx(0.0, (N - 1) * half));
    }
    return single * pa;
}

namespace {

// midpoint quadrature of one grouped interaction term in its factorized
// coordinates: shared dims outer, one-side dims reduced inner
cplx eval_term(const terms::TermSpec& t, const LinkSpec& link, int n) {
    const double B = link.bandwidth();
    const int d = t.ns + t.nu + t.np;
    double half[5], step[5];
    for (int j = 0; j < d; ++j) {
        half[j] = t.wrange[j] * B / 2.0;
        step[j] = 2.0 * half[j] / n;
    }
    auto node = [&](int j, long k) { return -half[j] + (k + 0.5) * step[j]; };

    // half-range of each band argument across one quadrature cell; used to
    // weight boundary cells by their in-band fraction instead of a hard
    // cutoff, which would leave an O(1/n) oscillatory error the Richardson
    // step cannot remove
    double argspan[8];
    for (int ai = 0; ai < 8; ++ai) {
        double s = 0.0;
        for (int j = 0; j < d; ++j) s += std::fabs(t.arg[ai][j]) * step[j];
        argspan[ai] = 0.5 * s;
    }

    // one side: sum mu over its own dims at fixed shared coords
    auto side = [&](const double w_shared[], int own0, int nown, int argbase) -> cplx {
        long total = 1;
        for (int j = 0; j < nown; ++j) total *= n;
        cplx acc = 0.0;
        double w[5] = {0, 0, 0, 0, 0};
        for (int j = 0; j < t.ns; ++j) w[j] = w_shared[j];
        long idx[2] = {0, 0};
        for (long it = 0; it < total; ++it) {
            long r = it;
            for (int j = 0; j < nown; ++j) {
                idx[j] = r % n;
                r /= n;
            }
            for (int j = 0; j < nown; ++j) w[own0 + j] = node(own0 + j, idx[j]);
            double a[4];
            double wt = 1.0;
            for (int ai = 0; ai < 4 && wt > 0.0; ++ai) {
                const double* row = t.arg[argbase + ai];
                double v = 0.0;
                for (int j = 0; j < d; ++j) v += row[j] * w[j];
                double hv = argspan[argbase + ai];
                double frac = hv > 0.0
                                  ? std::clamp((B / 2.0 - std::fabs(v) + hv) / (2.0 * hv), 0.0, 1.0)
                                  : (std::fabs(v) <= B / 2.0 ? 1.0 : 0.0);
                wt *= frac;
                a[ai] = v;
            }
            if (wt == 0.0) continue;
            acc += wt * link_kernel(a[0], a[1], a[2], link);
        }
        double vol = 1.0;
        for (int j = 0; j < nown; ++j) vol *= step[own0 + j];
        return acc * vol;
    };

    long stot = 1;
    for (int j = 0; j < t.ns; ++j) stot *= n;
    cplx acc = 0.0;
    double ws[5];
    for (long it = 0; it < stot; ++it) {
        long r = it;
        for (int j = 0; j < t.ns; ++j) {
            ws[j] = node(j, r % n);
            r /= n;
        }
        cplx U = side(ws, t.ns, t.nu, 0);
        if (U == 0.0 && t.nu > 0) continue;
        cplx V = side(ws, t.ns + t.nu, t.np, 4);
        acc += U * std::conj(V);
    }
    double vol = 1.0;
    for (int j = 0; j < t.ns; ++j) vol *= step[j];
    return acc * vol * t.jac;
}

constexpr int N_TERMS = 8;

// term index -> chi_bar slots (duplicated slots mirror the conjugate-pair
// bookkeeping of the published combination)
constexpr int CHI_SLOT[N_TERMS][2] = {
    {0, -1},   // phi1  -> chi_1
    {1, -1},   // phi2  -> chi_2
    {2, -1},   // phi3  -> chi_3
    {3, 7},    // psi1  -> chi_4, chi_8
    {4, 6},    // psi2  -> chi_5, chi_7
    {5, 9},    // psi4  -> chi_6, chi_10
    {8, -1},   // lam4  -> chi_9
    {10, -1},  // xi1   -> chi_11
};

struct KernelSet {
    std::array<cplx, N_TERMS> val{};
    std::array<double, N_TERMS> err{};
    int nodes = 0;
    bool converged = true;
};

KernelSet compute_kernels(const LinkSpec& link, const QuadratureSettings& quad) {
    KernelSet ks;
    ks.converged = true;
    ks.nodes = 0;
    // each term runs its own Richardson ladder so a slowly converging term
    // does not force the whole set to a denser grid
    for (int i = 0; i < N_TERMS; ++i) {
        int n = quad.nodes;
        cplx coarse = eval_term(terms::all[i], link, n);
        while (true) {
            cplx fine = eval_term(terms::all[i], link, 2 * n);
            cplx extrap = (4.0 * fine - coarse) / 3.0;
            ks.err[i] = std::abs(fine - coarse) / 3.0;
            ks.val[i] = extrap;
            bool ok = ks.err[i] <= quad.rel_tol * std::abs(extrap);
            if (ok || 4 * n > quad.max_nodes) {
                ks.converged = ks.converged && ok;
                break;
            }
            coarse = fine;
            n *= 2;
        }
        ks.nodes = std::max(ks.nodes, 2 * n);
    }
    return ks;
}

double poly_eval_real(const terms::Monomial* poly, int nmono, const MomentSet& m,
                      bool conj_part, cplx* out_cplx) {
    cplx acc = 0.0;
    for (int i = 0; i < nmono; ++i) {
        cplx v = poly[i].coeff;
        for (int s = 0; s < poly[i].nsig; ++s) {
            const int* g = poly[i].sig[s];
            v *= m.get(g[0], g[1], g[2], g[3]);
        }
        acc += v;
    }
    (void)conj_part;
    if (out_cplx) *out_cplx = acc;
    return acc.real();
}

ModulationCoefficients coefficients_from(const MomentSet& m) {
    ModulationCoefficients co;
    cplx v;
    poly_eval_real(terms::all[0].poly, terms::all[0].nmono, m, false, &v);
    co.phi[0] = v;
    poly_eval_real(terms::all[1].poly, terms::all[1].nmono, m, false, &v);
    co.phi[1] = v;
    poly_eval_real(terms::all[2].poly, terms::all[2].nmono, m, false, &v);
    co.phi[2] = v;
    poly_eval_real(terms::all[3].poly, terms::all[3].nmono, m, false, &v);
    co.psi[0] = v;
    poly_eval_real(terms::all[4].poly, terms::all[4].nmono, m, false, &v);
    co.psi[1] = v;
    co.psi[2] = 0.0;  // folded into psi2 by the conjugate-pair symmetry
    poly_eval_real(terms::all[5].poly, terms::all[5].nmono, m, false, &v);
    co.psi[3] = v;
    co.lam[0] = co.lam[1] = co.lam[2] = 0.0;
    poly_eval_real(terms::all[6].poly, terms::all[6].nmono, m, false, &v);
    co.lam[3] = v;
    co.lam[4] = co.lam[5] = 0.0;
    poly_eval_real(terms::all[7].poly, terms::all[7].nmono, m, false, &v);
    co.xi = v;
    return co;
}

}  // namespace

LinkIntegrals compute_chi_integrals(const LinkSpec& link, const QuadratureSettings& quad) {
    KernelSet ks = compute_kernels(link, quad);
    double T = 1.0 / link.symbol_rate;
    double B = link.bandwidth();
    double scale = T * T / (B * B * B * B);
    LinkIntegrals li;
    li.nodes = ks.nodes;
    li.converged = ks.converged;
    for (int i = 0; i < N_TERMS; ++i) {
        for (int s = 0; s < 2; ++s) {
            int slot = CHI_SLOT[i][s];
            if (slot < 0) continue;
            li.chi_bar[slot] = ks.val[i] * scale;
            li.abs_err[slot] = ks.err[i] * scale;
        }
    }
    if (!ks.converged)
        throw std::runtime_error("chi integrals did not reach tolerance at max node count");
    return li;
}

double eta_one_pol(const ModulationCoefficients& co, const LinkIntegrals& li,
                   const LinkSpec& link) {
    double R = link.symbol_rate;
    double g = link.gamma();
    const auto& x = li.chi_bar;
    double r3 = (co.phi[0] * x[0]).real() + (co.phi[1] * x[1]).real() +
                (co.phi[2] * x[2]).real();
    double r2 = (co.psi[0] * x[3]).real() + 2.0 * (co.psi[1] * x[4]).real() +
                2.0 * (co.psi[2] * std::conj(x[4])).real() + (co.psi[3] * x[5]).real() +
                2.0 * (co.lam[0] * x[6]).real() + 2.0 * (co.lam[1] * std::conj(x[6])).real() +
                (co.lam[2] * x[7]).real() + 2.0 * (co.lam[3] * x[8]).real() +
                2.0 * (co.lam[4] * std::conj(x[8])).real() + (co.lam[5] * x[9]).real();
    double r1 = (co.xi * x[10]).real();
    double eta = (64.0 / 81.0) * g * g * (R * R * R * r3 + R * R * r2 + R * r1);
    if (!(eta > 0.0))
        throw std::runtime_error("non-positive eta: numerical consistency failure");
    return eta;
}

ModulationCoefficients compute_modulation_coefficients(const MomentSet& m) {
    return coefficients_from(m);
}

double EtaEstimate::eta_x_db() const { return 10.0 * std::log10(eta_x); }
double EtaEstimate::eta_y_db() const { return 10.0 * std::log10(eta_y); }
double EtaEstimate::eta_bar_db() const {
    return 10.0 * std::log10(0.5 * (eta_x + eta_y));
}

EtaEstimate eta_4d(const Constellation4D& c, const LinkSpec& link,
                   const LinkIntegrals& integrals) {
    MomentSet m = compute_moments(c);
    EtaEstimate e;
    e.method = EtaMethod::MODEL_4D;
    e.constellation = c.name;
    e.cardinality = c.cardinality();
    e.eta_x = eta_one_pol(compute_modulation_coefficients(m), integrals, link);
    e.eta_y = eta_one_pol(compute_modulation_coefficients(swap_moments(m)), integrals, link);
    return e;
}

EtaEstimate eta_egn_projection(const Constellation4D& c, const LinkSpec& link,
                               const LinkIntegrals& integrals) {
    EtaEstimate e;
    e.method = EtaMethod::EGN_4D;
    e.constellation = c.name;
    e.cardinality = c.cardinality();
    for (char pol : {'x', 'y'}) {
        // EGN on the projection == 4D model on the Cartesian product of the
        // projection with itself (product moments)
        MomentSet2D m2 = compute_moments_2d(project_polarization(c, pol));
        // rescale so the product format has unit 4D energy (EGN assumes
        // balanced per-polarization power; the projection sets the shape)
        double t = std::sqrt(1.0 / (2.0 * m2.get(1, 1).real()));
        MomentSet m4;
        for (int a = 0; a <= 6; ++a)
            for (int b = 0; a + b <= 6; ++b)
                for (int cc = 0; a + b + cc <= 6; ++cc)
                    for (int d = 0; a + b + cc + d <= 6; ++d)
                        m4.m[{a, b, cc, d}] = m2.get(a, b) * m2.get(cc, d) *
                                              std::pow(t, a + b + cc + d);
        double eta = eta_one_pol(compute_modulation_coefficients(m4), integrals, link);
        (pol == 'x' ? e.eta_x : e.eta_y) = eta;
    }
    return e;
}

EtaMetrics eta_metrics(const EtaEstimate& a, const EtaEstimate& ref) {
    if (a.constellation != ref.constellation)
        throw std::invalid_argument("eta_metrics: mismatched constellations");
    EtaMetrics m;
    m.delta_x_db = std::fabs(a.eta_x_db() - ref.eta_x_db());
    m.delta_y_db = std::fabs(a.eta_y_db() - ref.eta_y_db());
    m.delta_bar_db = 0.5 * (m.delta_x_db + m.delta_y_db);
    return m;
}

}  // namespace dp4d
