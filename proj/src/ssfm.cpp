#include "dp4d/ssfm.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace dp4d {

namespace {
const double PI = 3.14159265358979323846;

// in-place FFT pair on a std::vector<cplx>
// FFTW planning is not thread-safe; execution is. Serialize plan handling so
// bench items can run concurrently.
std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}

void fft_inplace(std::vector<cplx>& v, int sign) {
    auto* p = reinterpret_cast<fftw_complex*>(v.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(v.size()), p, p, sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        fftw_destroy_plan(plan);
    }
    if (sign == FFTW_BACKWARD) {
        double s = 1.0 / double(v.size());
        for (auto& z : v) z *= s;
    }
}

std::vector<double> fft_freqs(std::size_t n, double fs) {
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto k = static_cast<long long>(i);
        if (k > static_cast<long long>(n) / 2 - (n % 2 == 0 ? 1 : 0) &&
            k >= static_cast<long long>((n + 1) / 2))
            k -= static_cast<long long>(n);
        f[i] = fs * double(k) / double(n);
    }
    return f;
}

// sqrt of the raised-cosine spectrum, |G|^2 integrates to 1 over f (pulse
// energy T at symbol spacing T)
double rrc_amp(double f, double rs, double beta) {
    double T = 1.0 / rs;
    double af = std::fabs(f);
    double f1 = (1.0 - beta) / (2.0 * T);
    double f2 = (1.0 + beta) / (2.0 * T);
    if (af <= f1) return std::sqrt(T);
    if (af <= f2 && beta > 0.0)
        return std::sqrt(T / 2.0 * (1.0 + std::cos(PI * T / beta * (af - f1))));
    return 0.0;
}
}  // namespace

std::uint64_t counter_rand(std::uint64_t seed, std::uint64_t counter) {
    // splitmix64 finalizer applied to the (seed, counter) pair; stateless
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (counter + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::pair<SignalGrid, SymbolRecord> synthesize_tx(const Constellation4D& c,
                                                  const SimConfig& cfg) {
    const auto M = c.points.size();
    const int nsym = cfg.num_symbols;
    const int sps = cfg.samples_per_symbol;
    if (nsym < (1 << 14) || (nsym & (nsym - 1)) != 0)
        throw std::invalid_argument("num_symbols must be a power of two >= 2^14");
    const double rs = cfg.link.symbol_rate;
    const double fs = sps * rs;
    if (fs < cfg.link.bandwidth())
        throw std::invalid_argument("RRC band exceeds grid Nyquist (aliasing)");
    const double P = cfg.link.power_w();
    const std::size_t N = std::size_t(nsym) * sps;

    SymbolRecord tx;
    tx.x.resize(nsym);
    tx.y.resize(nsym);
    double sqP = std::sqrt(P);
    for (int k = 0; k < nsym; ++k) {
        auto idx = static_cast<std::size_t>(counter_rand(cfg.seed, k) % M);
        tx.x[k] = c.points[idx][0] * sqP;
        tx.y[k] = c.points[idx][1] * sqP;
    }

    SignalGrid sig;
    sig.sample_rate = fs;
    sig.x.assign(N, 0.0);
    sig.y.assign(N, 0.0);
    for (int k = 0; k < nsym; ++k) {
        sig.x[std::size_t(k) * sps] = tx.x[k];
        sig.y[std::size_t(k) * sps] = tx.y[k];
    }
    auto f = fft_freqs(N, fs);
    fft_inplace(sig.x, FFTW_FORWARD);
    fft_inplace(sig.y, FFTW_FORWARD);
    for (std::size_t i = 0; i < N; ++i) {
        double g = rrc_amp(f[i], rs, cfg.link.rolloff);
        sig.x[i] *= g;
        sig.y[i] *= g;
    }
    fft_inplace(sig.x, FFTW_BACKWARD);
    fft_inplace(sig.y, FFTW_BACKWARD);
    // exact power normalization to P on the periodic grid
    double pw = 0.0;
    for (std::size_t i = 0; i < N; ++i) pw += std::norm(sig.x[i]) + std::norm(sig.y[i]);
    pw /= double(N);
    double s = std::sqrt(P / pw);
    for (std::size_t i = 0; i < N; ++i) {
        sig.x[i] *= s;
        sig.y[i] *= s;
    }
    return {std::move(sig), std::move(tx)};
}

SignalGrid propagate(const SignalGrid& sig, const SimConfig& cfg) {
    SignalGrid u = sig;
    const std::size_t N = u.x.size();
    const LinkSpec& lk = cfg.link;
    const double alpha = lk.alpha();
    const double beta2 = lk.beta2();
    const double g89 = (8.0 / 9.0) * lk.gamma();
    const double L = lk.span_length();
    auto f = fft_freqs(N, u.sample_rate);
    std::vector<double> disp(N);  // d/dz phase factor coefficient
    for (std::size_t i = 0; i < N; ++i) disp[i] = -2.0 * PI * PI * beta2 * f[i] * f[i];

    std::vector<cplx> lin(N);
    double max_step = cfg.max_step_km * 1e3;
    for (int span = 0; span < lk.span_count; ++span) {
        double z = 0.0;
        while (z < L - 1e-9) {
            double pk = 0.0;
            for (std::size_t i = 0; i < N; ++i)
                pk = std::max(pk, std::norm(u.x[i]) + std::norm(u.y[i]));
            double h = std::min({max_step, cfg.phi_nl_max / (g89 * pk), L - z});
            double h2 = h / 2.0;
            for (std::size_t i = 0; i < N; ++i)
                lin[i] = std::exp(cplx(-alpha / 2.0 * h2, disp[i] * h2));
            fft_inplace(u.x, FFTW_FORWARD);
            fft_inplace(u.y, FFTW_FORWARD);
            for (std::size_t i = 0; i < N; ++i) {
                u.x[i] *= lin[i];
                u.y[i] *= lin[i];
            }
            fft_inplace(u.x, FFTW_BACKWARD);
            fft_inplace(u.y, FFTW_BACKWARD);
            for (std::size_t i = 0; i < N; ++i) {
                double ph = g89 * (std::norm(u.x[i]) + std::norm(u.y[i])) * h;
                cplx rot(std::cos(ph), std::sin(ph));
                u.x[i] *= rot;
                u.y[i] *= rot;
            }
            fft_inplace(u.x, FFTW_FORWARD);
            fft_inplace(u.y, FFTW_FORWARD);
            for (std::size_t i = 0; i < N; ++i) {
                u.x[i] *= lin[i];
                u.y[i] *= lin[i];
            }
            fft_inplace(u.x, FFTW_BACKWARD);
            fft_inplace(u.y, FFTW_BACKWARD);
            z += h;
        }
        double g = std::exp(alpha * L / 2.0);
        for (std::size_t i = 0; i < N; ++i) {
            u.x[i] *= g;
            u.y[i] *= g;
        }
    }
    for (std::size_t i = 0; i < N; ++i)
        if (!std::isfinite(u.x[i].real()) || !std::isfinite(u.y[i].real()))
            throw std::runtime_error("non-finite sample after propagation");
    return u;
}

SymbolRecord rx_dsp(const SignalGrid& sig, const SimConfig& cfg) {
    const std::size_t N = sig.x.size();
    const int sps = cfg.samples_per_symbol;
    const LinkSpec& lk = cfg.link;
    const double beta2 = lk.beta2();
    const double Ltot = lk.span_length() * lk.span_count;
    const double T = 1.0 / lk.symbol_rate;
    auto f = fft_freqs(N, sig.sample_rate);
    std::vector<cplx> X = sig.x, Y = sig.y;
    fft_inplace(X, FFTW_FORWARD);
    fft_inplace(Y, FFTW_FORWARD);
    for (std::size_t i = 0; i < N; ++i) {
        double cd = 2.0 * PI * PI * beta2 * f[i] * f[i] * Ltot;
        cplx h = cplx(std::cos(cd), std::sin(cd)) * (rrc_amp(f[i], lk.symbol_rate, lk.rolloff) / T);
        X[i] *= h;
        Y[i] *= h;
    }
    fft_inplace(X, FFTW_BACKWARD);
    fft_inplace(Y, FFTW_BACKWARD);
    SymbolRecord rx;
    std::size_t nsym = N / sps;
    rx.x.resize(nsym);
    rx.y.resize(nsym);
    for (std::size_t k = 0; k < nsym; ++k) {
        rx.x[k] = X[k * sps];
        rx.y[k] = Y[k * sps];
    }
    return rx;
}

namespace {
void snr_one_pol(const std::vector<cplx>& r, const std::vector<cplx>& a, double& snr,
                 double& p, cplx& gain, bool& inf) {
    if (r.size() != a.size()) throw std::invalid_argument("rx/tx length mismatch");
    cplx num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::conj(a[i]) * r[i];
        den += std::norm(a[i]);
    }
    gain = num / den;
    double perr = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) perr += std::norm(r[i] / gain - a[i]);
    perr /= double(a.size());
    p = den / double(a.size());
    if (perr <= 0.0) {
        snr = std::numeric_limits<double>::infinity();
        inf = true;
    } else {
        snr = p / perr;
        inf = false;
    }
}
}  // namespace

SnrReport estimate_snr(const SymbolRecord& rx, const SymbolRecord& tx) {
    SnrReport rep;
    snr_one_pol(rx.x, tx.x, rep.snr_x, rep.p_x, rep.gain_x, rep.infinite_x);
    snr_one_pol(rx.y, tx.y, rep.snr_y, rep.p_y, rep.gain_y, rep.infinite_y);
    return rep;
}

EtaSsfm eta_from_snr(const SnrReport& r, const LinkSpec& link) {
    if (r.infinite_x || r.infinite_y)
        throw std::runtime_error("infinite SNR: eta undefined");
    double P = link.power_w();
    EtaSsfm e;
    e.eta_x = r.p_x / (r.snr_x * P * P * P);
    e.eta_y = r.p_y / (r.snr_y * P * P * P);
    return e;
}

EtaSsfm run_ssfm(const Constellation4D& c, const SimConfig& cfg) {
    auto [sig, tx] = synthesize_tx(c, cfg);
    auto out = propagate(sig, cfg);
    auto rx = rx_dsp(out, cfg);
    return eta_from_snr(estimate_snr(rx, tx), cfg.link);
}

}  // namespace dp4d
