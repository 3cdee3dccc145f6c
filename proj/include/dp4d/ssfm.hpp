#ifndef DP4D_SSFM_HPP
#define DP4D_SSFM_HPP

#include <cstdint>
#include <vector>

#include "dp4d/constellation.hpp"
#include "dp4d/link.hpp"

namespace dp4d {

struct SimConfig {
    LinkSpec link;
    int num_symbols = 1 << 17;       // power of two, >= 2^14
    int samples_per_symbol = 3;      // 96 GHz sim bandwidth at 32 GBd
    double phi_nl_max = 1e-3;        // rad per step
    double max_step_km = 1.0;
    std::uint64_t seed = 1;
};

struct SignalGrid {
    std::vector<cplx> x, y;
    double sample_rate = 0.0;
};

struct SymbolRecord {
    std::vector<cplx> x, y;  // transmitted symbols (scaled to launch power)
};

struct SnrReport {
    double snr_x = 0.0, snr_y = 0.0;  // linear; infinity() if error power is 0
    double p_x = 0.0, p_y = 0.0;      // W
    cplx gain_x, gain_y;              // fitted one-tap gains
    bool infinite_x = false, infinite_y = false;
};

struct EtaSsfm {
    double eta_x = 0.0, eta_y = 0.0;  // 1/W^2
};

// counter-based RNG: one 64-bit word per counter value, stateless
std::uint64_t counter_rand(std::uint64_t seed, std::uint64_t counter);

std::pair<SignalGrid, SymbolRecord> synthesize_tx(const Constellation4D& c,
                                                  const SimConfig& cfg);
SignalGrid propagate(const SignalGrid& sig, const SimConfig& cfg);
SymbolRecord rx_dsp(const SignalGrid& sig, const SimConfig& cfg);
SnrReport estimate_snr(const SymbolRecord& rx, const SymbolRecord& tx);
EtaSsfm eta_from_snr(const SnrReport& r, const LinkSpec& link);

// full pipeline
EtaSsfm run_ssfm(const Constellation4D& c, const SimConfig& cfg);

}  // namespace dp4d

#endif
