#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dp4d/bench.hpp"
#include "dp4d/constellation.hpp"
#include "dp4d/link.hpp"
#include "dp4d/nli_model.hpp"
#include "dp4d/ssfm.hpp"
#include "json.hpp"

using namespace dp4d;
using nlohmann::json;

namespace {

Constellation4D resolve_format(const std::string& arg, const ExperimentConfig& cfg) {
    std::vector<std::string> errors;
    ExperimentConfig one = cfg;
    one.selection = {arg};
    auto v = resolve_selection(one, errors);
    if (v.empty())
        throw std::runtime_error(errors.empty() ? arg + ": not found" : errors.front());
    return v.front();
}

void print_eta(const EtaEstimate& e) {
    json j;
    j["constellation"] = e.constellation;
    j["M"] = e.cardinality;
    j["method"] = method_name(e.method);
    j["eta_x"] = e.eta_x;
    j["eta_y"] = e.eta_y;
    j["eta_x_db"] = e.eta_x_db();
    j["eta_y_db"] = e.eta_y_db();
    j["eta_bar_db"] = e.eta_bar_db();
    std::cout << j.dump(2) << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"NLI power coefficients for dual-polarization 4D modulation formats"};
    app.require_subcommand(1);
    app.fallthrough();  // global link/sim flags may follow the subcommand
    app.set_config("--config", "", "flat key=value config file; flags override it");

    ExperimentConfig cfg;
    // Table-1 defaults live in LinkSpec; expose them as global flags
    app.add_option("--alpha", cfg.link.alpha_db_km, "attenuation [dB/km]")
        ->capture_default_str();
    app.add_option("--dispersion", cfg.link.dispersion_ps_nm_km, "D [ps/nm/km]")
        ->capture_default_str();
    app.add_option("--lambda", cfg.link.lambda_nm, "wavelength [nm]")->capture_default_str();
    app.add_option("--gamma", cfg.link.gamma_w_km, "nonlinear coeff [1/W/km]")
        ->capture_default_str();
    app.add_option("--span-km", cfg.link.span_length_km, "span length [km]")
        ->capture_default_str();
    app.add_option("--spans", cfg.link.span_count, "number of spans")->capture_default_str();
    app.add_option("--symbol-rate", cfg.link.symbol_rate, "symbol rate [Baud]")
        ->capture_default_str();
    app.add_option("--rolloff", cfg.link.rolloff, "RRC rolloff factor")
        ->capture_default_str();
    app.add_option("--power-dbm", cfg.link.power_dbm, "launch power [dBm]")
        ->capture_default_str();
    app.add_option("--nodes", cfg.quad.nodes, "base quadrature nodes per axis")
        ->capture_default_str();
    app.add_option("--max-nodes", cfg.quad.max_nodes, "quadrature refinement cap")
        ->capture_default_str();
    app.add_option("--rel-tol", cfg.quad.rel_tol, "quadrature relative tolerance")
        ->capture_default_str();
    app.add_option("--catalog-dir", cfg.catalog_dir,
                   "catalog directory (default: $DP4D_CATALOG_DIR or ./catalog)");
    app.add_option("--num-symbols", cfg.sim.num_symbols, "SSFM symbols per run")
        ->capture_default_str();
    app.add_option("--sps", cfg.sim.samples_per_symbol, "SSFM samples per symbol")
        ->capture_default_str();
    app.add_option("--seed", cfg.sim.seed, "SSFM RNG seed")->capture_default_str();
    app.add_option("--phi-max", cfg.sim.phi_nl_max, "SSFM max nonlinear phase per step")
        ->capture_default_str();
    app.add_option("--max-step-km", cfg.sim.max_step_km, "SSFM max step [km]")
        ->capture_default_str();

    std::string fmt_arg;
    auto* c_moments = app.add_subcommand("moments", "print 4D moment table for a format");
    c_moments->add_option("format", fmt_arg, "catalog name, builtin, or file path")
        ->required();

    auto* c_model = app.add_subcommand("eta-model", "closed-form 4D model eta");
    c_model->add_option("format", fmt_arg)->required();

    auto* c_egn = app.add_subcommand("eta-egn", "per-polarization EGN-projection eta");
    c_egn->add_option("format", fmt_arg)->required();

    auto* c_ssfm = app.add_subcommand("eta-ssfm", "split-step simulation eta");
    c_ssfm->add_option("format", fmt_arg)->required();

    std::vector<std::string> sel;
    std::vector<std::string> method_names{"model", "egn", "ssfm"};
    std::string reference = "ssfm";
    auto* c_compare = app.add_subcommand("compare", "run several methods over formats");
    c_compare->add_option("formats", sel, "format names/globs")->required();
    c_compare->add_option("--methods", method_names, "subset of model,egn,ssfm");
    c_compare->add_option("--reference", reference, "reference method for deltas");
    c_compare->add_option("-o,--output", cfg.output_dir, "output directory")
        ->capture_default_str();
    c_compare->add_flag("!--no-cache", cfg.use_cache, "disable the results cache");
    c_compare->add_option("--parallelism", cfg.parallelism, "concurrent work items")
        ->capture_default_str();

    auto* c_sweep = app.add_subcommand("sweep", "full-catalog sweep with per-M aggregates");
    c_sweep->add_option("--formats", sel, "format names/globs (default: whole catalog)");
    c_sweep->add_option("--methods", method_names, "subset of model,egn,ssfm");
    c_sweep->add_option("--reference", reference, "reference method for deltas");
    c_sweep->add_option("-o,--output", cfg.output_dir, "output directory")
        ->capture_default_str();
    c_sweep->add_flag("!--no-cache", cfg.use_cache, "disable the results cache");
    c_sweep->add_option("--parallelism", cfg.parallelism, "concurrent work items")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*c_moments) {
            Constellation4D c = resolve_format(fmt_arg, cfg);
            MomentSet m = compute_moments(c);
            json j;
            j["constellation"] = c.name;
            j["M"] = c.points.size();
            for (const auto& [sig, v] : m.m) {
                char key[32];
                std::snprintf(key, sizeof(key), "%d%d%d%d", sig[0], sig[1], sig[2], sig[3]);
                j["moments"][key] = {v.real(), v.imag()};
            }
            std::cout << j.dump(2) << std::endl;
            return 0;
        }
        if (*c_model || *c_egn) {
            Constellation4D c = resolve_format(fmt_arg, cfg);
            LinkIntegrals li = compute_chi_integrals(cfg.link, cfg.quad);
            print_eta(*c_model ? eta_4d(c, cfg.link, li)
                               : eta_egn_projection(c, cfg.link, li));
            return 0;
        }
        if (*c_ssfm) {
            Constellation4D c = resolve_format(fmt_arg, cfg);
            SimConfig sc = cfg.sim;
            sc.link = cfg.link;
            EtaSsfm e = run_ssfm(c, sc);
            EtaEstimate est;
            est.method = EtaMethod::SSFM;
            est.constellation = c.name;
            est.cardinality = c.points.size();
            est.eta_x = e.eta_x;
            est.eta_y = e.eta_y;
            print_eta(est);
            return 0;
        }
        if (*c_compare || *c_sweep) {
            cfg.methods.clear();
            for (const auto& n : method_names) cfg.methods.push_back(method_from_name(n));
            cfg.reference = method_from_name(reference);
            if (*c_sweep && sel.empty()) sel = {"*"};
            cfg.selection = sel;
            SweepReport rep = sweep_catalog(cfg);
            int bad = 0;
            for (const auto& r : rep.records) {
                if (!r.error.empty()) {
                    std::cerr << "error: " << r.error << "\n";
                    ++bad;
                    continue;
                }
                std::printf("%-16s M=%5zu", r.name.c_str(), r.cardinality);
                for (EtaMethod m :
                     {EtaMethod::MODEL_4D, EtaMethod::EGN_4D, EtaMethod::SSFM}) {
                    auto it = r.results.find(m);
                    if (it == r.results.end()) continue;
                    if (!it->second.ok) {
                        std::printf("  %s=failed", method_name(m));
                        ++bad;
                        continue;
                    }
                    std::printf("  %s=(%.3f,%.3f)", method_name(m),
                                it->second.est.eta_x_db(), it->second.est.eta_y_db());
                }
                std::printf("\n");
            }
            std::printf("reports written to %s\n", cfg.output_dir.c_str());
            return bad == 0 ? 0 : 1;
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
    return 0;
}
