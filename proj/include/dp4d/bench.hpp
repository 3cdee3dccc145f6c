#ifndef DP4D_BENCH_HPP
#define DP4D_BENCH_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dp4d/constellation.hpp"
#include "dp4d/link.hpp"
#include "dp4d/nli_model.hpp"
#include "dp4d/ssfm.hpp"

namespace dp4d {

struct ExperimentConfig {
    LinkSpec link;
    QuadratureSettings quad;
    SimConfig sim;  // link field is overwritten with `link` when running
    // catalog names, "*" / globs over the catalog dir, builtin generator
    // names (pm_qpsk, pm_16qam, pm_64qam), or explicit file paths
    std::vector<std::string> selection;
    std::vector<EtaMethod> methods{EtaMethod::MODEL_4D, EtaMethod::EGN_4D,
                                   EtaMethod::SSFM};
    EtaMethod reference = EtaMethod::SSFM;
    std::string catalog_dir;  // empty: $DP4D_CATALOG_DIR, then "catalog"
    std::string output_dir = "out";
    std::string cache_dir;  // empty: <output_dir>/cache
    bool use_cache = true;
    int parallelism = 1;
};

struct MethodResult {
    EtaEstimate est;
    bool ok = false;
    bool flagged = false;  // e.g. SSFM divergence
    std::string error;
    // provenance of the number
    int quad_nodes = 0;
    double quad_rel_err = 0.0;
    std::uint64_t seed = 0;
    int num_symbols = 0;
    bool from_cache = false;
};

struct ComparisonRecord {
    std::string name;
    std::size_t cardinality = 0;
    EtaMethod reference = EtaMethod::SSFM;
    std::map<EtaMethod, MethodResult> results;
    std::map<EtaMethod, EtaMetrics> deltas;  // vs reference, ok methods only
    std::string error;  // nonempty: constellation could not be processed
};

struct MethodAggregate {
    int count = 0;
    double mean_delta_bar_db = 0.0;
    double min_delta_bar_db = 0.0;
    double max_delta_bar_db = 0.0;
};

struct CardinalityAggregate {
    std::size_t cardinality = 0;
    std::map<EtaMethod, MethodAggregate> per_method;  // deltas vs reference
    std::string argmin_format;  // lowest eta-bar under the reference-free model
    double argmin_eta_bar_db = 0.0;
    bool argmin_tie = false;
};

struct SweepReport {
    std::vector<ComparisonRecord> records;
    std::vector<CardinalityAggregate> aggregates;
    std::vector<std::string> errors;  // per-item error manifest
};

const char* method_name(EtaMethod m);
EtaMethod method_from_name(const std::string& s);

std::string resolve_catalog_dir(const ExperimentConfig& cfg);
// expand the selection into (name, loaded constellation) in deterministic
// order (ascending M, then name); unresolvable entries land in `errors`
std::vector<Constellation4D> resolve_selection(const ExperimentConfig& cfg,
                                               std::vector<std::string>& errors);

// content digests used for the results cache
std::uint64_t digest_constellation(const Constellation4D& c);
std::uint64_t digest_link(const LinkSpec& link);
std::uint64_t digest_method(EtaMethod m, const ExperimentConfig& cfg);

std::vector<ComparisonRecord> run_comparison(const ExperimentConfig& cfg);
SweepReport sweep_catalog(const ExperimentConfig& cfg);

// results.csv, results.json, fig1_eta.tsv, fig2_gap.tsv, fig3_argmin.tsv in
// cfg.output_dir; wall-clock metadata goes to run_meta.json only so the main
// reports are byte-identical across reruns
void emit_reports(const std::vector<ComparisonRecord>& records,
                  const std::vector<CardinalityAggregate>& aggregates,
                  const ExperimentConfig& cfg);

}  // namespace dp4d

#endif
