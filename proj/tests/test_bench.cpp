#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "dp4d/bench.hpp"

using namespace dp4d;
namespace fs = std::filesystem;

#ifndef DP4D_CATALOG_PATH
#define DP4D_CATALOG_PATH "catalog"
#endif

namespace {

ExperimentConfig fast_cfg(const std::string& out) {
    ExperimentConfig cfg;
    cfg.catalog_dir = DP4D_CATALOG_PATH;
    cfg.output_dir = out;
    cfg.quad.nodes = 50;
    cfg.quad.max_nodes = 100;
    cfg.quad.rel_tol = 1.0;
    cfg.methods = {EtaMethod::MODEL_4D, EtaMethod::EGN_4D};
    cfg.reference = EtaMethod::MODEL_4D;
    return cfg;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    REQUIRE(f);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("selection resolves deterministically by ascending M then name") {
    ExperimentConfig cfg = fast_cfg("bench_out_sel");
    cfg.selection = {"pm_16qam", "dicyclic4_16", "2a8psk_*"};
    std::vector<std::string> errors;
    auto v = resolve_selection(cfg, errors);
    CHECK(errors.empty());
    REQUIRE(v.size() == 5);
    CHECK(v[0].name == "dicyclic4_16");   // M=16
    CHECK(v[1].name == "2a8psk_5b");      // M=32
    CHECK(v[2].name == "2a8psk_6b");      // M=64
    CHECK(v[3].name == "2a8psk_7b");      // M=128
    CHECK(v[4].name == "pm_16qam");       // M=256
}

TEST_CASE("unknown selections surface in the error manifest") {
    ExperimentConfig cfg = fast_cfg("bench_out_err");
    cfg.selection = {"pm_qpsk", "no_such_format", "zzz_*"};
    SweepReport rep = sweep_catalog(cfg);
    CHECK(rep.errors.size() == 2);
    int ok = 0;
    for (const auto& r : rep.records)
        if (r.error.empty()) ++ok;
    CHECK(ok == 1);  // pm_qpsk still processed
}

TEST_CASE("catalog dir env override is honored") {
    ExperimentConfig cfg;
    cfg.catalog_dir.clear();
    setenv("DP4D_CATALOG_DIR", "/tmp/nonexistent_catalog_dir", 1);
    CHECK(resolve_catalog_dir(cfg) == "/tmp/nonexistent_catalog_dir");
    unsetenv("DP4D_CATALOG_DIR");
    CHECK(resolve_catalog_dir(cfg) == "catalog");
    cfg.catalog_dir = "explicit";
    CHECK(resolve_catalog_dir(cfg) == "explicit");
}

TEST_CASE("comparison records: delta vs self is zero, reports round-trip") {
    fs::remove_all("bench_out_a");
    ExperimentConfig cfg = fast_cfg("bench_out_a");
    cfg.selection = {"pm_qpsk", "dicyclic4_16", "c4_16"};
    auto records = run_comparison(cfg);
    REQUIRE(records.size() == 3);
    for (const auto& r : records) {
        REQUIRE(r.error.empty());
        REQUIRE(r.deltas.count(EtaMethod::MODEL_4D) == 1);
        CHECK(r.deltas.at(EtaMethod::MODEL_4D).delta_bar_db == 0.0);
        for (const auto& [m, res] : r.results) CHECK(res.ok);
        CHECK(std::isfinite(r.results.at(EtaMethod::MODEL_4D).est.eta_x_db()));
    }

    // CSV dB fields re-parse to the same 6-decimal canonical form
    std::ifstream csv("bench_out_a/results.csv");
    REQUIRE(csv);
    std::string line;
    int data_rows = 0;
    while (std::getline(csv, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("name,", 0) == 0) continue;
        ++data_rows;
        std::istringstream ss(line);
        std::string cell;
        int col = 0;
        while (std::getline(ss, cell, ',')) {
            ++col;
            if (col >= 4 && col <= 21 && !cell.empty()) {
                double v = std::stod(cell);
                char buf[32];
                std::snprintf(buf, sizeof(buf), "%.6f", v);
                CHECK(cell == buf);
            }
        }
    }
    CHECK(data_rows == 3);
}

TEST_CASE("reruns are byte-identical and come from the cache") {
    fs::remove_all("bench_out_b");
    ExperimentConfig cfg = fast_cfg("bench_out_b");
    cfg.selection = {"pm_qpsk", "dicyclic4_16"};
    run_comparison(cfg);
    std::string csv1 = slurp("bench_out_b/results.csv");
    std::string json1 = slurp("bench_out_b/results.json");
    std::string fig1 = slurp("bench_out_b/fig1_eta.tsv");

    auto records = run_comparison(cfg);
    CHECK(slurp("bench_out_b/results.csv") == csv1);
    CHECK(slurp("bench_out_b/results.json") == json1);
    CHECK(slurp("bench_out_b/fig1_eta.tsv") == fig1);
    for (const auto& r : records)
        for (const auto& [m, res] : r.results) CHECK(res.from_cache);
}

TEST_CASE("aggregates recomputed independently from the records match") {
    fs::remove_all("bench_out_c");
    ExperimentConfig cfg = fast_cfg("bench_out_c");
    cfg.selection = {"dicyclic4_16", "c4_16", "2a8psk_6b", "pm_16qam"};
    SweepReport rep = sweep_catalog(cfg);
    REQUIRE(rep.records.size() == 4);
    // independent pass: per-M stats of the EGN delta_bar
    std::map<std::size_t, std::vector<double>> by_m;
    for (const auto& r : rep.records)
        if (r.deltas.count(EtaMethod::EGN_4D))
            by_m[r.cardinality].push_back(r.deltas.at(EtaMethod::EGN_4D).delta_bar_db);
    REQUIRE(by_m.size() == rep.aggregates.size());
    for (const auto& a : rep.aggregates) {
        const auto& v = by_m.at(a.cardinality);
        const auto& s = a.per_method.at(EtaMethod::EGN_4D);
        CHECK(s.count == int(v.size()));
        double mean = 0.0, lo = v[0], hi = v[0];
        for (double d : v) {
            mean += d;
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
        mean /= double(v.size());
        CHECK(s.mean_delta_bar_db == doctest::Approx(mean).epsilon(1e-12));
        CHECK(s.min_delta_bar_db == lo);
        CHECK(s.max_delta_bar_db == hi);
    }
    // M=16 argmin under the model: dicyclic4_16 beats c4_16
    for (const auto& a : rep.aggregates)
        if (a.cardinality == 16) CHECK(a.argmin_format == "dicyclic4_16");
}

TEST_CASE("empty record list still emits valid header-only reports") {
    fs::remove_all("bench_out_d");
    ExperimentConfig cfg = fast_cfg("bench_out_d");
    emit_reports({}, {}, cfg);
    std::string csv = slurp("bench_out_d/results.csv");
    CHECK(csv.find("name,M,status") != std::string::npos);
    std::string js = slurp("bench_out_d/results.json");
    CHECK(js.find("\"records\": []") != std::string::npos);
}

TEST_CASE("digests separate content, link, and method") {
    Constellation4D a = generate_pm_qam(4);
    Constellation4D b = generate_pm_qam(16);
    CHECK(digest_constellation(a) != digest_constellation(b));
    ExperimentConfig cfg;
    LinkSpec l2 = cfg.link;
    l2.power_dbm = -25.0;
    CHECK(digest_link(cfg.link) != digest_link(l2));
    CHECK(digest_method(EtaMethod::MODEL_4D, cfg) != digest_method(EtaMethod::SSFM, cfg));
}
