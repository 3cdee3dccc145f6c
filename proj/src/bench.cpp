#include "dp4d/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace dp4d {

namespace {

std::string fmt_db(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// '*' and '?' wildcard match (no character classes)
bool glob_match(const std::string& pat, const std::string& str, std::size_t p = 0,
                std::size_t s = 0) {
    while (p < pat.size()) {
        if (pat[p] == '*') {
            for (std::size_t k = s; k <= str.size(); ++k)
                if (glob_match(pat, str, p + 1, k)) return true;
            return false;
        }
        if (s == str.size()) return false;
        if (pat[p] != '?' && pat[p] != str[s]) return false;
        ++p, ++s;
    }
    return s == str.size();
}

Constellation4D builtin_format(const std::string& name) {
    if (name == "pm_qpsk" || name == "pm_4qam") return generate_pm_qam(4);
    if (name == "pm_16qam") return generate_pm_qam(16);
    if (name == "pm_64qam") return generate_pm_qam(64);
    if (name == "pm_256qam") return generate_pm_qam(256);
    throw std::runtime_error("unknown builtin format: " + name);
}

bool is_builtin(const std::string& name) {
    return name == "pm_qpsk" || name == "pm_4qam" || name == "pm_16qam" ||
           name == "pm_64qam" || name == "pm_256qam";
}

double max_rel_err(const LinkIntegrals& li) {
    double worst = 0.0;
    for (std::size_t i = 0; i < li.chi_bar.size(); ++i) {
        double mag = std::abs(li.chi_bar[i]);
        if (mag > 0.0) worst = std::max(worst, li.abs_err[i] / mag);
    }
    return worst;
}

}  // namespace

const char* method_name(EtaMethod m) {
    switch (m) {
        case EtaMethod::MODEL_4D: return "model";
        case EtaMethod::EGN_4D: return "egn";
        case EtaMethod::SSFM: return "ssfm";
    }
    return "?";
}

EtaMethod method_from_name(const std::string& s) {
    if (s == "model" || s == "MODEL_4D") return EtaMethod::MODEL_4D;
    if (s == "egn" || s == "EGN_4D") return EtaMethod::EGN_4D;
    if (s == "ssfm" || s == "SSFM") return EtaMethod::SSFM;
    throw std::invalid_argument("unknown method: " + s);
}

std::string resolve_catalog_dir(const ExperimentConfig& cfg) {
    if (!cfg.catalog_dir.empty()) return cfg.catalog_dir;
    if (const char* env = std::getenv("DP4D_CATALOG_DIR"); env && *env) return env;
    return "catalog";
}

std::vector<Constellation4D> resolve_selection(const ExperimentConfig& cfg,
                                               std::vector<std::string>& errors) {
    const std::string dir = resolve_catalog_dir(cfg);
    std::vector<std::string> catalog_names;
    if (fs::is_directory(dir))
        for (const auto& e : fs::directory_iterator(dir))
            if (e.path().extension() == ".txt" &&
                e.path().stem().string().find("manifest") == std::string::npos &&
                e.path().stem().string() != "2a8psk_ratios")
                catalog_names.push_back(e.path().stem().string());
    std::sort(catalog_names.begin(), catalog_names.end());

    std::vector<Constellation4D> out;
    std::vector<std::string> seen;
    auto add_by_name = [&](const std::string& name) {
        if (std::find(seen.begin(), seen.end(), name) != seen.end()) return;
        seen.push_back(name);
        try {
            if (is_builtin(name))
                out.push_back(builtin_format(name));
            else
                out.push_back(normalize_energy(
                    load_constellation_file(dir + "/" + name + ".txt")));
        } catch (const std::exception& ex) {
            errors.push_back(name + ": " + ex.what());
        }
    };
    for (const auto& sel : cfg.selection) {
        if (sel.find('*') != std::string::npos || sel.find('?') != std::string::npos) {
            bool any = false;
            for (const auto& n : catalog_names)
                if (glob_match(sel, n)) add_by_name(n), any = true;
            if (!any) errors.push_back(sel + ": no catalog entry matches");
        } else if (sel.find('/') != std::string::npos || fs::is_regular_file(sel)) {
            try {
                out.push_back(normalize_energy(load_constellation_file(sel)));
                seen.push_back(out.back().name);
            } catch (const std::exception& ex) {
                errors.push_back(sel + ": " + std::string(ex.what()));
            }
        } else {
            if (!is_builtin(sel) && !fs::is_regular_file(dir + "/" + sel + ".txt")) {
                errors.push_back(sel + ": not found in catalog " + dir);
                continue;
            }
            add_by_name(sel);
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const Constellation4D& a, const Constellation4D& b) {
                         if (a.points.size() != b.points.size())
                             return a.points.size() < b.points.size();
                         return a.name < b.name;
                     });
    return out;
}

std::uint64_t digest_constellation(const Constellation4D& c) {
    std::ostringstream ss;
    ss << c.name << '\n';
    char buf[128];
    for (const auto& p : c.points) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g %.17g\n", p[0].real(),
                      p[0].imag(), p[1].real(), p[1].imag());
        ss << buf;
    }
    return fnv1a(ss.str());
}

std::uint64_t digest_link(const LinkSpec& l) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g %.17g %.17g %d %.17g %.17g %.17g",
                  l.alpha_db_km, l.dispersion_ps_nm_km, l.lambda_nm, l.gamma_w_km,
                  l.span_length_km, l.span_count, l.symbol_rate, l.rolloff,
                  l.power_dbm);
    return fnv1a(buf);
}

std::uint64_t digest_method(EtaMethod m, const ExperimentConfig& cfg) {
    char buf[256];
    if (m == EtaMethod::SSFM)
        std::snprintf(buf, sizeof(buf), "ssfm %d %d %.17g %.17g %llu", cfg.sim.num_symbols,
                      cfg.sim.samples_per_symbol, cfg.sim.phi_nl_max, cfg.sim.max_step_km,
                      static_cast<unsigned long long>(cfg.sim.seed));
    else
        std::snprintf(buf, sizeof(buf), "%s %d %d %.17g", method_name(m), cfg.quad.nodes,
                      cfg.quad.max_nodes, cfg.quad.rel_tol);
    return fnv1a(buf);
}

namespace {

std::string cache_path(const ExperimentConfig& cfg, const Constellation4D& c,
                       EtaMethod m) {
    std::string dir = cfg.cache_dir.empty() ? cfg.output_dir + "/cache" : cfg.cache_dir;
    std::uint64_t key = fnv1a(hex64(digest_constellation(c)) + hex64(digest_link(cfg.link)) +
                              hex64(digest_method(m, cfg)));
    return dir + "/" + std::string(method_name(m)) + "_" + hex64(key) + ".json";
}

bool cache_load(const std::string& path, MethodResult& r) {
    std::ifstream f(path);
    if (!f) return false;
    try {
        json j = json::parse(f);
        r.est.eta_x = j.at("eta_x").get<double>();
        r.est.eta_y = j.at("eta_y").get<double>();
        r.quad_nodes = j.value("quad_nodes", 0);
        r.quad_rel_err = j.value("quad_rel_err", 0.0);
        r.seed = j.value("seed", std::uint64_t{0});
        r.num_symbols = j.value("num_symbols", 0);
        r.flagged = j.value("flagged", false);
        r.ok = true;
        r.from_cache = true;
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

void cache_store(const std::string& path, const MethodResult& r,
                 const Constellation4D& c) {
    fs::create_directories(fs::path(path).parent_path());
    json j;
    j["constellation"] = c.name;
    j["M"] = c.points.size();
    j["method"] = method_name(r.est.method);
    j["eta_x"] = r.est.eta_x;
    j["eta_y"] = r.est.eta_y;
    j["quad_nodes"] = r.quad_nodes;
    j["quad_rel_err"] = r.quad_rel_err;
    j["seed"] = r.seed;
    j["num_symbols"] = r.num_symbols;
    j["flagged"] = r.flagged;
    std::ofstream f(path);
    f << j.dump(2) << '\n';
}

MethodResult evaluate_method(const Constellation4D& c, EtaMethod m,
                             const ExperimentConfig& cfg, const LinkIntegrals* li,
                             std::mutex& io_mutex) {
    MethodResult r;
    r.est.method = m;
    r.est.constellation = c.name;
    r.est.cardinality = c.points.size();
    const std::string cpath = cache_path(cfg, c, m);
    if (cfg.use_cache) {
        std::lock_guard<std::mutex> lock(io_mutex);
        if (cache_load(cpath, r)) {
            r.est.method = m;
            r.est.constellation = c.name;
            r.est.cardinality = c.points.size();
            return r;
        }
    }
    try {
        if (m == EtaMethod::SSFM) {
            SimConfig sc = cfg.sim;
            sc.link = cfg.link;
            EtaSsfm e = run_ssfm(c, sc);
            r.est.eta_x = e.eta_x;
            r.est.eta_y = e.eta_y;
            r.seed = sc.seed;
            r.num_symbols = sc.num_symbols;
            if (!std::isfinite(e.eta_x) || !std::isfinite(e.eta_y) || e.eta_x <= 0.0 ||
                e.eta_y <= 0.0) {
                r.flagged = true;
                r.error = "ssfm produced non-finite eta";
            }
        } else {
            EtaEstimate e = (m == EtaMethod::MODEL_4D)
                                ? eta_4d(c, cfg.link, *li)
                                : eta_egn_projection(c, cfg.link, *li);
            r.est = e;
            r.quad_nodes = li->nodes;
            r.quad_rel_err = max_rel_err(*li);
        }
        r.ok = true;
    } catch (const std::exception& ex) {
        r.ok = false;
        r.error = ex.what();
    }
    if (cfg.use_cache && r.ok && !r.flagged) {
        std::lock_guard<std::mutex> lock(io_mutex);
        cache_store(cpath, r, c);
    }
    return r;
}

std::vector<CardinalityAggregate> aggregate(const std::vector<ComparisonRecord>& records) {
    std::map<std::size_t, std::vector<const ComparisonRecord*>> by_m;
    for (const auto& r : records)
        if (r.error.empty()) by_m[r.cardinality].push_back(&r);
    std::vector<CardinalityAggregate> out;
    for (const auto& [m, recs] : by_m) {
        CardinalityAggregate agg;
        agg.cardinality = m;
        for (const auto* rec : recs) {
            for (const auto& [method, metrics] : rec->deltas) {
                auto& a = agg.per_method[method];
                double d = metrics.delta_bar_db;
                if (a.count == 0) {
                    a.min_delta_bar_db = a.max_delta_bar_db = d;
                } else {
                    a.min_delta_bar_db = std::min(a.min_delta_bar_db, d);
                    a.max_delta_bar_db = std::max(a.max_delta_bar_db, d);
                }
                a.mean_delta_bar_db += d;
                ++a.count;
            }
            // eta-bar winner judged on the model estimate (Table-2 style)
            auto it = rec->results.find(EtaMethod::MODEL_4D);
            if (it == rec->results.end()) it = rec->results.find(rec->reference);
            if (it == rec->results.end() || !it->second.ok) continue;
            double eb = it->second.est.eta_bar_db();
            if (agg.argmin_format.empty() || eb < agg.argmin_eta_bar_db) {
                agg.argmin_format = rec->name;
                agg.argmin_eta_bar_db = eb;
                agg.argmin_tie = false;
            } else if (eb == agg.argmin_eta_bar_db) {
                agg.argmin_tie = true;  // lexicographic winner already in place
            }
        }
        for (auto& [method, a] : agg.per_method)
            if (a.count > 0) a.mean_delta_bar_db /= a.count;
        out.push_back(agg);
    }
    return out;
}

}  // namespace

std::vector<ComparisonRecord> run_comparison(const ExperimentConfig& cfg) {
    if (cfg.methods.empty())
        throw std::invalid_argument("run_comparison: at least one method required");
    std::vector<std::string> errors;
    std::vector<Constellation4D> formats = resolve_selection(cfg, errors);

    bool needs_integrals = false;
    for (EtaMethod m : cfg.methods)
        if (m != EtaMethod::SSFM) needs_integrals = true;
    LinkIntegrals li;
    if (needs_integrals) li = compute_chi_integrals(cfg.link, cfg.quad);

    std::vector<ComparisonRecord> records(formats.size());
    std::mutex io_mutex;
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= formats.size()) break;
            ComparisonRecord& rec = records[i];
            rec.name = formats[i].name;
            rec.cardinality = formats[i].points.size();
            rec.reference = cfg.reference;
            for (EtaMethod m : cfg.methods)
                rec.results[m] = evaluate_method(formats[i], m, cfg,
                                                 needs_integrals ? &li : nullptr, io_mutex);
            auto ref = rec.results.find(cfg.reference);
            if (ref != rec.results.end() && ref->second.ok && !ref->second.flagged)
                for (const auto& [m, res] : rec.results)
                    if (res.ok && !res.flagged)
                        rec.deltas[m] = eta_metrics(res.est, ref->second.est);
        }
    };
    int nthreads = std::max(1, cfg.parallelism);
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    // unresolved selections become error records so nothing is silently dropped
    for (const auto& e : errors) {
        ComparisonRecord rec;
        rec.name = e.substr(0, e.find(':'));
        rec.reference = cfg.reference;
        rec.error = e;
        records.push_back(rec);
    }
    emit_reports(records, aggregate(records), cfg);
    return records;
}

SweepReport sweep_catalog(const ExperimentConfig& cfg) {
    if (cfg.selection.empty())
        throw std::invalid_argument("sweep_catalog: empty selection");
    SweepReport rep;
    rep.records = run_comparison(cfg);
    rep.aggregates = aggregate(rep.records);
    for (const auto& r : rep.records)
        if (!r.error.empty()) rep.errors.push_back(r.error);
    emit_reports(rep.records, rep.aggregates, cfg);
    return rep;
}

namespace {

json record_json(const ComparisonRecord& r) {
    json j;
    j["name"] = r.name;
    j["M"] = r.cardinality;
    j["reference"] = method_name(r.reference);
    if (!r.error.empty()) {
        j["error"] = r.error;
        return j;
    }
    for (const auto& [m, res] : r.results) {
        json v;
        v["ok"] = res.ok;
        v["flagged"] = res.flagged;
        if (!res.error.empty()) v["error"] = res.error;
        if (res.ok) {
            v["eta_x_db"] = fmt_db(res.est.eta_x_db());
            v["eta_y_db"] = fmt_db(res.est.eta_y_db());
            v["eta_bar_db"] = fmt_db(res.est.eta_bar_db());
            v["eta_x"] = res.est.eta_x;
            v["eta_y"] = res.est.eta_y;
        }
        if (m == EtaMethod::SSFM) {
            v["seed"] = res.seed;
            v["num_symbols"] = res.num_symbols;
        } else {
            v["quad_nodes"] = res.quad_nodes;
            v["quad_rel_err"] = res.quad_rel_err;
        }
        j["methods"][method_name(m)] = v;
    }
    for (const auto& [m, d] : r.deltas) {
        json v;
        v["delta_x_db"] = fmt_db(d.delta_x_db);
        v["delta_y_db"] = fmt_db(d.delta_y_db);
        v["delta_bar_db"] = fmt_db(d.delta_bar_db);
        j["deltas"][method_name(m)] = v;
    }
    return j;
}

}  // namespace

void emit_reports(const std::vector<ComparisonRecord>& records,
                  const std::vector<CardinalityAggregate>& aggregates,
                  const ExperimentConfig& cfg) {
    fs::create_directories(cfg.output_dir);
    const EtaMethod method_order[] = {EtaMethod::MODEL_4D, EtaMethod::EGN_4D,
                                      EtaMethod::SSFM};

    // ---- CSV ----
    {
        std::ofstream csv(cfg.output_dir + "/results.csv");
        if (!csv) throw std::runtime_error("cannot write " + cfg.output_dir + "/results.csv");
        csv << "# one row per constellation; dB fields use fixed 6-decimal formatting\n";
        csv << "# eta in dB(1/W^2); delta_* vs the reference method (see results.json)\n";
        csv << "name,M,status";
        for (EtaMethod m : method_order) {
            std::string p = method_name(m);
            csv << "," << p << "_eta_x_db," << p << "_eta_y_db," << p << "_eta_bar_db,"
                << p << "_delta_x_db," << p << "_delta_y_db," << p << "_delta_bar_db";
        }
        csv << ",quad_nodes,ssfm_seed,ssfm_symbols\n";
        for (const auto& r : records) {
            csv << r.name << "," << r.cardinality << ","
                << (r.error.empty() ? "ok" : "error");
            int quad_nodes = 0;
            std::uint64_t seed = 0;
            int nsym = 0;
            for (EtaMethod m : method_order) {
                auto it = r.results.find(m);
                if (it == r.results.end() || !it->second.ok) {
                    csv << ",,,,,,";
                    continue;
                }
                const MethodResult& res = it->second;
                csv << "," << fmt_db(res.est.eta_x_db()) << "," << fmt_db(res.est.eta_y_db())
                    << "," << fmt_db(res.est.eta_bar_db());
                auto d = r.deltas.find(m);
                if (d != r.deltas.end())
                    csv << "," << fmt_db(d->second.delta_x_db) << ","
                        << fmt_db(d->second.delta_y_db) << ","
                        << fmt_db(d->second.delta_bar_db);
                else
                    csv << ",,,";
                if (m == EtaMethod::SSFM) {
                    seed = res.seed;
                    nsym = res.num_symbols;
                } else if (res.quad_nodes > 0) {
                    quad_nodes = res.quad_nodes;
                }
            }
            csv << "," << quad_nodes << "," << seed << "," << nsym << "\n";
        }
    }

    // ---- JSON ----
    {
        json j;
        j["config"]["link"] = {{"alpha_db_km", cfg.link.alpha_db_km},
                               {"dispersion_ps_nm_km", cfg.link.dispersion_ps_nm_km},
                               {"lambda_nm", cfg.link.lambda_nm},
                               {"gamma_w_km", cfg.link.gamma_w_km},
                               {"span_length_km", cfg.link.span_length_km},
                               {"span_count", cfg.link.span_count},
                               {"symbol_rate", cfg.link.symbol_rate},
                               {"rolloff", cfg.link.rolloff},
                               {"power_dbm", cfg.link.power_dbm}};
        j["config"]["quadrature"] = {{"nodes", cfg.quad.nodes},
                                     {"max_nodes", cfg.quad.max_nodes},
                                     {"rel_tol", cfg.quad.rel_tol}};
        j["config"]["sim"] = {{"num_symbols", cfg.sim.num_symbols},
                              {"samples_per_symbol", cfg.sim.samples_per_symbol},
                              {"phi_nl_max", cfg.sim.phi_nl_max},
                              {"max_step_km", cfg.sim.max_step_km},
                              {"seed", cfg.sim.seed}};
        j["config"]["reference"] = method_name(cfg.reference);
        json methods = json::array();
        for (EtaMethod m : cfg.methods) methods.push_back(method_name(m));
        j["config"]["methods"] = methods;
        j["records"] = json::array();
        for (const auto& r : records) j["records"].push_back(record_json(r));
        j["aggregates"] = json::array();
        for (const auto& a : aggregates) {
            json v;
            v["M"] = a.cardinality;
            for (const auto& [m, s] : a.per_method)
                v["delta_bar_db"][method_name(m)] = {{"count", s.count},
                                                     {"mean", fmt_db(s.mean_delta_bar_db)},
                                                     {"min", fmt_db(s.min_delta_bar_db)},
                                                     {"max", fmt_db(s.max_delta_bar_db)}};
            v["argmin_format"] = a.argmin_format;
            v["argmin_eta_bar_db"] = fmt_db(a.argmin_eta_bar_db);
            v["argmin_tie"] = a.argmin_tie;
            j["aggregates"].push_back(v);
        }
        json errs = json::array();
        for (const auto& r : records)
            if (!r.error.empty()) errs.push_back(r.error);
        j["errors"] = errs;
        std::ofstream out(cfg.output_dir + "/results.json");
        out << j.dump(2) << '\n';
    }

    // ---- plot data ----
    {
        std::ofstream f(cfg.output_dir + "/fig1_eta.tsv");
        f << "name\tM\tmethod\teta_x_db\teta_y_db\n";
        for (const auto& r : records) {
            if (!r.error.empty()) continue;
            for (EtaMethod m : method_order) {
                auto it = r.results.find(m);
                if (it == r.results.end() || !it->second.ok) continue;
                f << r.name << '\t' << r.cardinality << '\t' << method_name(m) << '\t'
                  << fmt_db(it->second.est.eta_x_db()) << '\t'
                  << fmt_db(it->second.est.eta_y_db()) << '\n';
            }
        }
    }
    {
        std::ofstream f(cfg.output_dir + "/fig2_gap.tsv");
        f << "M\tmethod\tmean_delta_bar_db\tmin_delta_bar_db\tmax_delta_bar_db\tcount\n";
        for (const auto& a : aggregates)
            for (EtaMethod m : method_order) {
                auto it = a.per_method.find(m);
                if (it == a.per_method.end() || it->second.count == 0) continue;
                f << a.cardinality << '\t' << method_name(m) << '\t'
                  << fmt_db(it->second.mean_delta_bar_db) << '\t'
                  << fmt_db(it->second.min_delta_bar_db) << '\t'
                  << fmt_db(it->second.max_delta_bar_db) << '\t' << it->second.count
                  << '\n';
            }
    }
    {
        std::ofstream f(cfg.output_dir + "/fig3_argmin.tsv");
        f << "M\tformat\teta_bar_db\ttie\n";
        for (const auto& a : aggregates) {
            if (a.argmin_format.empty()) continue;
            f << a.cardinality << '\t' << a.argmin_format << '\t'
              << fmt_db(a.argmin_eta_bar_db) << '\t' << (a.argmin_tie ? 1 : 0) << '\n';
        }
    }

    // wall-clock info lives here and only here, so the reports above stay
    // byte-identical across reruns
    {
        auto now = std::chrono::system_clock::now();
        std::time_t t = std::chrono::system_clock::to_time_t(now);
        char buf[64];
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
        json meta;
        meta["generated_at"] = buf;
        std::ofstream out(cfg.output_dir + "/run_meta.json");
        out << meta.dump(2) << '\n';
    }
}

}  // namespace dp4d
