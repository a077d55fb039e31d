#include "caa/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "caa/ingest.hpp"

namespace caa {

namespace {

using nlohmann::json;

std::vector<Scheme> parse_schemes(const std::vector<std::string>& tokens) {
    std::vector<Scheme> out;
    for (const auto& t : tokens) out.push_back(parse_scheme(t));
    if (out.empty()) throw UsageError("scheme selection must not be empty");
    return out;
}

void check_selection(const std::string& value, std::initializer_list<const char*> allowed,
                     const char* key) {
    for (const char* a : allowed)
        if (value == a) return;
    throw UsageError(std::string("invalid value '") + value + "' for " + key);
}

std::string canonical_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << cfg.publications.string() << '|' << cfg.registry.string() << '|'
        << cfg.travel_times.string() << '|' << cfg.datasets << '|' << cfg.models << '|';
    for (auto s : cfg.schemes) out << to_string(s) << ',';
    out << '|';
    for (auto t : cfg.thresholds) out << t << ',';
    out << '|' << cfg.include_other << '|' << cfg.fallback_speed_kmh << '|' << cfg.floor_seconds
        << '|' << cfg.fit.rel_tol << '|' << cfg.fit.grad_tol << '|' << cfg.fit.max_iterations;
    return out.str();
}

class TableWriter {
public:
    TableWriter(const RunConfig& cfg, const std::filesystem::path& path) : out_(path) {
        if (!out_) throw DataError("cannot write file: " + path.string());
        out_ << "# fingerprint: " << config_fingerprint(cfg) << '\n';
        if (cfg.timestamp_header) {
            auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
            out_ << "# generated: " << std::put_time(std::gmtime(&now), "%FT%TZ") << '\n';
        }
    }

    std::ofstream& stream() { return out_; }

private:
    std::ofstream out_;
};

struct LoadedInputs {
    PublicationSet pubs;       // validated subset
    AffiliationRegistry registry;
    ValidationReport report;
};

LoadedInputs load_inputs(const RunConfig& cfg) {
    LoadedInputs in;
    in.registry = load_registry(cfg.registry);
    PublicationSet raw = load_publications(cfg.publications);
    in.report = validate(raw, in.registry, &in.pubs);
    return in;
}

TravelTimeTable load_travel_table(const RunConfig& cfg) {
    if (cfg.travel_times.empty()) return {};
    return load_travel_times(cfg.travel_times);
}

std::filesystem::path links_path(const RunConfig& cfg, Provenance tag) {
    return cfg.output_dir / ("links_" + to_string(tag) + ".tsv");
}

std::filesystem::path network_base(const RunConfig& cfg, Provenance tag) {
    return cfg.output_dir / ("network_" + to_string(tag));
}

std::vector<Provenance> selected_datasets(const RunConfig& cfg) {
    std::vector<Provenance> out;
    if (cfg.want_all()) out.push_back(Provenance::CoAffAll);
    if (cfg.want_stable()) out.push_back(Provenance::CoAffStable);
    return out;
}

std::vector<GravityModel> selected_models(const RunConfig& cfg) {
    std::vector<GravityModel> out;
    if (cfg.models != "M2") out.push_back(GravityModel::M1);
    if (cfg.models != "M1") out.push_back(GravityModel::M2);
    return out;
}

int guarded(const char* stage, int (*body)(const RunConfig&), const RunConfig& cfg) {
    try {
        return body(cfg);
    } catch (const UsageError& e) {
        std::cerr << stage << ": " << e.what() << '\n';
        return 1;
    } catch (const DataError& e) {
        std::cerr << stage << ": " << e.what() << '\n';
        return 2;
    } catch (const NumericError& e) {
        std::cerr << stage << ": " << e.what() << '\n';
        return 3;
    }
}

int run_validate(const RunConfig& cfg) {
    LoadedInputs in = load_inputs(cfg);
    std::cout << "read: " << in.report.read << "\nkept: " << in.report.kept
              << "\ndropped: " << in.report.dropped << '\n';
    for (const auto& id : in.report.unresolved_ids) std::cout << "unresolved: " << id << '\n';
    std::cout << "parent organisations: " << in.registry.parent_count() << '\n';
    return in.report.clean() ? 0 : 2;
}

int run_links(const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.output_dir);
    LoadedInputs in = load_inputs(cfg);
    LinkSet all = generate_all(in.pubs, in.registry);
    export_links(all, links_path(cfg, Provenance::CoAffAll));
    std::cout << "CoAffAll: " << all.size();
    if (cfg.want_stable()) {
        LinkSet stable = stability_filter(all);
        export_links(stable, links_path(cfg, Provenance::CoAffStable));
        std::cout << ", CoAffStable: " << stable.size();
    }
    std::cout << '\n';
    return 0;
}

int run_network(const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.output_dir);
    AffiliationRegistry registry = load_registry(cfg.registry);
    for (Provenance tag : selected_datasets(cfg)) {
        LinkSet links = import_links(links_path(cfg, tag));
        OrgNetwork net = build_network(links, registry);
        export_graph(net, network_base(cfg, tag), GraphFormat::EdgeList, cfg.include_other);
        export_graph(net, network_base(cfg, tag), GraphFormat::GraphML, cfg.include_other);
        std::cout << to_string(tag) << ": " << net.node_count() << " nodes, " << net.edge_count()
                  << " edges, total strength " << net.total_strength() << '\n';
    }
    return 0;
}

int run_gravity(const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.output_dir);
    TravelTimeTable travel = load_travel_table(cfg);
    DesignOptions dopts;
    dopts.impedance.fallback_speed_kmh = cfg.fallback_speed_kmh;
    dopts.impedance.floor_seconds = cfg.floor_seconds;
    FitOptions fopts = cfg.fit;
    fopts.workers = cfg.workers;
    for (Provenance tag : selected_datasets(cfg)) {
        OrgNetwork net = import_network(network_base(cfg, tag));
        for (GravityModel model : selected_models(cfg)) {
            DesignMatrix design = build_design(net, travel, model, dopts);
            ZinbFit fit = fit_zinb(design, fopts);
            auto path = cfg.output_dir /
                        ("gravity_" + to_string(tag) + "_" + to_string(model) + ".tsv");
            TableWriter writer(cfg, path);
            writer.stream() << format_fit_report(fit, static_cast<std::size_t>(design.n()));
            std::cout << to_string(tag) << " " << to_string(model) << ": N = " << design.n()
                      << ", lnL = " << fit.loglik << ", iterations = " << fit.iterations << '\n';
        }
    }
    return 0;
}

void write_scores(const RunConfig& cfg, TableWriter& writer, const std::vector<UnitScore>& scores,
                  const AffiliationRegistry& registry, bool type_level) {
    auto& out = writer.stream();
    out.setf(std::ios::fixed);
    out.precision(6);
    for (const auto& s : scores) {
        const ParentInfo* p = type_level ? nullptr : registry.try_parent(s.unit);
        out << s.unit << '\t' << (p ? to_string(p->type) : s.unit) << '\t' << to_string(s.scheme)
            << '\t' << to_string(s.dataset) << '\t' << s.mwpr << '\t' << s.n_effective << '\t'
            << s.n_raw << '\n';
    }
}

int run_impact(const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.output_dir);
    LoadedInputs in = load_inputs(cfg);
    // Reference sets come from the full validated publication universe.
    RefSetIndex refsets = RefSetIndex::build(in.pubs);

    // Eligibility for threshold rankings uses AA raw counts in CoAffAll.
    std::map<std::string, long> aa_all_counts;

    for (bool type_level : {false, true}) {
        const char* kind = type_level ? "types" : "orgs";
        TableWriter scores_writer(cfg, cfg.output_dir / ("impact_scores_" + std::string(kind) + ".tsv"));
        scores_writer.stream() << "unit\ttype\tscheme\tdataset\tmwpr\tn_effective\tn_raw\n";
        TableWriter series_writer(cfg, cfg.output_dir / ("impact_series_" + std::string(kind) + ".tsv"));
        series_writer.stream() << "unit\tyear\tscheme\tdataset\tmwpr\tn_effective\tn_raw\n";
        series_writer.stream().setf(std::ios::fixed);
        series_writer.stream().precision(6);
        TableWriter long_writer(cfg, cfg.output_dir / ("impact_long_" + std::string(kind) + ".tsv"));
        long_writer.stream() << "unit\tscheme\tdataset\tpub_id\tyear\twpr\tshare\n";
        long_writer.stream().setf(std::ios::fixed);
        long_writer.stream().precision(6);

        std::map<std::pair<Provenance, Scheme>, std::vector<UnitScore>> org_scores;
        for (Provenance tag : selected_datasets(cfg)) {
            LinkSet links = import_links(links_path(cfg, tag));
            for (Scheme scheme : cfg.schemes) {
                auto contribs =
                    unit_contributions(in.pubs, links, in.registry, refsets, scheme, type_level);
                auto scores = unit_scores(contribs, scheme, tag);
                write_scores(cfg, scores_writer, scores, in.registry, type_level);
                for (const auto& [key, score] : annual_series(contribs, scheme, tag))
                    series_writer.stream()
                        << key.first << '\t' << key.second << '\t' << to_string(scheme) << '\t'
                        << to_string(tag) << '\t' << score.mwpr << '\t' << score.n_effective << '\t'
                        << score.n_raw << '\n';
                for (const auto& [unit, items] : contribs)
                    for (const auto& c : items)
                        long_writer.stream() << unit << '\t' << to_string(scheme) << '\t'
                                             << to_string(tag) << '\t' << c.pub_id << '\t' << c.year
                                             << '\t' << c.wpr << '\t' << c.share << '\n';
                if (!type_level) {
                    if (scheme == Scheme::AA && tag == Provenance::CoAffAll)
                        for (const auto& s : scores) aa_all_counts[s.unit] = s.n_raw;
                    org_scores[{tag, scheme}] = scores;
                }
            }
        }

        if (!type_level) {
            for (long threshold : cfg.thresholds) {
                TableWriter ranking_writer(
                    cfg, cfg.output_dir / ("impact_ranking_min" + std::to_string(threshold) + ".tsv"));
                ranking_writer.stream() << "rank\tunit\ttype\tscheme\tdataset\tmwpr\tn_effective\tn_raw\n";
                ranking_writer.stream().setf(std::ios::fixed);
                ranking_writer.stream().precision(6);
                for (auto& [key, scores] : org_scores) {
                    std::vector<UnitScore> eligible;
                    for (const auto& s : scores) {
                        auto it = aa_all_counts.find(s.unit);
                        if (it != aa_all_counts.end() && it->second >= threshold)
                            eligible.push_back(s);
                    }
                    auto ranked = ranked_units(std::move(eligible), 0, 10);
                    long rank = 1;
                    for (const auto& s : ranked) {
                        const ParentInfo* p = in.registry.try_parent(s.unit);
                        ranking_writer.stream()
                            << rank++ << '\t' << s.unit << '\t'
                            << (p ? to_string(p->type) : "other") << '\t' << to_string(s.scheme)
                            << '\t' << to_string(s.dataset) << '\t' << s.mwpr << '\t'
                            << s.n_effective << '\t' << s.n_raw << '\n';
                    }
                }
            }
        }
    }
    return 0;
}

int run_report(const RunConfig& cfg) {
    if (int rc = run_links(cfg); rc != 0) return rc;
    if (int rc = run_network(cfg); rc != 0) return rc;
    if (int rc = run_gravity(cfg); rc != 0) return rc;
    if (int rc = run_impact(cfg); rc != 0) return rc;
    TableWriter manifest(cfg, cfg.output_dir / "run_manifest.tsv");
    manifest.stream() << "key\tvalue\n"
                      << "publications\t" << cfg.publications.string() << '\n'
                      << "registry\t" << cfg.registry.string() << '\n'
                      << "travel_times\t" << cfg.travel_times.string() << '\n'
                      << "datasets\t" << cfg.datasets << '\n'
                      << "models\t" << cfg.models << '\n'
                      << "fingerprint\t" << config_fingerprint(cfg) << '\n';
    return 0;
}

}  // namespace

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw UsageError("config parse error: " + std::string(e.what()));
    }
    RunConfig cfg;
    try {
        cfg.publications = j.value("publications", std::string{});
        cfg.registry = j.value("registry", std::string{});
        cfg.travel_times = j.value("travel_times", std::string{});
        cfg.output_dir = j.value("output_dir", std::string{"out"});
        cfg.datasets = j.value("datasets", std::string{"both"});
        cfg.models = j.value("models", std::string{"both"});
        if (j.contains("schemes")) cfg.schemes = parse_schemes(j["schemes"].get<std::vector<std::string>>());
        if (j.contains("thresholds")) cfg.thresholds = j["thresholds"].get<std::vector<long>>();
        cfg.include_other = j.value("include_other", false);
        cfg.fallback_speed_kmh = j.value("fallback_speed_kmh", kDefaultFallbackSpeedKmh);
        cfg.floor_seconds = j.value("floor_seconds", kTravelTimeFloorSeconds);
        cfg.workers = j.value("workers", 1);
        cfg.timestamp_header = j.value("timestamp_header", true);
        if (j.contains("fit")) {
            const auto& f = j["fit"];
            cfg.fit.rel_tol = f.value("rel_tol", cfg.fit.rel_tol);
            cfg.fit.grad_tol = f.value("grad_tol", cfg.fit.grad_tol);
            cfg.fit.max_iterations = f.value("max_iterations", cfg.fit.max_iterations);
        }
    } catch (const json::exception& e) {
        throw UsageError("config type error: " + std::string(e.what()));
    }
    check_selection(cfg.datasets, {"all", "stable", "both"}, "datasets");
    check_selection(cfg.models, {"M1", "M2", "both"}, "models");
    for (long t : cfg.thresholds)
        if (t < 0) throw UsageError("thresholds must be non-negative");
    return cfg;
}

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "publications") cfg.publications = value;
    else if (key == "registry") cfg.registry = value;
    else if (key == "travel_times") cfg.travel_times = value;
    else if (key == "output_dir") cfg.output_dir = value;
    else if (key == "datasets") check_selection(value, {"all", "stable", "both"}, "datasets"), cfg.datasets = value;
    else if (key == "models") check_selection(value, {"M1", "M2", "both"}, "models"), cfg.models = value;
    else if (key == "include_other") cfg.include_other = value == "true" || value == "1";
    else if (key == "fallback_speed_kmh") cfg.fallback_speed_kmh = std::stod(value);
    else if (key == "floor_seconds") cfg.floor_seconds = std::stod(value);
    else if (key == "workers") cfg.workers = std::stoi(value);
    else if (key == "timestamp_header") cfg.timestamp_header = value == "true" || value == "1";
    else throw UsageError("unknown config override key: '" + key + "'");
}

std::string config_fingerprint(const RunConfig& cfg) {
    // FNV-1a, 64-bit.
    const std::string data = canonical_config(cfg);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

int cmd_validate(const RunConfig& cfg) { return guarded("validate", run_validate, cfg); }
int cmd_links(const RunConfig& cfg) { return guarded("links", run_links, cfg); }
int cmd_network(const RunConfig& cfg) { return guarded("network", run_network, cfg); }
int cmd_gravity(const RunConfig& cfg) { return guarded("gravity", run_gravity, cfg); }
int cmd_impact(const RunConfig& cfg) { return guarded("impact", run_impact, cfg); }
int cmd_report(const RunConfig& cfg) { return guarded("report", run_report, cfg); }

}  // namespace caa
