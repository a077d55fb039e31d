#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "caa/ingest.hpp"
#include "caa/linkgen.hpp"

namespace caa::testing {

// Scoped temp directory under the system temp root.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("caa_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::filesystem::path write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
    return path;
}

// Three-organisation toy registry: A (uni, Vienna), B (res, Vienna), C (med, Graz),
// with department-level raw ids for A.
inline std::filesystem::path write_toy_registry(const TempDir& dir) {
    return write_file(dir.file("registry.tsv"),
        "raw_affiliation_id\tparent_org_id\torg_type\tlat\tlon\tname\n"
        "a1\tA\tuni\t48.1987\t16.3695\tUniversity A\n"
        "a2\tA\tuni\t48.1987\t16.3695\tUniversity A\n"
        "b1\tB\tres\t48.2082\t16.3738\tInstitute B\n"
        "c1\tC\tmed\t47.0707\t15.4395\tClinic C\n");
}

inline std::filesystem::path write_toy_publications(const TempDir& dir) {
    return write_file(dir.file("pubs.tsv"),
        "pub_id\tyear\tcitations\tfields\tauthors\n"
        "p1\t2015\t10\tPHYS\tau1:a1|b1|c1\n"
        "p2\t2017\t4\tPHYS\tau1:a1|b1\n"
        "p3\t2016\t0\tPHYS|CHEM\tau2:c1\n");
}

struct SynthPaths {
    std::filesystem::path publications;
    std::filesystem::path registry;
    std::filesystem::path travel_times;
};

// Synthetic corpus large enough to estimate both gravity models: four
// organisations per type, pair link counts drawn from a zero-inflated NB
// process, with at least one well-populated pair per dummy column. Pairs with
// two or more links span years 2015-2019 so they survive the stability filter.
inline SynthPaths write_synthetic_dataset(const TempDir& dir, unsigned seed = 12345) {
    const std::vector<std::string> types = {"uni", "res", "med", "coll", "comp", "gov", "npo"};
    std::mt19937 rng(seed);

    std::vector<std::pair<std::string, std::string>> orgs;  // (org_id, type)
    std::string registry_tsv = "raw_affiliation_id\tparent_org_id\torg_type\tlat\tlon\tname\n";
    for (std::size_t t = 0; t < types.size(); ++t) {
        for (int k = 0; k < 4; ++k) {
            std::string org = types[t] + std::to_string(k);
            orgs.push_back({org, types[t]});
            double lat = 46.5 + 0.09 * static_cast<double>(t) + 0.31 * k;
            double lon = 9.8 + 0.83 * static_cast<double>(t) + 0.07 * k;
            registry_tsv += org + "_raw\t" + org + "\t" + types[t] + "\t" + std::to_string(lat) +
                            "\t" + std::to_string(lon) + "\tOrg " + org + "\n";
        }
    }

    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<int> year_dist(2015, 2020);
    std::uniform_int_distribution<long> cit_dist(0, 40);
    auto draw_count = [&]() -> int {
        if (unif(rng) < 0.35) return 0;  // inflated zeros
        std::gamma_distribution<double> gamma(1.0 / 0.7, 0.7 * 3.0);
        std::poisson_distribution<int> pois(std::max(gamma(rng), 1e-9));
        return pois(rng);
    };

    std::string pubs_tsv = "pub_id\tyear\tcitations\tfields\tauthors\n";
    int pub_counter = 0;
    std::set<std::string> forced;  // one guaranteed pair per dummy column
    for (std::size_t i = 0; i < orgs.size(); ++i) {
        for (std::size_t j = i + 1; j < orgs.size(); ++j) {
            const auto& [oi, ti] = orgs[i];
            const auto& [oj, tj] = orgs[j];
            int y = draw_count();
            std::string combo = ti <= tj ? ti + "_" + tj : tj + "_" + ti;
            if (forced.insert(combo).second) y = std::max(y, 3);
            for (int k = 0; k < y; ++k) {
                int year = k == 0 ? 2015 : (k == 1 ? 2019 : year_dist(rng));
                std::string fields = unif(rng) < 0.25 ? "F1|F2" : (unif(rng) < 0.5 ? "F1" : "F2");
                pubs_tsv += "p" + std::to_string(pub_counter++) + "\t" + std::to_string(year) +
                            "\t" + std::to_string(cit_dist(rng)) + "\t" + fields + "\tau_" + oi +
                            "_" + oj + ":" + oi + "_raw|" + oj + "_raw\n";
            }
        }
    }

    // Routed travel times for roughly a third of the pairs; the rest fall back.
    std::string tt_tsv = "org_lo\torg_hi\tseconds\n";
    std::uniform_int_distribution<long> secs(1800, 14400);
    int pair_idx = 0;
    for (std::size_t i = 0; i < orgs.size(); ++i)
        for (std::size_t j = i + 1; j < orgs.size(); ++j)
            if (pair_idx++ % 3 == 0)
                tt_tsv += orgs[i].first + "\t" + orgs[j].first + "\t" + std::to_string(secs(rng)) + "\n";

    SynthPaths paths;
    paths.publications = write_file(dir.file("synth_pubs.tsv"), pubs_tsv);
    paths.registry = write_file(dir.file("synth_registry.tsv"), registry_tsv);
    paths.travel_times = write_file(dir.file("synth_tt.tsv"), tt_tsv);
    return paths;
}

inline AuthorEntry make_author(const std::string& id, std::vector<std::string> affs) {
    AuthorEntry e;
    e.author_id = id;
    e.affiliations = std::move(affs);
    return e;
}

}  // namespace caa::testing
