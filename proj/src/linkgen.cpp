#include "caa/linkgen.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <tuple>

#include "tsv.hpp"

namespace caa {

std::string to_string(Provenance p) {
    return p == Provenance::CoAffAll ? "CoAffAll" : "CoAffStable";
}

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::AA: return "AA";
        case Scheme::FA: return "FA";
        case Scheme::LA: return "LA";
    }
    throw DataError("invalid scheme value");
}

Provenance parse_provenance(const std::string& token) {
    if (token == "CoAffAll") return Provenance::CoAffAll;
    if (token == "CoAffStable") return Provenance::CoAffStable;
    throw DataError("unknown provenance tag: '" + token + "'");
}

Scheme parse_scheme(const std::string& token) {
    if (token == "AA") return Scheme::AA;
    if (token == "FA") return Scheme::FA;
    if (token == "LA") return Scheme::LA;
    throw DataError("unknown scheme token: '" + token + "'");
}

std::vector<CoAffLink> pairwise_links(const AuthorEntry& entry, const AffiliationRegistry& registry,
                                      const std::string& pub_id, int year) {
    // Distinct parents in listing order; position = index of the first raw
    // affiliation resolving to that parent.
    std::vector<std::pair<std::string, int>> parents;
    for (int i = 0; i < static_cast<int>(entry.affiliations.size()); ++i) {
        const auto* e = registry.try_resolve(entry.affiliations[i]);
        if (!e) continue;
        bool known = std::any_of(parents.begin(), parents.end(),
                                 [&](const auto& p) { return p.first == e->parent_org_id; });
        if (!known) parents.emplace_back(e->parent_org_id, i);
    }
    std::vector<CoAffLink> links;
    for (std::size_t i = 0; i < parents.size(); ++i) {
        for (std::size_t j = i + 1; j < parents.size(); ++j) {
            CoAffLink link;
            link.author_id = entry.author_id;
            link.pub_id = pub_id;
            link.year = year;
            const auto& [org_a, pos_a] = parents[i];
            const auto& [org_b, pos_b] = parents[j];
            if (org_a < org_b) {
                link.org_lo = org_a; link.pos_lo = pos_a;
                link.org_hi = org_b; link.pos_hi = pos_b;
            } else {
                link.org_lo = org_b; link.pos_lo = pos_b;
                link.org_hi = org_a; link.pos_hi = pos_a;
            }
            links.push_back(std::move(link));
        }
    }
    std::sort(links.begin(), links.end(), [](const CoAffLink& a, const CoAffLink& b) {
        return std::tie(a.org_lo, a.org_hi) < std::tie(b.org_lo, b.org_hi);
    });
    return links;
}

LinkSet generate_all(const PublicationSet& pubs, const AffiliationRegistry& registry) {
    LinkSet out;
    out.tag = Provenance::CoAffAll;
    for (const auto& pub : pubs.records)
        for (const auto& author : pub.authors)
            for (auto& link : pairwise_links(author, registry, pub.pub_id, pub.year))
                out.links.push_back(std::move(link));
    return out;
}

LinkSet stability_filter(const LinkSet& all_links) {
    if (all_links.tag != Provenance::CoAffAll)
        throw DataError("stability_filter expects a CoAffAll link set");
    // Group years per (author, pair); a pair qualifies iff its year span >= 2.
    std::map<std::tuple<std::string, std::string, std::string>, std::pair<int, int>> span;
    for (const auto& link : all_links.links) {
        auto key = std::make_tuple(link.author_id, link.org_lo, link.org_hi);
        auto [it, inserted] = span.emplace(key, std::make_pair(link.year, link.year));
        if (!inserted) {
            it->second.first = std::min(it->second.first, link.year);
            it->second.second = std::max(it->second.second, link.year);
        }
    }
    LinkSet out;
    out.tag = Provenance::CoAffStable;
    for (const auto& link : all_links.links) {
        const auto& [lo, hi] = span.at(std::make_tuple(link.author_id, link.org_lo, link.org_hi));
        if (hi - lo >= 2) out.links.push_back(link);
    }
    return out;
}

std::vector<std::string> scheme_units(const CoAffLink& link, Scheme scheme) {
    switch (scheme) {
        case Scheme::AA: return {link.org_lo, link.org_hi};
        case Scheme::FA: return {link.pos_lo < link.pos_hi ? link.org_lo : link.org_hi};
        case Scheme::LA: return {link.pos_lo < link.pos_hi ? link.org_hi : link.org_lo};
    }
    throw DataError("invalid scheme value");
}

void export_links(const LinkSet& links, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path.string());
    out << "author_id\tpub_id\tyear\torg_lo\torg_hi\tpos_lo\tpos_hi\tprovenance\n";
    for (const auto& l : links.links)
        out << l.author_id << '\t' << l.pub_id << '\t' << l.year << '\t' << l.org_lo << '\t'
            << l.org_hi << '\t' << l.pos_lo << '\t' << l.pos_hi << '\t' << to_string(links.tag)
            << '\n';
}

LinkSet import_links(const std::filesystem::path& path) {
    LinkSet out;
    bool first = true;
    detail::for_each_row(path,
                         {"author_id", "pub_id", "year", "org_lo", "org_hi", "pos_lo", "pos_hi", "provenance"},
                         [&](std::size_t row, const std::vector<std::string>& cols) {
        CoAffLink l;
        l.author_id = cols[0];
        l.pub_id = cols[1];
        l.year = static_cast<int>(detail::parse_long(cols[2], row, "year"));
        l.org_lo = cols[3];
        l.org_hi = cols[4];
        l.pos_lo = static_cast<int>(detail::parse_long(cols[5], row, "pos_lo"));
        l.pos_hi = static_cast<int>(detail::parse_long(cols[6], row, "pos_hi"));
        Provenance tag = parse_provenance(cols[7]);
        if (first) {
            out.tag = tag;
            first = false;
        } else if (tag != out.tag) {
            throw DataError("row " + std::to_string(row) + ": mixed provenance tags in link file");
        }
        out.links.push_back(std::move(l));
    });
    return out;
}

}  // namespace caa
