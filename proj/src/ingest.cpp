#include "caa/ingest.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "tsv.hpp"

namespace caa {

std::string to_string(OrgType t) {
    switch (t) {
        case OrgType::uni: return "uni";
        case OrgType::res: return "res";
        case OrgType::med: return "med";
        case OrgType::coll: return "coll";
        case OrgType::comp: return "comp";
        case OrgType::gov: return "gov";
        case OrgType::npo: return "npo";
        case OrgType::other: return "other";
    }
    throw DataError("invalid org type value");
}

OrgType parse_org_type(const std::string& token) {
    if (token == "uni") return OrgType::uni;
    if (token == "res") return OrgType::res;
    if (token == "med") return OrgType::med;
    if (token == "coll") return OrgType::coll;
    if (token == "comp") return OrgType::comp;
    if (token == "gov") return OrgType::gov;
    if (token == "npo") return OrgType::npo;
    if (token == "other") return OrgType::other;
    throw DataError("unknown org_type token: '" + token + "'");
}

void AffiliationRegistry::add(const std::string& raw_id, RegistryEntry entry) {
    auto [it, inserted] = entries_.emplace(raw_id, entry);
    if (!inserted) {
        if (it->second.parent_org_id != entry.parent_org_id)
            throw DataError("duplicate raw affiliation id '" + raw_id + "' with conflicting parents '" +
                            it->second.parent_org_id + "' vs '" + entry.parent_org_id + "'");
        return;  // exact duplicate row, keep first
    }
    auto [pit, pnew] = parents_.emplace(
        entry.parent_org_id, ParentInfo{entry.type, entry.lat, entry.lon, entry.name});
    if (!pnew && pit->second.type != entry.type)
        throw DataError("parent organisation '" + entry.parent_org_id + "' has conflicting org types '" +
                        to_string(pit->second.type) + "' vs '" + to_string(entry.type) + "'");
}

const RegistryEntry& AffiliationRegistry::resolve(const std::string& raw_id) const {
    auto it = entries_.find(raw_id);
    if (it == entries_.end()) throw DataError("unresolved affiliation id: '" + raw_id + "'");
    return it->second;
}

const RegistryEntry* AffiliationRegistry::try_resolve(const std::string& raw_id) const {
    auto it = entries_.find(raw_id);
    return it == entries_.end() ? nullptr : &it->second;
}

const ParentInfo& AffiliationRegistry::parent(const std::string& parent_org_id) const {
    auto it = parents_.find(parent_org_id);
    if (it == parents_.end()) throw DataError("unknown parent organisation: '" + parent_org_id + "'");
    return it->second;
}

const ParentInfo* AffiliationRegistry::try_parent(const std::string& parent_org_id) const {
    auto it = parents_.find(parent_org_id);
    return it == parents_.end() ? nullptr : &it->second;
}

namespace {

std::vector<AuthorEntry> parse_authors(const std::string& block, std::size_t row) {
    std::vector<AuthorEntry> authors;
    if (block.empty()) throw DataError("row " + std::to_string(row) + ": empty authors block");
    for (const auto& chunk : detail::split(block, ';')) {
        auto colon = chunk.find(':');
        if (colon == std::string::npos || colon == 0)
            throw DataError("row " + std::to_string(row) + ": malformed author entry '" + chunk + "'");
        AuthorEntry entry;
        entry.author_id = chunk.substr(0, colon);
        std::unordered_set<std::string> seen;
        for (const auto& aff : detail::split(chunk.substr(colon + 1), '|')) {
            if (aff.empty())
                throw DataError("row " + std::to_string(row) + ": empty affiliation id for author '" +
                                entry.author_id + "'");
            if (seen.insert(aff).second) entry.affiliations.push_back(aff);
        }
        if (entry.affiliations.empty())
            throw DataError("row " + std::to_string(row) + ": author '" + entry.author_id +
                            "' has no affiliations");
        authors.push_back(std::move(entry));
    }
    return authors;
}

}  // namespace

PublicationSet load_publications(const std::filesystem::path& path) {
    PublicationSet out;
    std::unordered_set<std::string> seen_ids;
    detail::for_each_row(path, {"pub_id", "year", "citations", "fields", "authors"},
                         [&](std::size_t row, const std::vector<std::string>& cols) {
        PublicationRecord rec;
        rec.pub_id = cols[0];
        if (rec.pub_id.empty()) throw DataError("row " + std::to_string(row) + ": empty pub_id");
        if (!seen_ids.insert(rec.pub_id).second)
            throw DataError("row " + std::to_string(row) + ": duplicate pub_id '" + rec.pub_id + "'");
        long year = detail::parse_long(cols[1], row, "year");
        if (year < 1000 || year > 9999)
            throw DataError("row " + std::to_string(row) + ": invalid year " + cols[1]);
        rec.year = static_cast<int>(year);
        rec.citations = detail::parse_long(cols[2], row, "citations");
        if (rec.citations < 0)
            throw DataError("row " + std::to_string(row) + ": negative citation count");
        for (const auto& f : detail::split(cols[3], '|'))
            if (!f.empty()) rec.fields.push_back(f);
        if (rec.fields.empty())
            throw DataError("row " + std::to_string(row) + ": no subject fields");
        rec.authors = parse_authors(cols[4], row);
        out.records.push_back(std::move(rec));
    });
    return out;
}

AffiliationRegistry load_registry(const std::filesystem::path& path) {
    AffiliationRegistry registry;
    detail::for_each_row(path, {"raw_affiliation_id", "parent_org_id", "org_type", "lat", "lon", "name"},
                         [&](std::size_t row, const std::vector<std::string>& cols) {
        RegistryEntry entry;
        entry.parent_org_id = cols[1];
        if (cols[0].empty() || entry.parent_org_id.empty())
            throw DataError("row " + std::to_string(row) + ": empty affiliation or parent id");
        entry.type = parse_org_type(cols[2]);
        entry.lat = detail::parse_double(cols[3], row, "lat");
        entry.lon = detail::parse_double(cols[4], row, "lon");
        entry.name = cols[5];
        registry.add(cols[0], std::move(entry));
    });
    return registry;
}

ValidationReport validate(const PublicationSet& pubs, const AffiliationRegistry& registry,
                          PublicationSet* kept_out) {
    ValidationReport report;
    std::set<std::string> unresolved;
    if (kept_out) kept_out->records.clear();
    for (const auto& pub : pubs.records) {
        ++report.read;
        bool any_resolved = false;
        for (const auto& author : pub.authors) {
            for (const auto& aff : author.affiliations) {
                if (registry.try_resolve(aff))
                    any_resolved = true;
                else
                    unresolved.insert(aff);
            }
        }
        if (any_resolved) {
            ++report.kept;
            if (kept_out) kept_out->records.push_back(pub);
        } else {
            ++report.dropped;
        }
    }
    report.unresolved_ids.assign(unresolved.begin(), unresolved.end());
    return report;
}

double multi_affiliation_share(const PublicationSet& pubs, const AffiliationRegistry& registry) {
    if (pubs.records.empty()) return 0.0;
    std::size_t multi = 0;
    for (const auto& pub : pubs.records) {
        bool has_multi = false;
        for (const auto& author : pub.authors) {
            std::set<std::string> parents;
            for (const auto& aff : author.affiliations)
                if (const auto* e = registry.try_resolve(aff)) parents.insert(e->parent_org_id);
            if (parents.size() >= 2) {
                has_multi = true;
                break;
            }
        }
        if (has_multi) ++multi;
    }
    return static_cast<double>(multi) / static_cast<double>(pubs.records.size());
}

}  // namespace caa
