#include "caa/impact.hpp"

#include <algorithm>
#include <unordered_map>

namespace caa {

RefSetIndex RefSetIndex::build(const PublicationSet& pubs) {
    RefSetIndex index;
    for (const auto& pub : pubs.records)
        for (const auto& field : pub.fields)
            index.sets_[{field, pub.year}].citations.push_back(pub.citations);
    for (auto& [key, set] : index.sets_) std::sort(set.citations.begin(), set.citations.end());
    return index;
}

const RefSet& RefSetIndex::at(const std::string& field, int year) const {
    auto it = sets_.find({field, year});
    if (it == sets_.end())
        throw DataError("no reference set for field '" + field + "' year " + std::to_string(year));
    return it->second;
}

const RefSet* RefSetIndex::find(const std::string& field, int year) const {
    auto it = sets_.find({field, year});
    return it == sets_.end() ? nullptr : &it->second;
}

double hazen_percentile(long citations, const RefSet& refset) {
    if (refset.citations.empty()) throw DataError("empty reference set");
    const auto& cs = refset.citations;
    const auto lo = std::lower_bound(cs.begin(), cs.end(), citations);
    const auto hi = std::upper_bound(lo, cs.end(), citations);
    const double below = static_cast<double>(lo - cs.begin());
    const double tied = static_cast<double>(hi - lo);
    // Mean of tied ascending ranks: below + (tied + 1) / 2. A value absent
    // from the set gets the rank it would hold if inserted.
    const double rank = tied > 0.0 ? below + (tied + 1.0) / 2.0 : below + 0.5;
    return (rank - 0.5) / static_cast<double>(cs.size()) * 100.0;
}

double weighted_pr(const PublicationRecord& pub, const RefSetIndex& refsets) {
    double weighted = 0.0, total = 0.0;
    for (const auto& field : pub.fields) {
        const RefSet& set = refsets.at(field, pub.year);
        const double n = static_cast<double>(set.size());
        weighted += hazen_percentile(pub.citations, set) * n;
        total += n;
    }
    return weighted / total;
}

std::map<std::string, double> fractional_shares(const std::vector<std::string>& slots) {
    if (slots.empty()) throw DataError("empty retained-unit set");
    std::map<std::string, double> shares;
    for (const auto& slot : slots) shares[slot] += 1.0;
    const double total = static_cast<double>(slots.size());
    for (auto& [unit, count] : shares) count /= total;
    return shares;
}

std::vector<std::string> publication_slots(const std::vector<CoAffLink>& pub_links, Scheme scheme,
                                           const AffiliationRegistry& registry, bool type_level) {
    std::vector<std::string> slots;
    for (const auto& link : pub_links)
        for (auto& org : scheme_units(link, scheme))
            slots.push_back(type_level ? to_string(registry.parent(org).type) : std::move(org));
    return slots;
}

std::map<std::string, std::vector<ScoredContribution>> unit_contributions(
    const PublicationSet& pubs, const LinkSet& links, const AffiliationRegistry& registry,
    const RefSetIndex& refsets, Scheme scheme, bool type_level) {
    std::unordered_map<std::string, std::vector<const CoAffLink*>> links_by_pub;
    for (const auto& link : links.links) links_by_pub[link.pub_id].push_back(&link);

    std::map<std::string, std::vector<ScoredContribution>> contribs;
    // Impact universe: publications contributing at least one link to this set.
    for (const auto& pub : pubs.records) {
        auto it = links_by_pub.find(pub.pub_id);
        if (it == links_by_pub.end()) continue;
        std::vector<CoAffLink> pub_links;
        pub_links.reserve(it->second.size());
        for (const auto* l : it->second) pub_links.push_back(*l);
        const auto slots = publication_slots(pub_links, scheme, registry, type_level);
        const double wpr = weighted_pr(pub, refsets);
        for (const auto& [unit, share] : fractional_shares(slots))
            contribs[unit].push_back({pub.pub_id, pub.year, wpr, share});
    }
    return contribs;
}

namespace {

UnitScore aggregate(const std::string& unit, const std::vector<ScoredContribution>& items,
                    Scheme scheme, Provenance dataset) {
    double num = 0.0, den = 0.0;
    long raw = 0;
    for (const auto& c : items) {
        num += c.wpr * c.share;
        den += c.share;
        ++raw;
    }
    if (den <= 0.0) throw DataError("unit '" + unit + "' has zero fractional mass");
    return {unit, scheme, dataset, num / den, den, raw};
}

}  // namespace

std::vector<UnitScore> unit_scores(const std::map<std::string, std::vector<ScoredContribution>>& contribs,
                                   Scheme scheme, Provenance dataset) {
    std::vector<UnitScore> scores;
    scores.reserve(contribs.size());
    for (const auto& [unit, items] : contribs) scores.push_back(aggregate(unit, items, scheme, dataset));
    return scores;
}

std::map<std::pair<std::string, int>, UnitScore> annual_series(
    const std::map<std::string, std::vector<ScoredContribution>>& contribs, Scheme scheme,
    Provenance dataset) {
    std::map<std::pair<std::string, int>, UnitScore> series;
    for (const auto& [unit, items] : contribs) {
        std::map<int, std::vector<ScoredContribution>> by_year;
        for (const auto& c : items) by_year[c.year].push_back(c);
        for (const auto& [year, year_items] : by_year)
            series[{unit, year}] = aggregate(unit, year_items, scheme, dataset);
    }
    return series;
}

std::vector<UnitScore> ranked_units(std::vector<UnitScore> scores, long min_pubs, std::size_t top_k) {
    if (min_pubs < 0) throw UsageError("min_pubs must be non-negative");
    std::erase_if(scores, [&](const UnitScore& s) { return s.n_raw < min_pubs; });
    std::sort(scores.begin(), scores.end(), [](const UnitScore& a, const UnitScore& b) {
        if (a.mwpr != b.mwpr) return a.mwpr > b.mwpr;
        if (a.n_effective != b.n_effective) return a.n_effective > b.n_effective;
        return a.unit < b.unit;
    });
    if (top_k > 0 && scores.size() > top_k) scores.resize(top_k);
    return scores;
}

}  // namespace caa
