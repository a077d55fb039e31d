#pragma once

#include <map>
#include <string>
#include <vector>

#include "caa/linkgen.hpp"
#include "caa/types.hpp"

namespace caa {

// Field x year citation reference set, sorted ascending.
struct RefSet {
    std::vector<long> citations;

    std::size_t size() const { return citations.size(); }
};

using RefSetKey = std::pair<std::string, int>;  // (field, year)

class RefSetIndex {
public:
    static RefSetIndex build(const PublicationSet& pubs);

    const RefSet& at(const std::string& field, int year) const;
    const RefSet* find(const std::string& field, int year) const;
    std::size_t size() const { return sets_.size(); }

private:
    std::map<RefSetKey, RefSet> sets_;
};

// Hazen percentile (r - 0.5)/n * 100 with mean tied ranks.
double hazen_percentile(long citations, const RefSet& refset);

// Reference-set-size-weighted mean of per-field Hazen percentiles.
double weighted_pr(const PublicationRecord& pub, const RefSetIndex& refsets);

// Proportional credit from a slot multiset; shares sum to 1.
std::map<std::string, double> fractional_shares(const std::vector<std::string>& slots);

// Scheme-restricted slot multiset for one publication, from its links in the
// dataset: AA contributes both link members, FA/LA the retained member only.
// type_level maps each slot to its organisation type token.
std::vector<std::string> publication_slots(const std::vector<CoAffLink>& pub_links, Scheme scheme,
                                           const AffiliationRegistry& registry, bool type_level);

struct UnitScore {
    std::string unit;
    Scheme scheme = Scheme::AA;
    Provenance dataset = Provenance::CoAffAll;
    double mwpr = 0.0;
    double n_effective = 0.0;  // sum of fractional shares
    long n_raw = 0;            // publications with a positive share
};

struct ScoredContribution {
    std::string pub_id;
    int year = 0;
    double wpr = 0.0;
    double share = 0.0;
};

// Per-unit publication contributions under one scheme, for one link dataset.
// Units are organisations, or organisation types when type_level is set.
std::map<std::string, std::vector<ScoredContribution>> unit_contributions(
    const PublicationSet& pubs, const LinkSet& links, const AffiliationRegistry& registry,
    const RefSetIndex& refsets, Scheme scheme, bool type_level = false);

std::vector<UnitScore> unit_scores(const std::map<std::string, std::vector<ScoredContribution>>& contribs,
                                   Scheme scheme, Provenance dataset);

// Same aggregation as unit_scores, restricted to each publication year.
std::map<std::pair<std::string, int>, UnitScore> annual_series(
    const std::map<std::string, std::vector<ScoredContribution>>& contribs, Scheme scheme,
    Provenance dataset);

// Units with n_raw >= min_pubs, sorted by mwPR desc, ties by n_effective desc
// then unit id. top_k = 0 means no cut.
std::vector<UnitScore> ranked_units(std::vector<UnitScore> scores, long min_pubs, std::size_t top_k);

}  // namespace caa
