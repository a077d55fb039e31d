#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "caa/types.hpp"

namespace caa {

enum class Provenance { CoAffAll, CoAffStable };
enum class Scheme { AA, FA, LA };

std::string to_string(Provenance p);
std::string to_string(Scheme s);
Provenance parse_provenance(const std::string& token);
Scheme parse_scheme(const std::string& token);

// One author-level co-affiliation link. org_lo < org_hi lexicographically;
// pos_lo / pos_hi are the listing indices (0-based, within the author's raw
// affiliation list) of org_lo and org_hi respectively.
struct CoAffLink {
    std::string author_id;
    std::string pub_id;
    int year = 0;
    std::string org_lo;
    std::string org_hi;
    int pos_lo = 0;
    int pos_hi = 0;

    bool operator==(const CoAffLink&) const = default;
};

struct LinkSet {
    std::vector<CoAffLink> links;
    Provenance tag = Provenance::CoAffAll;

    std::size_t size() const { return links.size(); }
};

// All C(k,2) pairs over the k distinct parent organisations of one author
// entry. Intra-parent duplicates collapse first; unresolved raw ids are
// skipped. Output is sorted by (org_lo, org_hi).
std::vector<CoAffLink> pairwise_links(const AuthorEntry& entry, const AffiliationRegistry& registry,
                                      const std::string& pub_id, int year);

LinkSet generate_all(const PublicationSet& pubs, const AffiliationRegistry& registry);

// Keeps a link instance iff the same (author, pair) occurs in two years with
// a gap >= 2; all year-instances of a qualifying pair are retained.
LinkSet stability_filter(const LinkSet& all_links);

// AA -> both members; FA -> member listed earlier; LA -> member listed later.
std::vector<std::string> scheme_units(const CoAffLink& link, Scheme scheme);

// TSV round trip: author_id, pub_id, year, org_lo, org_hi, pos_lo, pos_hi, provenance.
void export_links(const LinkSet& links, const std::filesystem::path& path);
LinkSet import_links(const std::filesystem::path& path);

}  // namespace caa
