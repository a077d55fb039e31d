#pragma once

#include <filesystem>

#include "caa/types.hpp"

namespace caa {

// Publications file (TSV, UTF-8, header row):
//   pub_id <TAB> year <TAB> citations <TAB> fields <TAB> authors
// fields: '|'-separated subject-category ids (at least one).
// authors: ';'-separated entries "author_id:aff1|aff2|..." preserving listing order.
PublicationSet load_publications(const std::filesystem::path& path);

// Registry file (TSV, header row):
//   raw_affiliation_id <TAB> parent_org_id <TAB> org_type <TAB> lat <TAB> lon <TAB> name
AffiliationRegistry load_registry(const std::filesystem::path& path);

// Drops publications whose every affiliation is unresolved; keeps the rest and
// records every distinct unresolved raw id. kept + dropped = read.
ValidationReport validate(const PublicationSet& pubs, const AffiliationRegistry& registry,
                          PublicationSet* kept_out = nullptr);

// Fraction of publications with at least one author whose resolved parent set
// has size >= 2. Unresolvable affiliations are skipped, not errors here.
double multi_affiliation_share(const PublicationSet& pubs, const AffiliationRegistry& registry);

}  // namespace caa
