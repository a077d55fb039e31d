#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace caa {

// Exit-code aligned error hierarchy: usage/config -> 1, data -> 2, numeric -> 3.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class OrgType { uni, res, med, coll, comp, gov, npo, other };

inline constexpr int kNumOrgTypes = 8;

std::string to_string(OrgType t);
OrgType parse_org_type(const std::string& token);

struct AuthorEntry {
    std::string author_id;
    // Raw affiliation ids in the exact listing order from the publication.
    // Duplicates of the same raw id are collapsed at load time, first kept.
    std::vector<std::string> affiliations;
};

struct PublicationRecord {
    std::string pub_id;
    int year = 0;
    long citations = 0;
    std::vector<std::string> fields;
    std::vector<AuthorEntry> authors;
};

struct PublicationSet {
    std::vector<PublicationRecord> records;

    std::size_t size() const { return records.size(); }
};

struct RegistryEntry {
    std::string parent_org_id;
    OrgType type = OrgType::other;
    double lat = 0.0;
    double lon = 0.0;
    std::string name;
};

struct ParentInfo {
    OrgType type = OrgType::other;
    double lat = 0.0;
    double lon = 0.0;
    std::string name;
};

class AffiliationRegistry {
public:
    void add(const std::string& raw_id, RegistryEntry entry);

    // Total on registered ids; throws DataError on unknown ids.
    const RegistryEntry& resolve(const std::string& raw_id) const;
    const RegistryEntry* try_resolve(const std::string& raw_id) const;

    const ParentInfo& parent(const std::string& parent_org_id) const;
    const ParentInfo* try_parent(const std::string& parent_org_id) const;

    std::size_t raw_count() const { return entries_.size(); }
    std::size_t parent_count() const { return parents_.size(); }
    const std::map<std::string, ParentInfo>& parents() const { return parents_; }

private:
    std::unordered_map<std::string, RegistryEntry> entries_;
    std::map<std::string, ParentInfo> parents_;
};

struct MalformedRow {
    std::size_t row = 0;  // 1-based line number in the source file
    std::string reason;
};

struct ValidationReport {
    std::size_t read = 0;
    std::size_t kept = 0;
    std::size_t dropped = 0;
    std::vector<std::string> unresolved_ids;
    std::vector<MalformedRow> malformed;

    bool clean() const { return dropped == 0 && unresolved_ids.empty() && malformed.empty(); }
};

}  // namespace caa
