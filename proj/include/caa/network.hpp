#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "caa/linkgen.hpp"
#include "caa/types.hpp"

namespace caa {

struct NodeInfo {
    OrgType type = OrgType::other;
    long article_count = 0;    // distinct publications contributing links at this node
    long edge_weight_sum = 0;  // sum of incident edge strengths
    double lat = 0.0;
    double lon = 0.0;

    bool operator==(const NodeInfo&) const = default;
};

using OrgPair = std::pair<std::string, std::string>;

struct OrgNetwork {
    std::map<std::string, NodeInfo> nodes;
    std::map<OrgPair, long> edges;  // canonical pair -> edge strength

    std::size_t node_count() const { return nodes.size(); }
    std::size_t edge_count() const { return edges.size(); }
    long total_strength() const;

    bool operator==(const OrgNetwork&) const = default;
};

OrgPair canonical_pair(const std::string& a, const std::string& b);

OrgNetwork build_network(const LinkSet& links, const AffiliationRegistry& registry);

// Edges with strength >= min_edge_strength and, if focus given, incident to a
// focus member; isolated nodes dropped.
OrgNetwork filter_view(const OrgNetwork& net, long min_edge_strength,
                       const std::optional<std::set<std::string>>& focus = std::nullopt);

enum class GraphFormat { EdgeList, GraphML, Dot };

// EdgeList writes <base>.edges.tsv and <base>.nodes.tsv and round-trips via
// import_network. GraphML / Dot are one-way exports for external tools.
void export_graph(const OrgNetwork& net, const std::filesystem::path& base, GraphFormat format,
                  bool include_other = true);
OrgNetwork import_network(const std::filesystem::path& base);

}  // namespace caa
