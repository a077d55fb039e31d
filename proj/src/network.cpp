#include "caa/network.hpp"

#include <fstream>
#include <set>

#include "tsv.hpp"

namespace caa {

long OrgNetwork::total_strength() const {
    long total = 0;
    for (const auto& [pair, strength] : edges) total += strength;
    return total;
}

OrgPair canonical_pair(const std::string& a, const std::string& b) {
    if (a == b) throw DataError("self-pair for organisation '" + a + "'");
    return a < b ? OrgPair{a, b} : OrgPair{b, a};
}

OrgNetwork build_network(const LinkSet& links, const AffiliationRegistry& registry) {
    OrgNetwork net;
    std::map<std::string, std::set<std::string>> pubs_per_org;
    for (const auto& link : links.links) {
        net.edges[canonical_pair(link.org_lo, link.org_hi)] += 1;
        pubs_per_org[link.org_lo].insert(link.pub_id);
        pubs_per_org[link.org_hi].insert(link.pub_id);
    }
    for (const auto& [org, pubs] : pubs_per_org) {
        NodeInfo info;
        if (const auto* p = registry.try_parent(org)) {
            info.type = p->type;
            info.lat = p->lat;
            info.lon = p->lon;
        }
        info.article_count = static_cast<long>(pubs.size());
        net.nodes[org] = info;
    }
    for (const auto& [pair, strength] : net.edges) {
        net.nodes[pair.first].edge_weight_sum += strength;
        net.nodes[pair.second].edge_weight_sum += strength;
    }
    return net;
}

OrgNetwork filter_view(const OrgNetwork& net, long min_edge_strength,
                       const std::optional<std::set<std::string>>& focus) {
    if (min_edge_strength < 1) throw UsageError("min_edge_strength must be >= 1");
    OrgNetwork out;
    for (const auto& [pair, strength] : net.edges) {
        if (strength < min_edge_strength) continue;
        if (focus && !focus->count(pair.first) && !focus->count(pair.second)) continue;
        out.edges[pair] = strength;
    }
    for (const auto& [pair, strength] : out.edges) {
        for (const auto& org : {pair.first, pair.second}) {
            auto& node = out.nodes[org];
            node = net.nodes.at(org);
            node.edge_weight_sum = 0;  // recomputed for the view below
        }
    }
    for (const auto& [pair, strength] : out.edges) {
        out.nodes[pair.first].edge_weight_sum += strength;
        out.nodes[pair.second].edge_weight_sum += strength;
    }
    return out;
}

namespace {

bool keep_node(const OrgNetwork& net, const std::string& org, bool include_other) {
    return include_other || net.nodes.at(org).type != OrgType::other;
}

void export_edge_list(const OrgNetwork& net, const std::filesystem::path& base, bool include_other) {
    std::ofstream edges(base.string() + ".edges.tsv");
    if (!edges) throw DataError("cannot write file: " + base.string() + ".edges.tsv");
    edges << "org_lo\torg_hi\tstrength\n";
    for (const auto& [pair, strength] : net.edges) {
        if (!keep_node(net, pair.first, include_other) || !keep_node(net, pair.second, include_other))
            continue;
        edges << pair.first << '\t' << pair.second << '\t' << strength << '\n';
    }
    std::ofstream nodes(base.string() + ".nodes.tsv");
    if (!nodes) throw DataError("cannot write file: " + base.string() + ".nodes.tsv");
    nodes << "org_id\ttype\tarticle_count\tedge_weight_sum\tlat\tlon\n";
    nodes.precision(10);
    for (const auto& [org, info] : net.nodes) {
        if (!keep_node(net, org, include_other)) continue;
        nodes << org << '\t' << to_string(info.type) << '\t' << info.article_count << '\t'
              << info.edge_weight_sum << '\t' << info.lat << '\t' << info.lon << '\n';
    }
}

void export_graphml(const OrgNetwork& net, const std::filesystem::path& base, bool include_other) {
    std::ofstream out(base.string() + ".graphml");
    if (!out) throw DataError("cannot write file: " + base.string() + ".graphml");
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
        << "  <key id=\"type\" for=\"node\" attr.name=\"type\" attr.type=\"string\"/>\n"
        << "  <key id=\"articles\" for=\"node\" attr.name=\"article_count\" attr.type=\"long\"/>\n"
        << "  <key id=\"strength\" for=\"edge\" attr.name=\"strength\" attr.type=\"long\"/>\n"
        << "  <graph edgedefault=\"undirected\">\n";
    for (const auto& [org, info] : net.nodes) {
        if (!keep_node(net, org, include_other)) continue;
        out << "    <node id=\"" << org << "\"><data key=\"type\">" << to_string(info.type)
            << "</data><data key=\"articles\">" << info.article_count << "</data></node>\n";
    }
    for (const auto& [pair, strength] : net.edges) {
        if (!keep_node(net, pair.first, include_other) || !keep_node(net, pair.second, include_other))
            continue;
        out << "    <edge source=\"" << pair.first << "\" target=\"" << pair.second
            << "\"><data key=\"strength\">" << strength << "</data></edge>\n";
    }
    out << "  </graph>\n</graphml>\n";
}

void export_dot(const OrgNetwork& net, const std::filesystem::path& base, bool include_other) {
    std::ofstream out(base.string() + ".dot");
    if (!out) throw DataError("cannot write file: " + base.string() + ".dot");
    out << "graph coaff {\n";
    for (const auto& [org, info] : net.nodes) {
        if (!keep_node(net, org, include_other)) continue;
        out << "  \"" << org << "\" [type=\"" << to_string(info.type) << "\", articles="
            << info.article_count << "];\n";
    }
    for (const auto& [pair, strength] : net.edges) {
        if (!keep_node(net, pair.first, include_other) || !keep_node(net, pair.second, include_other))
            continue;
        out << "  \"" << pair.first << "\" -- \"" << pair.second << "\" [weight=" << strength
            << "];\n";
    }
    out << "}\n";
}

}  // namespace

void export_graph(const OrgNetwork& net, const std::filesystem::path& base, GraphFormat format,
                  bool include_other) {
    switch (format) {
        case GraphFormat::EdgeList: export_edge_list(net, base, include_other); return;
        case GraphFormat::GraphML: export_graphml(net, base, include_other); return;
        case GraphFormat::Dot: export_dot(net, base, include_other); return;
    }
    throw UsageError("invalid graph format");
}

OrgNetwork import_network(const std::filesystem::path& base) {
    OrgNetwork net;
    detail::for_each_row(base.string() + ".nodes.tsv",
                         {"org_id", "type", "article_count", "edge_weight_sum", "lat", "lon"},
                         [&](std::size_t row, const std::vector<std::string>& cols) {
        NodeInfo info;
        info.type = parse_org_type(cols[1]);
        info.article_count = detail::parse_long(cols[2], row, "article_count");
        info.edge_weight_sum = detail::parse_long(cols[3], row, "edge_weight_sum");
        info.lat = detail::parse_double(cols[4], row, "lat");
        info.lon = detail::parse_double(cols[5], row, "lon");
        net.nodes[cols[0]] = info;
    });
    detail::for_each_row(base.string() + ".edges.tsv", {"org_lo", "org_hi", "strength"},
                         [&](std::size_t row, const std::vector<std::string>& cols) {
        long strength = detail::parse_long(cols[2], row, "strength");
        if (strength <= 0) throw DataError("row " + std::to_string(row) + ": non-positive edge strength");
        net.edges[canonical_pair(cols[0], cols[1])] = strength;
    });
    return net;
}

}  // namespace caa
