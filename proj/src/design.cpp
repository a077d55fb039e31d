#include <algorithm>
#include <cmath>

#include "caa/gravity.hpp"

namespace caa {

std::string to_string(GravityModel m) { return m == GravityModel::M1 ? "M1" : "M2"; }

GravityModel parse_gravity_model(const std::string& token) {
    if (token == "M1") return GravityModel::M1;
    if (token == "M2") return GravityModel::M2;
    throw UsageError("unknown gravity model: '" + token + "' (expected M1 or M2)");
}

namespace {

// Report row order.
const std::vector<std::string> kSameTypeDummies = {
    "uni_uni", "res_res", "med_med", "comp_comp", "coll_coll", "npo_npo", "gov_gov"};
const std::vector<std::string> kCrossTypeDummies = {
    "coll_comp", "coll_gov", "coll_med", "coll_npo", "coll_res", "coll_uni", "comp_gov",
    "comp_med",  "comp_npo", "comp_res", "comp_uni", "gov_med",  "gov_npo",  "gov_res",
    "gov_uni",   "med_npo",  "med_res",  "med_uni",  "npo_res",  "npo_uni",  "res_uni"};

std::string pair_dummy(OrgType a, OrgType b) {
    std::string ta = to_string(a), tb = to_string(b);
    if (tb < ta) std::swap(ta, tb);
    return ta + "_" + tb;
}

}  // namespace

std::vector<std::string> dummy_names(GravityModel m) {
    return m == GravityModel::M1 ? kSameTypeDummies : kCrossTypeDummies;
}

DesignMatrix build_design(const OrgNetwork& net, const TravelTimeTable& travel_times,
                          GravityModel model, const DesignOptions& opts) {
    // Regression universe: non-`other` organisations incident to >= 1 link
    // with positive mass. std::map iteration keeps pair order deterministic.
    struct Org {
        std::string id;
        OrgType type;
        double mass;
        GeoPoint coord;
    };
    std::vector<Org> universe;
    for (const auto& [org, info] : net.nodes) {
        if (info.type == OrgType::other) continue;
        double mass = static_cast<double>(opts.mass_from_edge_weight_sum ? info.edge_weight_sum
                                                                         : info.article_count);
        if (mass < 1.0) continue;
        universe.push_back({org, info.type, mass, {info.lat, info.lon}});
    }

    const auto dummies = dummy_names(model);
    const std::size_t n_orgs = universe.size();
    const std::size_t n_rows = n_orgs * (n_orgs - 1) / 2;
    const std::size_t n_cols = 3 + dummies.size();

    DesignMatrix dm;
    dm.y.resize(n_rows);
    dm.X.setZero(n_rows, n_cols);
    dm.W.resize(n_rows, 2);
    dm.x_names.push_back("constant");
    dm.x_names.push_back("ln_prod_edge_strength");
    dm.x_names.push_back("ln_travel_time");
    dm.x_names.insert(dm.x_names.end(), dummies.begin(), dummies.end());
    dm.w_names = {"inflate_const", "inflate_ln_prod_edge_strength"};
    dm.pairs.reserve(n_rows);

    std::size_t row = 0;
    for (std::size_t i = 0; i < n_orgs; ++i) {
        for (std::size_t j = i + 1; j < n_orgs; ++j, ++row) {
            const Org& a = universe[i];
            const Org& b = universe[j];
            auto pair = canonical_pair(a.id, b.id);
            auto eit = net.edges.find(pair);
            dm.y(row) = eit == net.edges.end() ? 0.0 : static_cast<double>(eit->second);

            TravelTime tt = impedance(travel_times, a.id, b.id, a.coord, b.coord, opts.impedance);
            if (tt.source == TravelTimeSource::Fallback) ++dm.fallback_rows;

            const double ln_prod = std::log(a.mass * b.mass);
            dm.X(row, 0) = 1.0;
            dm.X(row, 1) = ln_prod;
            dm.X(row, 2) = std::log(tt.seconds);
            const std::string name = pair_dummy(a.type, b.type);
            for (std::size_t d = 0; d < dummies.size(); ++d)
                if (dummies[d] == name) dm.X(row, 3 + d) = 1.0;
            dm.W(row, 0) = 1.0;
            dm.W(row, 1) = ln_prod;
            dm.pairs.push_back(std::move(pair));
        }
    }
    return dm;
}

InformationCriteria information_criteria(double loglik, int n_params, std::size_t n_rows) {
    InformationCriteria ic;
    ic.aic = 2.0 * n_params - 2.0 * loglik;
    ic.bic = n_params * std::log(static_cast<double>(n_rows)) - 2.0 * loglik;
    return ic;
}

}  // namespace caa
