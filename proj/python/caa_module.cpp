#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "caa/geo.hpp"
#include "caa/gravity.hpp"
#include "caa/impact.hpp"
#include "caa/ingest.hpp"
#include "caa/linkgen.hpp"
#include "caa/network.hpp"

namespace py = pybind11;
using namespace caa;

PYBIND11_MODULE(caa_py, m) {
    m.doc() = "Co-affiliation network and citation-impact analysis";

    py::register_exception<UsageError>(m, "UsageError");
    py::register_exception<DataError>(m, "DataError");
    py::register_exception<NumericError>(m, "NumericError");

    py::enum_<OrgType>(m, "OrgType")
        .value("uni", OrgType::uni)
        .value("res", OrgType::res)
        .value("med", OrgType::med)
        .value("coll", OrgType::coll)
        .value("comp", OrgType::comp)
        .value("gov", OrgType::gov)
        .value("npo", OrgType::npo)
        .value("other", OrgType::other);
    py::enum_<Provenance>(m, "Provenance")
        .value("CoAffAll", Provenance::CoAffAll)
        .value("CoAffStable", Provenance::CoAffStable);
    py::enum_<Scheme>(m, "Scheme")
        .value("AA", Scheme::AA)
        .value("FA", Scheme::FA)
        .value("LA", Scheme::LA);
    py::enum_<GravityModel>(m, "GravityModel")
        .value("M1", GravityModel::M1)
        .value("M2", GravityModel::M2);

    py::class_<AuthorEntry>(m, "AuthorEntry")
        .def(py::init<>())
        .def_readwrite("author_id", &AuthorEntry::author_id)
        .def_readwrite("affiliations", &AuthorEntry::affiliations);
    py::class_<PublicationRecord>(m, "PublicationRecord")
        .def(py::init<>())
        .def_readwrite("pub_id", &PublicationRecord::pub_id)
        .def_readwrite("year", &PublicationRecord::year)
        .def_readwrite("citations", &PublicationRecord::citations)
        .def_readwrite("fields", &PublicationRecord::fields)
        .def_readwrite("authors", &PublicationRecord::authors);
    py::class_<PublicationSet>(m, "PublicationSet")
        .def(py::init<>())
        .def_readwrite("records", &PublicationSet::records)
        .def("__len__", &PublicationSet::size);
    py::class_<AffiliationRegistry>(m, "AffiliationRegistry")
        .def(py::init<>())
        .def("raw_count", &AffiliationRegistry::raw_count)
        .def("parent_count", &AffiliationRegistry::parent_count)
        .def("resolve", [](const AffiliationRegistry& r, const std::string& raw) {
            const auto& e = r.resolve(raw);
            return py::make_tuple(e.parent_org_id, to_string(e.type));
        });
    py::class_<ValidationReport>(m, "ValidationReport")
        .def_readonly("read", &ValidationReport::read)
        .def_readonly("kept", &ValidationReport::kept)
        .def_readonly("dropped", &ValidationReport::dropped)
        .def_readonly("unresolved_ids", &ValidationReport::unresolved_ids)
        .def("clean", &ValidationReport::clean);

    m.def("load_publications", &load_publications, py::arg("path"));
    m.def("load_registry", &load_registry, py::arg("path"));
    m.def("validate", [](const PublicationSet& pubs, const AffiliationRegistry& reg) {
        PublicationSet kept;
        ValidationReport report = validate(pubs, reg, &kept);
        return py::make_tuple(report, kept);
    });
    m.def("multi_affiliation_share", &multi_affiliation_share);

    py::class_<CoAffLink>(m, "CoAffLink")
        .def_readonly("author_id", &CoAffLink::author_id)
        .def_readonly("pub_id", &CoAffLink::pub_id)
        .def_readonly("year", &CoAffLink::year)
        .def_readonly("org_lo", &CoAffLink::org_lo)
        .def_readonly("org_hi", &CoAffLink::org_hi)
        .def_readonly("pos_lo", &CoAffLink::pos_lo)
        .def_readonly("pos_hi", &CoAffLink::pos_hi);
    py::class_<LinkSet>(m, "LinkSet")
        .def_readonly("links", &LinkSet::links)
        .def_readonly("tag", &LinkSet::tag)
        .def("__len__", &LinkSet::size);

    m.def("pairwise_links", &pairwise_links);
    m.def("generate_all", &generate_all);
    m.def("stability_filter", &stability_filter);
    m.def("scheme_units", &scheme_units);
    m.def("export_links", &export_links);
    m.def("import_links", &import_links);

    py::class_<NodeInfo>(m, "NodeInfo")
        .def_readonly("type", &NodeInfo::type)
        .def_readonly("article_count", &NodeInfo::article_count)
        .def_readonly("edge_weight_sum", &NodeInfo::edge_weight_sum);
    py::class_<OrgNetwork>(m, "OrgNetwork")
        .def_readonly("nodes", &OrgNetwork::nodes)
        .def_readonly("edges", &OrgNetwork::edges)
        .def("node_count", &OrgNetwork::node_count)
        .def("edge_count", &OrgNetwork::edge_count)
        .def("total_strength", &OrgNetwork::total_strength);
    m.def("build_network", &build_network);
    m.def("filter_view", &filter_view, py::arg("net"), py::arg("min_edge_strength"),
          py::arg("focus") = std::nullopt);

    py::class_<TravelTimeTable>(m, "TravelTimeTable")
        .def(py::init<>())
        .def("add", &TravelTimeTable::add)
        .def("__len__", &TravelTimeTable::size);
    m.def("load_travel_times", &load_travel_times);
    m.def("haversine_km", [](double lat1, double lon1, double lat2, double lon2) {
        return haversine_km({lat1, lon1}, {lat2, lon2});
    });
    m.def("fallback_time", [](double lat1, double lon1, double lat2, double lon2, double speed) {
        return fallback_time({lat1, lon1}, {lat2, lon2}, speed);
    }, py::arg("lat1"), py::arg("lon1"), py::arg("lat2"), py::arg("lon2"),
       py::arg("speed_kmh") = kDefaultFallbackSpeedKmh);

    py::class_<DesignMatrix>(m, "DesignMatrix")
        .def_readonly("y", &DesignMatrix::y)
        .def_readonly("X", &DesignMatrix::X)
        .def_readonly("W", &DesignMatrix::W)
        .def_readonly("x_names", &DesignMatrix::x_names)
        .def_readonly("w_names", &DesignMatrix::w_names)
        .def("n", &DesignMatrix::n);
    m.def("build_design",
          [](const OrgNetwork& net, const TravelTimeTable& tt, GravityModel model) {
              return build_design(net, tt, model);
          });

    py::class_<ZinbFit>(m, "ZinbFit")
        .def_readonly("beta", &ZinbFit::beta)
        .def_readonly("ln_alpha", &ZinbFit::ln_alpha)
        .def_readonly("gamma", &ZinbFit::gamma)
        .def_readonly("loglik", &ZinbFit::loglik)
        .def_readonly("robust_cov", &ZinbFit::robust_cov)
        .def_readonly("converged", &ZinbFit::converged)
        .def_readonly("iterations", &ZinbFit::iterations)
        .def_readonly("x_names", &ZinbFit::x_names)
        .def_readonly("w_names", &ZinbFit::w_names)
        .def("alpha", &ZinbFit::alpha);
    m.def("fit_zinb", [](const DesignMatrix& design) { return fit_zinb(design); });
    m.def("fit_zinb_raw",
          [](const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const Eigen::MatrixXd& W) {
              return fit_zinb(y, X, W);
          });
    m.def("zinb_loglik",
          [](const Eigen::VectorXd& beta, double ln_alpha, const Eigen::VectorXd& gamma,
             const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const Eigen::MatrixXd& W) {
              return zinb_loglik(beta, ln_alpha, gamma, y, X, W);
          });
    m.def("format_fit_report", &format_fit_report);

    py::class_<RefSetIndex>(m, "RefSetIndex").def_static("build", &RefSetIndex::build);
    py::class_<UnitScore>(m, "UnitScore")
        .def_readonly("unit", &UnitScore::unit)
        .def_readonly("scheme", &UnitScore::scheme)
        .def_readonly("dataset", &UnitScore::dataset)
        .def_readonly("mwpr", &UnitScore::mwpr)
        .def_readonly("n_effective", &UnitScore::n_effective)
        .def_readonly("n_raw", &UnitScore::n_raw);
    m.def("weighted_pr", &weighted_pr);
    m.def("unit_scores",
          [](const PublicationSet& pubs, const LinkSet& links, const AffiliationRegistry& registry,
             Scheme scheme, bool type_level) {
              RefSetIndex refsets = RefSetIndex::build(pubs);
              auto contribs = unit_contributions(pubs, links, registry, refsets, scheme, type_level);
              return unit_scores(contribs, scheme, links.tag);
          },
          py::arg("pubs"), py::arg("links"), py::arg("registry"), py::arg("scheme"),
          py::arg("type_level") = false);
    m.def("ranked_units", &ranked_units, py::arg("scores"), py::arg("min_pubs"),
          py::arg("top_k") = 0);
}
