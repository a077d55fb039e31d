#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "caa/impact.hpp"
#include "caa/ingest.hpp"
#include "fixtures.hpp"

using namespace caa;
using namespace caa::testing;

namespace {

RefSet make_refset(std::vector<long> cits) {
    std::sort(cits.begin(), cits.end());
    return RefSet{std::move(cits)};
}

}  // namespace

TEST_CASE("hazen_percentile hand arithmetic") {
    SUBCASE("distinct values") {
        RefSet rs = make_refset({0, 1, 3, 8});
        CHECK(hazen_percentile(0, rs) == doctest::Approx(12.5));
        CHECK(hazen_percentile(1, rs) == doctest::Approx(37.5));
        CHECK(hazen_percentile(3, rs) == doctest::Approx(62.5));
        CHECK(hazen_percentile(8, rs) == doctest::Approx(87.5));
    }
    SUBCASE("ties take the mean rank") {
        RefSet rs = make_refset({1, 1, 1, 2});
        // Ranks of the three 1s are 1,2,3; mean 2 -> (2 - 0.5)/4 * 100.
        CHECK(hazen_percentile(1, rs) == doctest::Approx(37.5));
        CHECK(hazen_percentile(2, rs) == doctest::Approx(87.5));
    }
    SUBCASE("value absent from the reference set") {
        RefSet rs = make_refset({1, 3});
        // One value below, rank 1 + 0.5 -> (1.5 - 0.5)/2 * 100.
        CHECK(hazen_percentile(2, rs) == doctest::Approx(50.0));
        CHECK(hazen_percentile(0, rs) == doctest::Approx(0.0));
        CHECK(hazen_percentile(99, rs) == doctest::Approx(100.0));
    }
    SUBCASE("singleton reference set is 50") {
        CHECK(hazen_percentile(7, make_refset({7})) == doctest::Approx(50.0));
    }
}

TEST_CASE("mean Hazen percentile over a reference set's own members is 50") {
    std::mt19937 rng(19);
    std::uniform_int_distribution<int> n_dist(1, 40), cit(0, 8);  // small range forces ties
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<long> cits(n_dist(rng));
        for (auto& c : cits) c = cit(rng);
        RefSet rs = make_refset(cits);
        double sum = 0.0;
        for (long c : cits) sum += hazen_percentile(c, rs);
        CHECK(sum / cits.size() == doctest::Approx(50.0).epsilon(1e-12));
    }
}

TEST_CASE("weighted_pr weights fields by reference-set size") {
    PublicationSet pubs;
    // Field X, year 2015: 4 papers; field Y, year 2015: 12 papers. The probe
    // paper sits in both fields with 5 citations.
    auto add = [&](const std::string& id, std::vector<std::string> fields, long c) {
        PublicationRecord r;
        r.pub_id = id;
        r.year = 2015;
        r.citations = c;
        r.fields = std::move(fields);
        pubs.records.push_back(std::move(r));
    };
    add("probe", {"X", "Y"}, 5);
    for (long c : {0, 1, 2})
        add("x" + std::to_string(c), {"X"}, c);
    for (int i = 0; i < 11; ++i)
        add("y" + std::to_string(i), {"Y"}, i);  // 0..10
    RefSetIndex refsets = RefSetIndex::build(pubs);
    REQUIRE(refsets.at("X", 2015).size() == 4);
    REQUIRE(refsets.at("Y", 2015).size() == 12);
    double px = hazen_percentile(5, refsets.at("X", 2015));    // top of {0,1,2,5} -> 87.5
    double py = hazen_percentile(5, refsets.at("Y", 2015));    // in {0..10, 5}
    CHECK(px == doctest::Approx(87.5));
    double expected = (4.0 * px + 12.0 * py) / 16.0;
    PublicationRecord probe = pubs.records[0];
    CHECK(weighted_pr(probe, refsets) == doctest::Approx(expected));

    SUBCASE("single field reduces to the plain percentile") {
        CHECK(weighted_pr(pubs.records[1], refsets) ==
              doctest::Approx(hazen_percentile(0, refsets.at("X", 2015))));
    }
}

TEST_CASE("fractional_shares splits credit proportionally") {
    SUBCASE("two distinct slots") {
        auto s = fractional_shares({"A", "B"});
        CHECK(s.at("A") == doctest::Approx(0.5));
        CHECK(s.at("B") == doctest::Approx(0.5));
    }
    SUBCASE("repeated slot gets the larger share") {
        auto s = fractional_shares({"A", "A", "B"});
        CHECK(s.at("A") == doctest::Approx(2.0 / 3.0));
        CHECK(s.at("B") == doctest::Approx(1.0 / 3.0));
    }
    SUBCASE("shares always sum to one") {
        std::mt19937 rng(23);
        std::uniform_int_distribution<int> n_dist(1, 20), org(0, 4);
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<std::string> slots(n_dist(rng));
            for (auto& s : slots) s = "org" + std::to_string(org(rng));
            auto shares = fractional_shares(slots);
            double total = 0.0;
            for (const auto& [unit, share] : shares) total += share;
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    SUBCASE("empty multiset is rejected") {
        CHECK_THROWS_AS(fractional_shares({}), DataError);
    }
}

TEST_CASE("publication_slots derives slot multisets from links") {
    TempDir dir("impact");
    AffiliationRegistry reg = load_registry(write_toy_registry(dir));
    // Author listing [A, B, C]: canonical pairs with listing positions.
    std::vector<CoAffLink> links = {
        {"au", "p", 2015, "A", "B", 0, 1},
        {"au", "p", 2015, "A", "C", 0, 2},
        {"au", "p", 2015, "B", "C", 1, 2},
    };
    SUBCASE("AA lists both members of every link") {
        auto slots = publication_slots(links, Scheme::AA, reg, false);
        std::multiset<std::string> got(slots.begin(), slots.end());
        CHECK(got == std::multiset<std::string>{"A", "A", "B", "B", "C", "C"});
    }
    SUBCASE("FA keeps the earlier-listed member") {
        auto slots = publication_slots(links, Scheme::FA, reg, false);
        std::multiset<std::string> got(slots.begin(), slots.end());
        CHECK(got == std::multiset<std::string>{"A", "A", "B"});
    }
    SUBCASE("LA keeps the later-listed member") {
        auto slots = publication_slots(links, Scheme::LA, reg, false);
        std::multiset<std::string> got(slots.begin(), slots.end());
        CHECK(got == std::multiset<std::string>{"B", "C", "C"});
    }
    SUBCASE("type level maps organisations to type tokens") {
        auto slots = publication_slots(links, Scheme::AA, reg, true);
        std::multiset<std::string> got(slots.begin(), slots.end());
        CHECK(got == std::multiset<std::string>{"med", "med", "res", "res", "uni", "uni"});
    }
    SUBCASE("AA multiset is the union of FA and LA multisets") {
        std::mt19937 rng(31);
        std::uniform_int_distribution<int> pos(0, 5);
        std::vector<CoAffLink> rnd;
        for (int i = 0; i < 20; ++i) {
            int lo = pos(rng), hi = pos(rng);
            if (lo == hi) continue;
            rnd.push_back({"au", "p", 2015, "A", "B", lo, hi});
        }
        auto aa = publication_slots(rnd, Scheme::AA, reg, false);
        auto fa = publication_slots(rnd, Scheme::FA, reg, false);
        auto la = publication_slots(rnd, Scheme::LA, reg, false);
        std::multiset<std::string> lhs(aa.begin(), aa.end());
        std::multiset<std::string> rhs(fa.begin(), fa.end());
        rhs.insert(la.begin(), la.end());
        CHECK(lhs == rhs);
    }
}

TEST_CASE("unit scores aggregate share-weighted percentiles") {
    std::map<std::string, std::vector<ScoredContribution>> contribs;
    contribs["A"] = {{"p1", 2015, 80.0, 0.5}, {"p2", 2016, 60.0, 1.0}};
    contribs["B"] = {{"p1", 2015, 80.0, 0.5}};
    auto scores = unit_scores(contribs, Scheme::AA, Provenance::CoAffAll);
    REQUIRE(scores.size() == 2);
    const UnitScore& a = scores[0].unit == "A" ? scores[0] : scores[1];
    const UnitScore& b = scores[0].unit == "B" ? scores[0] : scores[1];
    CHECK(a.mwpr == doctest::Approx((0.5 * 80.0 + 1.0 * 60.0) / 1.5));
    CHECK(a.n_effective == doctest::Approx(1.5));
    CHECK(a.n_raw == 2);
    CHECK(b.mwpr == doctest::Approx(80.0));
    CHECK(b.n_raw == 1);
    CHECK(a.scheme == Scheme::AA);
    CHECK(a.dataset == Provenance::CoAffAll);
}

TEST_CASE("toy pipeline: contributions conserve credit per publication") {
    TempDir dir("impact");
    AffiliationRegistry reg = load_registry(write_toy_registry(dir));
    PublicationSet pubs = load_publications(write_toy_publications(dir));
    RefSetIndex refsets = RefSetIndex::build(pubs);
    LinkSet links = generate_all(pubs, reg);

    for (Scheme scheme : {Scheme::AA, Scheme::FA, Scheme::LA}) {
        auto contribs = unit_contributions(pubs, links, reg, refsets, scheme);
        // Pubs with links: p1 and p2 (p3 has a single affiliation).
        std::map<std::string, double> per_pub;
        for (const auto& [unit, rows] : contribs)
            for (const auto& row : rows) per_pub[row.pub_id] += row.share;
        REQUIRE(per_pub.size() == 2);
        CHECK(per_pub.at("p1") == doctest::Approx(1.0));
        CHECK(per_pub.at("p2") == doctest::Approx(1.0));
        CHECK(per_pub.count("p3") == 0);
    }
}

TEST_CASE("toy pipeline: AA shares match hand-computed fractions") {
    TempDir dir("impact");
    AffiliationRegistry reg = load_registry(write_toy_registry(dir));
    PublicationSet pubs = load_publications(write_toy_publications(dir));
    RefSetIndex refsets = RefSetIndex::build(pubs);
    LinkSet links = generate_all(pubs, reg);
    auto contribs = unit_contributions(pubs, links, reg, refsets, Scheme::AA);
    // p1 slots {A,A,B,B,C,C} -> each org 1/3; p2 slots {A,B} -> 1/2 each.
    auto share_of = [&](const std::string& unit, const std::string& pub) {
        for (const auto& row : contribs.at(unit))
            if (row.pub_id == pub) return row.share;
        return -1.0;
    };
    CHECK(share_of("A", "p1") == doctest::Approx(1.0 / 3.0));
    CHECK(share_of("C", "p1") == doctest::Approx(1.0 / 3.0));
    CHECK(share_of("A", "p2") == doctest::Approx(0.5));
    CHECK(share_of("B", "p2") == doctest::Approx(0.5));
    CHECK(contribs.count("C") == 1);
    CHECK(share_of("C", "p2") == -1.0);

    SUBCASE("wpr column carries the publication percentile") {
        double expected = weighted_pr(pubs.records[0], refsets);
        CHECK(contribs.at("A")[0].wpr == doctest::Approx(expected));
    }
    SUBCASE("type-level units aggregate over organisations") {
        auto by_type = unit_contributions(pubs, links, reg, refsets, Scheme::AA, true);
        CHECK(by_type.count("uni") == 1);
        CHECK(by_type.count("res") == 1);
        CHECK(by_type.count("med") == 1);
        double total = 0.0;
        for (const auto& [unit, rows] : by_type)
            for (const auto& row : rows) total += row.share;
        CHECK(total == doctest::Approx(2.0));  // two linked publications
    }
}

TEST_CASE("annual_series partitions the pooled aggregate by year") {
    std::map<std::string, std::vector<ScoredContribution>> contribs;
    contribs["A"] = {{"p1", 2015, 80.0, 0.5}, {"p2", 2015, 40.0, 0.5}, {"p3", 2016, 60.0, 1.0}};
    auto series = annual_series(contribs, Scheme::AA, Provenance::CoAffAll);
    REQUIRE(series.size() == 2);
    const UnitScore& y2015 = series.at({"A", 2015});
    CHECK(y2015.mwpr == doctest::Approx(60.0));
    CHECK(y2015.n_effective == doctest::Approx(1.0));
    CHECK(y2015.n_raw == 2);
    CHECK(series.at({"A", 2016}).mwpr == doctest::Approx(60.0));

    // Year slices recombine to the pooled score.
    auto pooled = unit_scores(contribs, Scheme::AA, Provenance::CoAffAll);
    double num = 0.0, den = 0.0;
    for (const auto& [key, s] : series) {
        num += s.mwpr * s.n_effective;
        den += s.n_effective;
    }
    CHECK(num / den == doctest::Approx(pooled[0].mwpr));
}

TEST_CASE("ranked_units filters, sorts, and cuts") {
    std::vector<UnitScore> scores;
    auto mk = [](std::string unit, double mwpr, double neff, long nraw) {
        UnitScore s;
        s.unit = std::move(unit);
        s.mwpr = mwpr;
        s.n_effective = neff;
        s.n_raw = nraw;
        return s;
    };
    scores.push_back(mk("low_volume", 99.0, 1.0, 2));
    scores.push_back(mk("alpha", 70.0, 10.0, 50));
    scores.push_back(mk("beta", 70.0, 20.0, 40));
    scores.push_back(mk("gamma", 80.0, 5.0, 30));

    SUBCASE("eligibility threshold removes small units") {
        auto ranked = ranked_units(scores, 10, 0);
        REQUIRE(ranked.size() == 3);
        CHECK(ranked[0].unit == "gamma");
        CHECK(ranked[1].unit == "beta");   // tie on mwPR broken by n_effective
        CHECK(ranked[2].unit == "alpha");
    }
    SUBCASE("top_k cuts after sorting") {
        auto ranked = ranked_units(scores, 10, 2);
        REQUIRE(ranked.size() == 2);
        CHECK(ranked[0].unit == "gamma");
    }
    SUBCASE("raising the threshold never adds units") {
        for (long t = 1; t < 60; t += 7) {
            auto lo = ranked_units(scores, t, 0);
            auto hi = ranked_units(scores, t + 7, 0);
            CHECK(hi.size() <= lo.size());
            for (const auto& s : hi)
                CHECK(std::any_of(lo.begin(), lo.end(),
                                  [&](const UnitScore& x) { return x.unit == s.unit; }));
        }
    }
    SUBCASE("full tie falls back to the unit id") {
        std::vector<UnitScore> tied = {mk("z", 50.0, 1.0, 5), mk("a", 50.0, 1.0, 5)};
        auto ranked = ranked_units(tied, 1, 0);
        CHECK(ranked[0].unit == "a");
    }
}

TEST_CASE("refset index covers every field-year cell and nothing else") {
    TempDir dir("impact");
    PublicationSet pubs = load_publications(write_toy_publications(dir));
    RefSetIndex refsets = RefSetIndex::build(pubs);
    CHECK(refsets.size() == 4);  // PHYS x {2015, 2016, 2017}, CHEM x {2016}
    CHECK(refsets.at("PHYS", 2015).citations == std::vector<long>{10});
    CHECK(refsets.at("CHEM", 2016).citations == std::vector<long>{0});
    CHECK(refsets.find("CHEM", 2015) == nullptr);
    CHECK_THROWS_AS(refsets.at("BIO", 2015), DataError);
}
