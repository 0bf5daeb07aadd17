#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "scicert/network.hpp"
#include "scicert/util.hpp"

using namespace scicert;

namespace {

// Independent Gini oracle: mean absolute pairwise difference over 2*n^2*mu.
double gini_pairwise(const std::vector<double>& d) {
    double n = static_cast<double>(d.size());
    double mu = 0.0;
    for (double v : d) mu += v;
    mu /= n;
    if (mu == 0.0) return 0.0;
    double s = 0.0;
    for (double a : d)
        for (double b : d) s += std::fabs(a - b);
    return s / (2.0 * n * n * mu);
}

// (paper_id, year, subfield or "", author ids)
Corpus corpus_with(
    const std::vector<std::tuple<std::string, int, std::string, std::vector<std::string>>>& papers) {
    Corpus c;
    for (const auto& [id, year, subfield, authors] : papers) {
        PaperRecord p;
        p.paper_id = id;
        p.abstract = "x";
        p.year = year;
        if (!subfield.empty()) {
            p.field_tags.push_back({0, "field"});
            p.field_tags.push_back({5, subfield});
        }
        for (const auto& a : authors) p.authors.push_back({a, "", ""});
        c.add(p);
    }
    return c;
}

}  // namespace

TEST_CASE("star graph gini is 0.3 on both estimators") {
    // K_{1,4}: center degree 4, leaves degree 1 each.
    std::vector<double> degrees = {4, 1, 1, 1, 1};
    CHECK(gini_from_degrees(degrees) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(gini_pairwise(degrees) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("trapezoid-Lorenz gini equals the pairwise oracle on random graphs") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t n = std::uniform_int_distribution<std::size_t>(2, 200)(rng);
        std::vector<double> d(n);
        for (auto& v : d) v = std::uniform_int_distribution<int>(0, 20)(rng);
        double total = 0.0;
        for (double v : d) total += v;
        if (total == 0.0) d[0] = 1.0;
        CHECK(gini_from_degrees(d) == doctest::Approx(gini_pairwise(d)).epsilon(1e-12));
    }
    // Uniform degrees: exactly 0.
    CHECK(gini_from_degrees(std::vector<double>(17, 3.0)) == doctest::Approx(0.0).epsilon(1e-15));
    // All-zero degrees are defined as 0 with a warning.
    CHECK(gini_from_degrees({0.0, 0.0, 0.0}) == 0.0);
    CHECK_THROWS_AS(gini_from_degrees({1.0}), PipelineError);
}

TEST_CASE("lorenz curve shape") {
    auto lc = lorenz_curve({1.0, 1.0, 2.0});
    REQUIRE(lc.points.size() == 4);
    CHECK(lc.points.front() == std::pair<double, double>{0.0, 0.0});
    CHECK(lc.points.back().first == doctest::Approx(1.0));
    CHECK(lc.points.back().second == doctest::Approx(1.0));
    for (std::size_t i = 1; i < lc.points.size(); ++i) {
        CHECK(lc.points[i].second >= lc.points[i - 1].second);  // non-decreasing
    }
}

TEST_CASE("graph construction: members, externals, weights, window") {
    auto c = corpus_with({
        // Window for year 2010 is [2000, 2009].
        {"w1", 2005, "ml", {"m1", "m2"}},
        {"w2", 2007, "ml", {"m2", "m3"}},
        {"w3", 2008, "ml", {"m1", "m2"}},      // repeat pair: weight 2
        {"w4", 2009, "other", {"m3", "x1"}},   // external via shared member
        {"w5", 2006, "other", {"x2", "x3"}},   // touches no member: ignored
        {"out_late", 2010, "ml", {"m9"}},      // at t: outside the window
        {"out_early", 1999, "ml", {"m8"}},     // before t-10: outside
    });
    auto g = build_graph(c, "ml", 2010, 3);
    CHECK(g.window_start == 2000);
    CHECK(g.window_end == 2009);
    CHECK(g.members == std::set<std::string>{"m1", "m2", "m3"});
    CHECK(g.externals == std::set<std::string>{"x1"});
    CHECK(g.edge_weight("m1", "m2") == 2);  // distinct papers, order-free
    CHECK(g.edge_weight("m2", "m1") == 2);
    CHECK(g.edge_weight("m2", "m3") == 1);
    CHECK(g.edge_weight("m3", "x1") == 1);
    CHECK(g.edge_weight("x2", "x3") == 0);  // member-free papers contribute nothing
    CHECK_FALSE(g.sparse);
    CHECK(build_graph(c, "ml", 2010, 50).sparse);

    // Member-internal degrees exclude edges to externals.
    auto deg = g.member_degrees();
    CHECK(deg["m3"] == doctest::Approx(1.0));  // m2 edge only, x1 not counted
    CHECK(deg["m2"] == doctest::Approx(3.0));
    CHECK(deg["m1"] == doctest::Approx(2.0));
}

TEST_CASE("papers of year t never enter their own predictor graph") {
    // Identical corpora except for one year-t paper that would change the
    // graph if (incorrectly) included.
    std::vector<std::tuple<std::string, int, std::string, std::vector<std::string>>> base = {
        {"w1", 2005, "ml", {"m1", "m2"}},
    };
    auto with_t = base;
    with_t.push_back({"t_paper", 2010, "ml", {"m1", "m9"}});
    auto g_base = build_graph(corpus_with(base), "ml", 2010, 1);
    auto g_with = build_graph(corpus_with(with_t), "ml", 2010, 1);
    CHECK(g_base.members == g_with.members);
    CHECK(g_base.edges == g_with.edges);
    CHECK(g_with.members.count("m9") == 0);
}

TEST_CASE("unknown subfield names the nearest tags") {
    auto c = corpus_with({{"p1", 2005, "machine learning", {"a"}},
                          {"p2", 2005, "machine vision", {"b"}},
                          {"p3", 2005, "genomics", {"d"}}});
    CHECK_THROWS_WITH_AS(build_graph(c, "machin learning", 2010, 1),
                         doctest::Contains("machine learning"), PipelineError);
}

TEST_CASE("echo chamber ratios") {
    // Appendix-style fixture: 5 members, 2 externals.
    CoauthorGraph g;
    g.members = {"m1", "m2", "m3", "m4", "m5"};
    g.edges[{"m1", "m2"}] = 2;
    g.edges[{"m2", "m3"}] = 1;
    g.edges[{"m4", "m5"}] = 1;
    g.edges[{"m3", "x1"}] = 3;
    g.edges[{"m5", "x2"}] = 1;
    g.externals = {"x1", "x2"};
    CHECK(echo_chamber(g, EchoChamberMode::node_ratio) ==
          doctest::Approx(5.0 / 7.0).epsilon(1e-12));
    // Boundary weight 4, incident weight 8.
    CHECK(echo_chamber(g, EchoChamberMode::edge_ratio) == doctest::Approx(0.5).epsilon(1e-12));

    CoauthorGraph closed;
    closed.members = {"a", "b"};
    closed.edges[{"a", "b"}] = 5;
    CHECK(echo_chamber(closed, EchoChamberMode::node_ratio) == doctest::Approx(1.0));
    CHECK(echo_chamber(closed, EchoChamberMode::edge_ratio) == doctest::Approx(0.0));

    CoauthorGraph empty;
    CHECK_THROWS_AS(echo_chamber(empty, EchoChamberMode::node_ratio), PipelineError);
}

TEST_CASE("gini and echo chamber vary independently") {
    // Same echo ratio, different gini.
    CoauthorGraph even, star;
    even.members = {"a", "b", "c", "d"};
    even.edges[{"a", "b"}] = 1;
    even.edges[{"c", "d"}] = 1;
    star.members = {"a", "b", "c", "d"};
    star.edges[{"a", "b"}] = 1;
    star.edges[{"a", "c"}] = 1;
    star.edges[{"a", "d"}] = 1;
    CHECK(echo_chamber(even) == echo_chamber(star));
    CHECK(gini_centrality(even) != gini_centrality(star));

    // Same gini (uniform internal degrees), different echo ratio.
    CoauthorGraph open_g = even;
    open_g.externals = {"x"};
    open_g.edges[{"a", "x"}] = 1;
    CHECK(gini_centrality(even) == doctest::Approx(gini_centrality(open_g)));
    CHECK(echo_chamber(even) != echo_chamber(open_g));
}

TEST_CASE("edge list export") {
    CoauthorGraph g;
    g.members = {"a"};
    g.externals = {"x"};
    g.edges[{"a", "x"}] = 2;
    auto tsv = g.export_edge_list();
    CHECK(tsv.find("author_a\tauthor_b\tweight") == 0);
    CHECK(tsv.find("a\tx\t2\t1\t0") != std::string::npos);
}
