#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "scicert/gender.hpp"
#include "scicert/util.hpp"

using namespace scicert;

// Separable 20-name set: male names share the "-bert"/"-hard" endings,
// female names share "-ina"/"-ella".
static std::vector<NameSample> separable_names() {
    std::vector<NameSample> s;
    for (const char* n : {"Albert", "Robert", "Norbert", "Gilbert", "Herbert",
                          "Bernhard", "Gerhard", "Reinhard", "Leonhard", "Eberhard"})
        s.push_back({n, 'M', 100.0});
    for (const char* n : {"Carina", "Marina", "Sabina", "Regina", "Martina",
                          "Isabella", "Arabella", "Mirella", "Fiorella", "Estella"})
        s.push_back({n, 'F', 100.0});
    return s;
}

TEST_CASE("separable names train to confident, correct predictions") {
    TrainOptions opts;
    opts.holdout = true;
    NameModel m = train(separable_names(), opts);
    REQUIRE(m.report().f1.has_value());
    REQUIRE(m.report().roc_auc.has_value());
    CHECK(*m.report().f1 >= 0.95);
    CHECK(*m.report().roc_auc >= 0.95);
    for (const auto& s : separable_names()) {
        double p = m.predict(s.name);
        CAPTURE(s.name);
        if (s.sex == 'M') CHECK(p > 0.5);
        else CHECK(p < 0.5);
    }
    // Unseen names following the pattern generalize.
    CHECK(m.predict("Adalbert") > 0.5);
    CHECK(m.predict("Paulina") < 0.5);
}

TEST_CASE("serialize / reload keeps predictions bit-exact") {
    testutil::TempDir tmp;
    NameModel m = train(separable_names());
    auto path = tmp.file("model.json", "");
    m.save(path);
    NameModel r = NameModel::load(path);
    for (const auto& s : separable_names()) {
        CHECK(m.predict(s.name) == r.predict(s.name));  // bit-exact, no tolerance
    }
    CHECK(m.serialize() == r.serialize());
    CHECK_THROWS_AS(NameModel::deserialize("{}"), PipelineError);
}

TEST_CASE("symmetrically conflicting labels give an uninformative score") {
    // The same name with equal weight in both classes carries no signal.
    std::vector<NameSample> s = {{"Jordan", 'M', 50.0}, {"Jordan", 'F', 50.0},
                                 {"Taylor", 'M', 50.0}, {"Taylor", 'F', 50.0},
                                 {"Casey", 'M', 50.0},  {"Casey", 'F', 50.0}};
    NameModel m = train(s);
    for (const char* n : {"Jordan", "Taylor", "Casey"})
        CHECK(m.predict(n) == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("abbreviated and empty names are refused") {
    NameModel m = train(separable_names());
    CHECK_THROWS_AS(m.predict("C"), std::invalid_argument);
    CHECK_THROWS_AS(m.predict("C."), std::invalid_argument);
    CHECK_THROWS_AS(m.predict(""), std::invalid_argument);
    CHECK_THROWS_AS(m.predict("   "), std::invalid_argument);
    CHECK_NOTHROW(m.predict("Cy"));  // two letters is a real name
}

TEST_CASE("training input validation") {
    CHECK_THROWS_AS(train({{"Al", 'M', 1.0}}), PipelineError);  // one class only
    CHECK_THROWS_AS(train({{"Al", 'M', 0.0}, {"Ann", 'F', 1.0}}), PipelineError);  // bad count
}

TEST_CASE("training is deterministic") {
    TrainOptions opts;
    opts.holdout = true;
    NameModel a = train(separable_names(), opts);
    NameModel b = train(separable_names(), opts);
    CHECK(a.serialize() == b.serialize());
    CHECK(*a.report().f1 == *b.report().f1);
}

TEST_CASE("name sample loading") {
    testutil::TempDir tmp;
    auto path = tmp.file("n.csv", "name,sex,count\nMary,F,100\nJohn,m,90\n");
    auto rows = load_name_samples(path);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].sex == 'F');
    CHECK(rows[1].sex == 'M');  // sex letter is case-insensitive
    CHECK(rows[1].count == doctest::Approx(90.0));
    auto bad = tmp.file("bad.csv", "Mary,X,100\n");
    CHECK_THROWS_AS(load_name_samples(bad), PipelineError);
    auto neg = tmp.file("neg.csv", "Mary,F,-5\n");
    CHECK_THROWS_AS(load_name_samples(neg), PipelineError);
}

static PaperRecord paper_with_authors(std::vector<AuthorRef> authors) {
    PaperRecord p;
    p.paper_id = "p";
    p.year = 2000;
    p.authors = std::move(authors);
    return p;
}

TEST_CASE("paper gender bases and exclusions") {
    NameModel m = train(separable_names());
    auto p = paper_with_authors({{"a1", "Albert", "US"}, {"a2", "Carina", "US"},
                                 {"a3", "Robert", "US"}});
    auto first = paper_gender(p, m, GenderBasis::first_author);
    REQUIRE(first.has_value());
    CHECK(first->value > 0.5);
    CHECK(first->n_scored == 1);
    auto last = paper_gender(p, m, GenderBasis::last_author);
    REQUIRE(last.has_value());
    CHECK(last->value > 0.5);
    auto all = paper_gender(p, m, GenderBasis::all_authors_mean);
    REQUIRE(all.has_value());
    CHECK(all->n_scored == 3);
    double mean = (m.predict("Albert") + m.predict("Carina") + m.predict("Robert")) / 3.0;
    CHECK(all->value == doctest::Approx(mean));

    // No authors at all: excluded.
    CHECK_FALSE(paper_gender(paper_with_authors({}), m, GenderBasis::first_author).has_value());

    // Team at or above the size cap: excluded.
    std::vector<AuthorRef> big;
    for (int i = 0; i < 10; ++i) big.push_back({"a" + std::to_string(i), "Albert", "US"});
    CHECK_FALSE(paper_gender(paper_with_authors(big), m, GenderBasis::first_author).has_value());
    big.pop_back();
    CHECK(paper_gender(paper_with_authors(big), m, GenderBasis::first_author).has_value());

    // Abbreviated or missing first name on the basis author: excluded.
    auto abbrev = paper_with_authors({{"a1", "C.", "US"}, {"a2", "Carina", "US"}});
    CHECK_FALSE(paper_gender(abbrev, m, GenderBasis::first_author).has_value());
    CHECK(paper_gender(abbrev, m, GenderBasis::last_author).has_value());
    // Mean basis skips unscorable members but keeps the rest.
    auto mixed = paper_gender(abbrev, m, GenderBasis::all_authors_mean);
    REQUIRE(mixed.has_value());
    CHECK(mixed->n_scored == 1);
}
