#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "scicert/corpus.hpp"
#include "scicert/util.hpp"

using namespace scicert;

static std::vector<std::string> texts(const std::vector<SentenceSpan>& spans) {
    std::vector<std::string> out;
    for (const auto& s : spans) out.push_back(s.text);
    return out;
}

TEST_CASE("sentence splitter golden cases") {
    struct Case {
        std::string in;
        std::vector<std::string> want;
    };
    // Frozen behavior of the rule-based splitter.
    const std::vector<Case> cases = {
        {"A. B? C!", {"A.", "B?", "C!"}},
        {"We ran trials. The result was clear.", {"We ran trials.", "The result was clear."}},
        {"Values differ, e.g. near zero.", {"Values differ, e.g. near zero."}},
        {"Costs rose, i.e. doubled. We stopped.", {"Costs rose, i.e. doubled.", "We stopped."}},
        {"See Fig. 3 for details. It shows the trend.",
         {"See Fig. 3 for details.", "It shows the trend."}},
        {"Smith et al. 2010 agree. We extend this.",
         {"Smith et al. 2010 agree.", "We extend this."}},
        {"The constant is 3.14 here. Next sentence.",
         {"The constant is 3.14 here.", "Next sentence."}},
        {"Wait... maybe. Done now.", {"Wait... maybe.", "Done now."}},
        {"One only", {"One only"}},
        {"Trailing period.", {"Trailing period."}},
        {"Is it done? Yes! Then stop.", {"Is it done?", "Yes!", "Then stop."}},
        {"He cited (Jones 1999). A new idea followed.",
         {"He cited (Jones 1999).", "A new idea followed."}},
        {"Measured at approx. room temperature. It held.",
         {"Measured at approx. room temperature.", "It held."}},
        {"Results improved. (See appendix.)", {"Results improved.", "(See appendix.)"}},
        {"", {}},
        {"   ", {}},
        {"lowercase start. and lowercase next.", {"lowercase start. and lowercase next."}},
        {"Numbers follow. 42 were counted.", {"Numbers follow.", "42 were counted."}},
        {"Quoted next. \"Exactly,\" they said.", {"Quoted next.", "\"Exactly,\" they said."}},
        {"Dr. Smith disagreed. The panel agreed.",
         {"Dr. Smith disagreed.", "The panel agreed."}},
        {"Versions 1 vs. 2 differ. Both work.", {"Versions 1 vs. 2 differ.", "Both work."}},
        {"Sec. 4 covers this. More follows.", {"Sec. 4 covers this.", "More follows."}},
    };
    for (const auto& c : cases) {
        CAPTURE(c.in);
        CHECK(texts(split_sentences("p", c.in)) == c.want);
    }
}

TEST_CASE("sentence spans have contiguous indices and trimmed text") {
    auto spans = split_sentences("p7", "  First one.   Second one!  Third? ");
    REQUIRE(spans.size() == 3);
    for (std::size_t i = 0; i < spans.size(); ++i) {
        CHECK(spans[i].index == static_cast<int>(i));
        CHECK(spans[i].paper_id == "p7");
        CHECK(spans[i].text == trim(spans[i].text));
    }
}

TEST_CASE("english heuristic") {
    CHECK(looks_english(
        "The results of this study indicate that the proposed method outperforms the baseline "
        "on all benchmarks, and that the effect is consistent across conditions."));
    CHECK(looks_english("We conclude that further research is needed to confirm these findings."));
    CHECK_FALSE(looks_english("zzzz qqqq xxxx vvvv kkkk jjjj wwww yyyy zzzz qqqq xxxx"));
    CHECK_FALSE(looks_english("ab"));  // too short
    // Non-English sample text (no frequent English trigrams).
    CHECK_FALSE(looks_english("km zp qv xw fj gk lq vz bw pk dq mx"));
}

TEST_CASE("abbreviated author names") {
    CHECK(AuthorRef{"a1", "C", ""}.abbreviated_name());
    CHECK(AuthorRef{"a1", "C.", ""}.abbreviated_name());
    CHECK_FALSE(AuthorRef{"a1", "Carol", ""}.abbreviated_name());
    CHECK_FALSE(AuthorRef{"a1", "", ""}.abbreviated_name());
    CHECK(AuthorRef{"a1", "Carol", ""}.has_usable_name());
    CHECK_FALSE(AuthorRef{"a1", "C.", ""}.has_usable_name());
    CHECK_FALSE(AuthorRef{"a1", "", ""}.has_usable_name());
}

TEST_CASE("json record round trip and canonical serialization") {
    std::string line =
        R"({"paper_id":"x1","title":"T","abstract":"An abstract about the method. In conclusion, it works.","year":2015,)"
        R"("field_tags":[{"level":0,"tag":"biology"},{"level":5,"tag":"genomics"}],)"
        R"("authors":[{"author_id":"a1","first_name":"Mary","country":"US"}],)"
        R"("journal_rank":0.25,"citation_count":7,"tweet_count":3})";
    PaperRecord p = parse_record_json(line);
    CHECK(p.paper_id == "x1");
    CHECK(p.year == 2015);
    CHECK(p.level_tags(0) == std::vector<std::string>{"biology"});
    CHECK(p.subfield_tags() == std::vector<std::string>{"genomics"});
    CHECK(*p.journal_rank == doctest::Approx(0.25));
    CHECK(*p.tweet_count == 3);

    Corpus c;
    c.add(p);
    std::string ser = c.serialize_jsonl();
    // Round trip is stable: parse + reserialize is identical.
    Corpus c2;
    c2.add(parse_record_json(split(ser, '\n')[0]));
    CHECK(c2.serialize_jsonl() == ser);

    CHECK_THROWS_AS(c.add(p), PipelineError);  // duplicate id
}

TEST_CASE("subfield tags need a level-0 ancestor on the record") {
    PaperRecord p;
    p.field_tags = {{5, "genomics"}};
    CHECK(p.subfield_tags().empty());
    p.field_tags.push_back({0, "biology"});
    CHECK(p.subfield_tags() == std::vector<std::string>{"genomics"});
}

TEST_CASE("ingest skips malformed and invalid records with warnings") {
    testutil::TempDir tmp;
    std::string good =
        R"({"paper_id":"g1","abstract":"The method works on all the standard benchmarks. In conclusion, it holds.","year":2010,"authors":[],"citation_count":0})";
    std::string dup = good;
    std::string bad_year =
        R"({"paper_id":"g2","abstract":"The method works on all the standard benchmarks.","year":1850,"citation_count":0})";
    std::string non_en =
        R"({"paper_id":"g3","abstract":"The method works on all the standard benchmarks.","year":2010,"language":"de","citation_count":0})";
    std::string malformed = "{not json";
    std::string no_abstract = R"({"paper_id":"g4","abstract":"   ","year":2010})";
    auto path = tmp.file("c.jsonl", good + "\n" + dup + "\n" + bad_year + "\n" + non_en + "\n" +
                                        malformed + "\n" + no_abstract + "\n");
    Corpus c = ingest(path, RecordFormat::jsonl);
    CHECK(c.ingest_stats().accepted == 1);
    CHECK(c.ingest_stats().skipped == 5);
    CHECK(c.find("g1") != nullptr);
}

TEST_CASE("tsv ingest") {
    testutil::TempDir tmp;
    std::string row =
        "t1\tTitle\tThe method works on all the standard benchmarks. In conclusion, it holds.\t"
        "2012\ten\t0:biology;5:genomics\ta1:Mary:US|a2:John:US\t0.5\t12\t4";
    auto path = tmp.file("c.tsv", row + "\n");
    Corpus c = ingest(path, RecordFormat::tsv);
    REQUIRE(c.ingest_stats().accepted == 1);
    const PaperRecord* p = c.find("t1");
    REQUIRE(p != nullptr);
    CHECK(p->authors.size() == 2);
    CHECK(p->authors[0].first_name == "Mary");
    CHECK(p->authors[1].country == "US");
    CHECK(p->subfield_tags() == std::vector<std::string>{"genomics"});
    CHECK(*p->journal_rank == doctest::Approx(0.5));
    CHECK(*p->tweet_count == 4);
}

TEST_CASE("cue phrase tagger with and without fallback") {
    PaperRecord p;
    p.paper_id = "p1";
    p.abstract = "We measured the effect. In conclusion, the effect is small.";
    p.sentences = split_sentences(p.paper_id, p.abstract);
    CuePhraseTagger cue(CuePhraseTagger::default_cues(), false);
    cue.tag(p);
    REQUIRE(p.sentences.size() == 2);
    CHECK(p.sentences[0].role == SentenceRole::other);
    CHECK(p.sentences[1].role == SentenceRole::conclusion);

    PaperRecord q;
    q.paper_id = "p2";
    q.abstract = "We measured the effect. The effect is small.";
    q.sentences = split_sentences(q.paper_id, q.abstract);
    cue.tag(q);
    CHECK(std::none_of(q.sentences.begin(), q.sentences.end(),
                       [](const SentenceSpan& s) { return s.role == SentenceRole::conclusion; }));
    CuePhraseTagger with_fallback(CuePhraseTagger::default_cues(), true);
    with_fallback.tag(q);
    CHECK(q.sentences.back().role == SentenceRole::conclusion);
}

TEST_CASE("tag_conclusions marks papers without conclusions excluded") {
    Corpus c;
    PaperRecord a;
    a.paper_id = "a";
    a.abstract = "Plain statement. In conclusion, done.";
    a.year = 2000;
    c.add(a);
    PaperRecord b;
    b.paper_id = "b";
    b.abstract = "Plain statement. Another statement.";
    b.year = 2000;
    c.add(b);
    CuePhraseTagger cue(CuePhraseTagger::default_cues(), false);
    tag_conclusions(c, cue);
    CHECK_FALSE(c.find("a")->excluded_no_conclusion);
    CHECK(c.find("b")->excluded_no_conclusion);
}

TEST_CASE("file tagger") {
    testutil::TempDir tmp;
    auto path = tmp.file("roles.tsv", "p1\t0\tother\np1\t1\tconclusion\n");
    FileTagger tagger(path);
    PaperRecord p;
    p.paper_id = "p1";
    p.abstract = "First part here. Second part here.";
    p.sentences = split_sentences(p.paper_id, p.abstract);
    tagger.tag(p);
    CHECK(p.sentences[0].role == SentenceRole::other);
    CHECK(p.sentences[1].role == SentenceRole::conclusion);

    // A sentence with no row is fatal and names the paper.
    PaperRecord q;
    q.paper_id = "p9";
    q.abstract = "Only sentence here.";
    q.sentences = split_sentences(q.paper_id, q.abstract);
    CHECK_THROWS_WITH_AS(tagger.tag(q), doctest::Contains("p9"), PipelineError);

    // Duplicate (paper, index) keys are fatal at load.
    auto dup = tmp.file("dup.tsv", "p1\t0\tother\np1\t0\tconclusion\n");
    CHECK_THROWS_AS(FileTagger{dup}, PipelineError);
}

TEST_CASE("jaccard overlap") {
    Corpus c;
    auto mk = [&](const std::string& id, std::vector<std::string> fields) {
        PaperRecord p;
        p.paper_id = id;
        p.abstract = "x";
        p.year = 2000;
        for (const auto& f : fields) p.field_tags.push_back({0, f});
        c.add(p);
    };
    mk("p1", {"a"});
    mk("p2", {"a", "b"});
    mk("p3", {"b"});
    auto m = jaccard_overlap({"a", "b", "empty"}, c);
    CHECK(m[0][0] == doctest::Approx(1.0));
    CHECK(m[0][1] == doctest::Approx(1.0 / 3.0));  // {p1,p2} vs {p2,p3}
    CHECK(m[1][0] == m[0][1]);
    // A zero-paper field yields 0 everywhere, including its diagonal.
    CHECK(m[2][2] == 0.0);
    CHECK(m[0][2] == 0.0);
    CHECK_THROWS_AS(jaccard_overlap({"a"}, c), PipelineError);
}

TEST_CASE("corpus indices are sorted by paper id") {
    Corpus c;
    for (const std::string& id : {"z9", "a1", "m5"}) {
        PaperRecord p;
        p.paper_id = id;
        p.abstract = "x";
        p.year = 2000;
        p.authors.push_back({"auth", "", ""});
        p.field_tags.push_back({0, "f"});
        c.add(p);
    }
    auto idx = c.papers_of_author("auth");
    REQUIRE(idx.size() == 3);
    CHECK(c.papers()[idx[0]].paper_id == "a1");
    CHECK(c.papers()[idx[2]].paper_id == "z9");
    auto tagged = c.papers_with_tag({0, "f"});
    CHECK(c.papers()[tagged[0]].paper_id == "a1");
}
