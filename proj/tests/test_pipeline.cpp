#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "scicert/pipeline.hpp"
#include "scicert/util.hpp"

using namespace scicert;
namespace fs = std::filesystem;

TEST_CASE("config defaults mirror the documented analysis constants") {
    RunConfig c = RunConfig::parse("");
    CHECK(c.temporal_start == 1910);
    CHECK(c.temporal_end == 2021);
    CHECK(c.correlation_start == 1970);
    CHECK(c.correlation_end == 2020);
    CHECK(c.tweet_year == 2017);
    CHECK(c.geo_trend_start == 2000);
    CHECK(c.geo_trend_end == 2020);
    CHECK(c.alpha_temporal == doctest::Approx(0.05));
    CHECK(c.alpha_geo == doctest::Approx(0.1));
    CHECK(c.min_graph_nodes == 50);
    CHECK(c.min_country_papers == 50);
    CHECK(c.max_team_size_gender == 10);
    CHECK(c.hedge_cap == 3);
    CHECK(c.summary == "min");
    CHECK(c.scorer == "hedge");
    CHECK(c.seed == 42);
    CHECK(c.workers == 0);
}

TEST_CASE("config parsing and round trip") {
    std::string ini =
        "[paths]\ncorpus = c.jsonl\nlexicon = h.txt\n"
        "[scoring]\nsummary = mean\nhedge_cap = 4\n"
        "[windows]\ntweet_year = 2015\n"
        "[fields]\ncomputational = computer science; mathematics\n"
        "[run]\nworkers = 3\n";
    RunConfig c = RunConfig::parse(ini);
    CHECK(c.corpus == "c.jsonl");
    CHECK(c.summary == "mean");
    CHECK(c.hedge_cap == 4);
    CHECK(c.tweet_year == 2015);
    CHECK(c.fields_computational ==
          std::vector<std::string>{"computer science", "mathematics"});
    CHECK(c.workers == 3);
    // Canonical serialization re-parses to an identical config.
    RunConfig r = RunConfig::parse(c.serialize());
    CHECK(r.serialize() == c.serialize());
}

TEST_CASE("config rejects unknown keys and bad values") {
    CHECK_THROWS_WITH_AS(RunConfig::parse("[scoring]\nhedge_capp = 3\n"),
                         doctest::Contains("hedge_capp"), PipelineError);
    CHECK_THROWS_AS(RunConfig::parse("[mystery]\nkey = 1\n"), PipelineError);
    CHECK_THROWS_AS(RunConfig::parse("[scoring]\nscorer = quantum\n"), PipelineError);
    CHECK_THROWS_AS(RunConfig::parse("[scoring]\nsummary = median\n"), PipelineError);
    CHECK_THROWS_AS(RunConfig::parse("[windows]\ntweet_year = soon\n"), PipelineError);
    CHECK_THROWS_AS(RunConfig::parse("[tagging]\nlast_sentence_fallback = perhaps\n"),
                    PipelineError);
    CHECK_THROWS_AS(RunConfig::parse("no equals sign here\n"), PipelineError);
}

TEST_CASE("all_fields concatenates the discipline groups in order") {
    RunConfig c;
    c.fields_computational = {"cs"};
    c.fields_life = {"bio", "med"};
    c.fields_social = {"psy"};
    CHECK(c.all_fields() == std::vector<std::string>{"cs", "bio", "med", "psy"});
}

TEST_CASE("stage manifest round trip") {
    testutil::TempDir tmp;
    StageManifest m;
    m.stage = "score";
    m.inputs = {{"a.jsonl", "00ff"}};
    m.outputs = {{"scores.csv", "ab12"}};
    m.config_hash = "cafe";
    auto path = tmp.file("manifest.json", m.serialize());
    StageManifest r = StageManifest::load(path);
    CHECK(r.stage == "score");
    CHECK(r.inputs == m.inputs);
    CHECK(r.outputs == m.outputs);
    CHECK(r.config_hash == m.config_hash);
}

namespace {

RunConfig synthetic_config(const testutil::TempDir& tmp) {
    RunConfig c;
    c.corpus = testutil::data_dir() + "/synthetic/corpus.jsonl";
    c.lexicon = testutil::data_dir() + "/hedges.txt";
    c.names = testutil::data_dir() + "/names.csv";
    c.regions = testutil::data_dir() + "/regions.csv";
    c.out_dir = (tmp.path / "out").string();
    c.temporal_start = 1995;
    c.temporal_end = 2020;
    c.correlation_start = 2005;
    c.correlation_end = 2020;
    c.geo_trend_start = 2005;
    c.min_graph_nodes = 5;
    c.min_country_papers = 5;
    c.annual_floor = 3;
    c.fields_computational = {"computer science"};
    c.fields_life = {"biology"};
    c.fields_social = {"psychology"};
    return c;
}

}  // namespace

TEST_CASE("stages demand their upstream stage") {
    testutil::TempDir tmp;
    Pipeline p(synthetic_config(tmp));
    CHECK_THROWS_WITH_AS(p.run_score(), doctest::Contains("ingest"), PipelineError);
    CHECK_THROWS_WITH_AS(p.run_analyze(), doctest::Contains("score"), PipelineError);
    CHECK_THROWS_WITH_AS(p.run_report(), doctest::Contains("analyze"), PipelineError);
}

TEST_CASE("stale upstream outputs are detected") {
    testutil::TempDir tmp;
    auto cfg = synthetic_config(tmp);
    Pipeline p(cfg);
    p.run_ingest();
    CHECK_NOTHROW(p.run_score());
    // Tamper with the canonical corpus after the fact.
    std::ofstream(fs::path(cfg.out_dir) / "ingest" / "corpus.jsonl", std::ios::app) << "\n";
    CHECK_THROWS_WITH_AS(p.run_score(), doctest::Contains("stale"), PipelineError);
}

TEST_CASE("score stage emits per-sentence and per-paper tables in range") {
    testutil::TempDir tmp;
    auto cfg = synthetic_config(tmp);
    Pipeline p(cfg);
    p.run_ingest();
    p.run_score();
    auto lines = read_lines((fs::path(cfg.out_dir) / "score" / "paper_scores.csv").string());
    REQUIRE(lines.size() > 100);
    CHECK(lines[0] == "paper_id,year,score,scorer,n_conclusions");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        auto cols = split(lines[i], ',');
        double v = *parse_double(cols[2]);
        CHECK(v >= 1.0);
        CHECK(v <= 3.0);
        CHECK(cols[3] == "hedge/min");
    }
    // Sentence table covers every sentence; conclusion rows carry scores.
    auto sent = read_lines((fs::path(cfg.out_dir) / "score" / "sentence_scores.tsv").string());
    CHECK(sent[0] == "paper_id\tindex\trole\traw\tvalue");
    bool saw_conclusion = false, saw_other = false;
    for (std::size_t i = 1; i < sent.size(); ++i) {
        if (trim(sent[i]).empty()) continue;
        auto cols = split(sent[i], '\t');
        if (cols[2] == "conclusion") {
            saw_conclusion = true;
            double v = *parse_double(cols[4]);
            CHECK(v >= 1.0);
            CHECK(v <= 3.0);
        } else {
            saw_other = true;
            CHECK(cols[4].empty());
        }
    }
    CHECK(saw_conclusion);
    CHECK(saw_other);
}

TEST_CASE("full pipeline is deterministic and the report is complete") {
    testutil::TempDir tmp;
    auto cfg = synthetic_config(tmp);
    Pipeline(cfg).run_all();

    // Collect a hash of every file, then rerun into the same tree.
    std::map<std::string, std::uint64_t> first;
    for (const auto& e : fs::recursive_directory_iterator(cfg.out_dir))
        if (e.is_regular_file()) first[e.path().string()] = hash_file(e.path().string());
    Pipeline(cfg).run_all();
    std::map<std::string, std::uint64_t> second;
    for (const auto& e : fs::recursive_directory_iterator(cfg.out_dir))
        if (e.is_regular_file()) second[e.path().string()] = hash_file(e.path().string());
    CHECK(first == second);

    // The manifest lists every figure analog.
    auto manifest = read_file((fs::path(cfg.out_dir) / "report" / "report_manifest.json").string());
    for (const char* fig : {"2d", "2e", "2f", "3a", "3b", "3c", "3d", "3e", "3f", "3g", "3h",
                            "3i", "4a", "4b", "4c"}) {
        CAPTURE(fig);
        CHECK(manifest.find(std::string("\"") + fig + "\"") != std::string::npos);
        CHECK(fs::exists(fs::path(cfg.out_dir) / "report" / ("fig" + std::string(fig) + ".json")));
    }
}
