#pragma once

#include <map>
#include <string>
#include <vector>

namespace scicert {

// Resolved run configuration. Parsed from an INI-style file; unknown
// sections or keys are rejected. Every default mirrors a documented
// analysis constant and is overridable.
struct RunConfig {
    // [paths]
    std::string corpus;
    std::string corpus_format = "jsonl";  // jsonl | tsv
    std::string lexicon;
    std::string names;          // training CSV; unused when name_model given
    std::string regions;
    std::string tagger_file;    // optional external tagger TSV
    std::string external_scores;  // optional external score TSV
    std::string name_model;     // optional pre-trained model JSON

    // [scoring]
    std::string scorer = "hedge";  // hedge | external
    int hedge_cap = 3;
    std::string summary = "min";   // min | mean
    double external_raw_min = 0.0;
    double external_raw_max = 6.0;

    // [tagging]
    std::string tagging_mode = "cue";  // cue | file
    bool last_sentence_fallback = true;

    // [windows]
    int temporal_start = 1910;
    int temporal_end = 2021;
    int correlation_start = 1970;
    int correlation_end = 2020;
    int tweet_year = 2017;
    int geo_trend_start = 2000;
    int geo_trend_end = 2020;

    // [thresholds]
    double alpha_temporal = 0.05;
    double alpha_geo = 0.1;
    int min_graph_nodes = 50;
    int min_country_papers = 50;
    int max_team_size_gender = 10;
    int annual_floor = 1;

    // [fields] discipline groups, semicolon-separated in the file
    std::vector<std::string> fields_computational;
    std::vector<std::string> fields_life;
    std::vector<std::string> fields_social;

    // [run]
    unsigned seed = 42;
    int workers = 0;  // 0 = machine parallelism
    std::string out_dir = "out";

    static RunConfig parse(const std::string& ini_text);
    static RunConfig load(const std::string& path);
    std::string serialize() const;  // canonical key order, round-trips exactly
    std::vector<std::string> all_fields() const;
};

// Stage manifest: inputs/outputs with content hashes so stale intermediates
// are detected. Stored as manifest.json in each stage directory.
struct StageManifest {
    std::string stage;
    std::map<std::string, std::string> inputs;   // path -> fnv64 hex
    std::map<std::string, std::string> outputs;  // file name -> fnv64 hex
    std::string config_hash;

    std::string serialize() const;
    static StageManifest load(const std::string& path);
};

class Pipeline {
  public:
    explicit Pipeline(RunConfig config);

    void run_ingest();
    void run_score();
    void run_features();
    void run_network();
    void run_analyze();
    void run_report();
    void run_all();

    const RunConfig& config() const { return config_; }

  private:
    std::string stage_dir(const std::string& stage) const;
    // Throws a stage error when the upstream manifest is missing or its
    // recorded outputs no longer match the files on disk.
    StageManifest require_stage(const std::string& stage) const;
    void finish_stage(const std::string& stage, const std::map<std::string, std::string>& inputs,
                      const std::vector<std::string>& output_names) const;

    RunConfig config_;
};

}  // namespace scicert
