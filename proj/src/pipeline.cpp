#include "scicert/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <json.hpp>
#include <mutex>
#include <set>
#include <sstream>

#include "scicert/analysis.hpp"
#include "scicert/certainty.hpp"
#include "scicert/corpus.hpp"
#include "scicert/gender.hpp"
#include "scicert/network.hpp"
#include "scicert/stats.hpp"
#include "scicert/team_metrics.hpp"
#include "scicert/util.hpp"

namespace fs = std::filesystem;

namespace scicert {

namespace {

std::vector<std::string> parse_field_list(const std::string& v) {
    std::vector<std::string> out;
    for (const auto& part : split(v, ';')) {
        std::string t = trim(part);
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

std::string join_fields(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) out += (i ? ";" : "") + fields[i];
    return out;
}

bool parse_bool(const std::string& v) {
    std::string t = lower(trim(v));
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw PipelineError("bad boolean value: " + v);
}

std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace

RunConfig RunConfig::parse(const std::string& ini_text) {
    RunConfig c;
    std::string section;
    std::size_t lineno = 0;
    std::istringstream in(ini_text);
    std::string line;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw PipelineError("config line " + std::to_string(lineno) + ": bad section");
            section = t.substr(1, t.size() - 2);
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw PipelineError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        std::string val = trim(t.substr(eq + 1));
        auto num = [&](int& dst) {
            auto v = parse_long(val);
            if (!v) throw PipelineError("config: bad integer for " + key + ": " + val);
            dst = static_cast<int>(*v);
        };
        auto real = [&](double& dst) {
            auto v = parse_double(val);
            if (!v) throw PipelineError("config: bad number for " + key + ": " + val);
            dst = *v;
        };
        std::string qual = section + "." + key;
        if (qual == "paths.corpus") c.corpus = val;
        else if (qual == "paths.corpus_format") c.corpus_format = val;
        else if (qual == "paths.lexicon") c.lexicon = val;
        else if (qual == "paths.names") c.names = val;
        else if (qual == "paths.regions") c.regions = val;
        else if (qual == "paths.tagger_file") c.tagger_file = val;
        else if (qual == "paths.external_scores") c.external_scores = val;
        else if (qual == "paths.name_model") c.name_model = val;
        else if (qual == "scoring.scorer") c.scorer = val;
        else if (qual == "scoring.hedge_cap") num(c.hedge_cap);
        else if (qual == "scoring.summary") c.summary = val;
        else if (qual == "scoring.external_raw_min") real(c.external_raw_min);
        else if (qual == "scoring.external_raw_max") real(c.external_raw_max);
        else if (qual == "tagging.mode") c.tagging_mode = val;
        else if (qual == "tagging.last_sentence_fallback") c.last_sentence_fallback = parse_bool(val);
        else if (qual == "windows.temporal_start") num(c.temporal_start);
        else if (qual == "windows.temporal_end") num(c.temporal_end);
        else if (qual == "windows.correlation_start") num(c.correlation_start);
        else if (qual == "windows.correlation_end") num(c.correlation_end);
        else if (qual == "windows.tweet_year") num(c.tweet_year);
        else if (qual == "windows.geo_trend_start") num(c.geo_trend_start);
        else if (qual == "windows.geo_trend_end") num(c.geo_trend_end);
        else if (qual == "thresholds.alpha_temporal") real(c.alpha_temporal);
        else if (qual == "thresholds.alpha_geo") real(c.alpha_geo);
        else if (qual == "thresholds.min_graph_nodes") num(c.min_graph_nodes);
        else if (qual == "thresholds.min_country_papers") num(c.min_country_papers);
        else if (qual == "thresholds.max_team_size_gender") num(c.max_team_size_gender);
        else if (qual == "thresholds.annual_floor") num(c.annual_floor);
        else if (qual == "fields.computational") c.fields_computational = parse_field_list(val);
        else if (qual == "fields.life") c.fields_life = parse_field_list(val);
        else if (qual == "fields.social") c.fields_social = parse_field_list(val);
        else if (qual == "run.seed") {
            auto v = parse_long(val);
            if (!v || *v < 0) throw PipelineError("config: bad seed: " + val);
            c.seed = static_cast<unsigned>(*v);
        } else if (qual == "run.workers") num(c.workers);
        else if (qual == "run.out") c.out_dir = val;
        else throw PipelineError("config: unknown key '" + key + "' in section [" + section + "]");
    }
    if (c.scorer != "hedge" && c.scorer != "external")
        throw PipelineError("config: scorer must be hedge or external");
    if (c.summary != "min" && c.summary != "mean")
        throw PipelineError("config: summary must be min or mean");
    if (c.tagging_mode != "cue" && c.tagging_mode != "file")
        throw PipelineError("config: tagging mode must be cue or file");
    if (c.corpus_format != "jsonl" && c.corpus_format != "tsv")
        throw PipelineError("config: corpus_format must be jsonl or tsv");
    return c;
}

RunConfig RunConfig::load(const std::string& path) { return parse(read_file(path)); }

std::string RunConfig::serialize() const {
    std::ostringstream o;
    o << "[paths]\n";
    o << "corpus = " << corpus << "\n";
    o << "corpus_format = " << corpus_format << "\n";
    o << "lexicon = " << lexicon << "\n";
    o << "names = " << names << "\n";
    o << "regions = " << regions << "\n";
    o << "tagger_file = " << tagger_file << "\n";
    o << "external_scores = " << external_scores << "\n";
    o << "name_model = " << name_model << "\n";
    o << "\n[scoring]\n";
    o << "scorer = " << scorer << "\n";
    o << "hedge_cap = " << hedge_cap << "\n";
    o << "summary = " << summary << "\n";
    o << "external_raw_min = " << fmt_double(external_raw_min) << "\n";
    o << "external_raw_max = " << fmt_double(external_raw_max) << "\n";
    o << "\n[tagging]\n";
    o << "mode = " << tagging_mode << "\n";
    o << "last_sentence_fallback = " << (last_sentence_fallback ? "true" : "false") << "\n";
    o << "\n[windows]\n";
    o << "temporal_start = " << temporal_start << "\n";
    o << "temporal_end = " << temporal_end << "\n";
    o << "correlation_start = " << correlation_start << "\n";
    o << "correlation_end = " << correlation_end << "\n";
    o << "tweet_year = " << tweet_year << "\n";
    o << "geo_trend_start = " << geo_trend_start << "\n";
    o << "geo_trend_end = " << geo_trend_end << "\n";
    o << "\n[thresholds]\n";
    o << "alpha_temporal = " << fmt_double(alpha_temporal) << "\n";
    o << "alpha_geo = " << fmt_double(alpha_geo) << "\n";
    o << "min_graph_nodes = " << min_graph_nodes << "\n";
    o << "min_country_papers = " << min_country_papers << "\n";
    o << "max_team_size_gender = " << max_team_size_gender << "\n";
    o << "annual_floor = " << annual_floor << "\n";
    o << "\n[fields]\n";
    o << "computational = " << join_fields(fields_computational) << "\n";
    o << "life = " << join_fields(fields_life) << "\n";
    o << "social = " << join_fields(fields_social) << "\n";
    o << "\n[run]\n";
    o << "seed = " << seed << "\n";
    o << "workers = " << workers << "\n";
    o << "out = " << out_dir << "\n";
    return o.str();
}

std::vector<std::string> RunConfig::all_fields() const {
    std::vector<std::string> out = fields_computational;
    out.insert(out.end(), fields_life.begin(), fields_life.end());
    out.insert(out.end(), fields_social.begin(), fields_social.end());
    return out;
}

std::string StageManifest::serialize() const {
    nlohmann::ordered_json j;
    j["stage"] = stage;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    j["config_hash"] = config_hash;
    return j.dump(2) + "\n";
}

StageManifest StageManifest::load(const std::string& path) {
    nlohmann::json j = nlohmann::json::parse(read_file(path));
    StageManifest m;
    m.stage = j.at("stage").get<std::string>();
    m.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
    m.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
    m.config_hash = j.at("config_hash").get<std::string>();
    return m;
}

Pipeline::Pipeline(RunConfig config) : config_(std::move(config)) {}

std::string Pipeline::stage_dir(const std::string& stage) const {
    return (fs::path(config_.out_dir) / stage).string();
}

StageManifest Pipeline::require_stage(const std::string& stage) const {
    fs::path manifest = fs::path(stage_dir(stage)) / "manifest.json";
    if (!fs::exists(manifest))
        throw PipelineError("stage '" + stage + "' has not been run (missing " + manifest.string() +
                            "); run `scicert " + stage + "` first");
    StageManifest m = StageManifest::load(manifest.string());
    for (const auto& [name, hash] : m.outputs) {
        fs::path p = fs::path(stage_dir(stage)) / name;
        if (!fs::exists(p) || hex64(hash_file(p.string())) != hash)
            throw PipelineError("stage '" + stage + "' output is stale or missing: " + p.string() +
                                "; rerun `scicert " + stage + "`");
    }
    return m;
}

void Pipeline::finish_stage(const std::string& stage,
                            const std::map<std::string, std::string>& inputs,
                            const std::vector<std::string>& output_names) const {
    fs::path dir = stage_dir(stage);
    write_file((dir / "config_resolved.ini").string(), config_.serialize());
    StageManifest m;
    m.stage = stage;
    m.inputs = inputs;
    m.config_hash = hex64(fnv1a(config_.serialize()));
    for (const auto& name : output_names)
        m.outputs[name] = hex64(hash_file((dir / name).string()));
    m.outputs["config_resolved.ini"] = hex64(fnv1a(config_.serialize()));
    write_file((dir / "manifest.json").string(), m.serialize());
}

// --- ingest ----------------------------------------------------------------

void Pipeline::run_ingest() {
    if (config_.corpus.empty()) throw PipelineError("config: paths.corpus is required");
    fs::create_directories(stage_dir("ingest"));
    RecordFormat fmt = config_.corpus_format == "tsv" ? RecordFormat::tsv : RecordFormat::jsonl;
    Corpus corpus = ingest(config_.corpus, fmt);
    write_file((fs::path(stage_dir("ingest")) / "corpus.jsonl").string(), corpus.serialize_jsonl());
    nlohmann::ordered_json stats;
    stats["accepted"] = corpus.ingest_stats().accepted;
    stats["skipped"] = corpus.ingest_stats().skipped;
    write_file((fs::path(stage_dir("ingest")) / "ingest_stats.json").string(), stats.dump(2) + "\n");
    finish_stage("ingest", {{config_.corpus, hex64(hash_file(config_.corpus))}},
                 {"corpus.jsonl", "ingest_stats.json"});
}

namespace {

Corpus load_ingested(const std::string& path) {
    Corpus corpus;
    for (const auto& line : read_lines(path)) {
        if (trim(line).empty()) continue;
        corpus.add(parse_record_json(line));
    }
    return corpus;
}

}  // namespace

// --- score -----------------------------------------------------------------

void Pipeline::run_score() {
    require_stage("ingest");
    fs::path in_corpus = fs::path(stage_dir("ingest")) / "corpus.jsonl";
    Corpus corpus = load_ingested(in_corpus.string());
    fs::create_directories(stage_dir("score"));

    std::map<std::string, std::string> inputs{{in_corpus.string(), hex64(hash_file(in_corpus.string()))}};

    std::unique_ptr<ConclusionTagger> tagger;
    if (config_.tagging_mode == "file") {
        if (config_.tagger_file.empty()) throw PipelineError("config: tagging mode=file needs paths.tagger_file");
        tagger = std::make_unique<FileTagger>(config_.tagger_file);
        inputs[config_.tagger_file] = hex64(hash_file(config_.tagger_file));
    } else {
        tagger = std::make_unique<CuePhraseTagger>(CuePhraseTagger::default_cues(),
                                                   config_.last_sentence_fallback);
    }
    tag_conclusions(corpus, *tagger);

    SummaryPolicy policy = config_.summary == "mean" ? SummaryPolicy::mean : SummaryPolicy::min;
    std::map<std::pair<std::string, int>, CertaintyScore> external;
    HedgeLexicon lexicon;
    if (config_.scorer == "external") {
        if (config_.external_scores.empty())
            throw PipelineError("config: scorer=external needs paths.external_scores");
        external = load_external_scores(config_.external_scores, config_.external_raw_min,
                                        config_.external_raw_max);
        inputs[config_.external_scores] = hex64(hash_file(config_.external_scores));
    } else {
        if (config_.lexicon.empty()) throw PipelineError("config: scorer=hedge needs paths.lexicon");
        lexicon = HedgeLexicon::load(config_.lexicon);
        inputs[config_.lexicon] = hex64(hash_file(config_.lexicon));
    }

    std::ostringstream sent_out, paper_out, excl_out;
    sent_out << "paper_id\tindex\trole\traw\tvalue\n";
    paper_out << "paper_id,year,score,scorer,n_conclusions\n";

    // Deterministic order: papers sorted by id.
    std::vector<const PaperRecord*> order;
    for (const auto& p : corpus.papers()) order.push_back(&p);
    std::sort(order.begin(), order.end(),
              [](const PaperRecord* a, const PaperRecord* b) { return a->paper_id < b->paper_id; });

    // Scoring is pure per paper; compute in parallel into slots.
    struct PaperOut {
        std::string sent_rows, paper_row, excluded;
    };
    std::vector<PaperOut> slots(order.size());
    parallel_for(order.size(), config_.workers, [&](std::size_t i) {
        const PaperRecord& p = *order[i];
        PaperOut& slot = slots[i];
        std::vector<CertaintyScore> conc_scores;
        for (const auto& s : p.sentences) {
            std::string role = s.role == SentenceRole::conclusion ? "conclusion" : "other";
            if (s.role == SentenceRole::conclusion) {
                CertaintyScore cs;
                if (config_.scorer == "external") {
                    auto it = external.find({p.paper_id, s.index});
                    if (it == external.end())
                        throw PipelineError("external scores missing sentence " +
                                            std::to_string(s.index) + " of paper " + p.paper_id);
                    cs = it->second;
                } else {
                    cs = score_sentence_hedge(s.text, lexicon, config_.hedge_cap);
                }
                conc_scores.push_back(cs);
                slot.sent_rows += p.paper_id + "\t" + std::to_string(s.index) + "\t" + role + "\t" +
                                  fmt_double(cs.raw) + "\t" + fmt_double(cs.value) + "\n";
            } else {
                slot.sent_rows += p.paper_id + "\t" + std::to_string(s.index) + "\t" + role + "\t\t\n";
            }
        }
        if (p.excluded_no_conclusion || conc_scores.empty()) {
            slot.excluded = p.paper_id + "\n";
            return;
        }
        CertaintyScore summary = summarize_paper(conc_scores, policy);
        slot.paper_row = p.paper_id + "," + std::to_string(p.year) + "," + fmt_double(summary.value) +
                         "," + summary.scorer + "," + std::to_string(conc_scores.size()) + "\n";
    });
    for (const auto& s : slots) {
        sent_out << s.sent_rows;
        paper_out << s.paper_row;
        excl_out << s.excluded;
    }
    fs::path dir = stage_dir("score");
    write_file((dir / "sentence_scores.tsv").string(), sent_out.str());
    write_file((dir / "paper_scores.csv").string(), paper_out.str());
    write_file((dir / "excluded.txt").string(), excl_out.str());
    finish_stage("score", inputs, {"sentence_scores.tsv", "paper_scores.csv", "excluded.txt"});
}

// --- features --------------------------------------------------------------

void Pipeline::run_features() {
    require_stage("ingest");
    fs::path in_corpus = fs::path(stage_dir("ingest")) / "corpus.jsonl";
    Corpus corpus = load_ingested(in_corpus.string());
    fs::create_directories(stage_dir("features"));
    std::map<std::string, std::string> inputs{{in_corpus.string(), hex64(hash_file(in_corpus.string()))}};

    NameModel model;
    if (!config_.name_model.empty()) {
        model = NameModel::load(config_.name_model);
        inputs[config_.name_model] = hex64(hash_file(config_.name_model));
    } else {
        if (config_.names.empty())
            throw PipelineError("config: features needs paths.names or paths.name_model");
        auto samples = load_name_samples(config_.names);
        TrainOptions opts;
        opts.holdout = true;
        opts.seed = config_.seed;
        model = train(samples, opts);
        inputs[config_.names] = hex64(hash_file(config_.names));
        if (model.report().f1)
            info("gender model held-out F1 " + fmt_double(*model.report().f1) + ", ROC-AUC " +
                 fmt_double(*model.report().roc_auc));
    }
    fs::path dir = stage_dir("features");
    model.save((dir / "name_model.json").string());

    auto level0 = corpus.level0_fields();

    std::vector<const PaperRecord*> order;
    for (const auto& p : corpus.papers()) order.push_back(&p);
    std::sort(order.begin(), order.end(),
              [](const PaperRecord* a, const PaperRecord* b) { return a->paper_id < b->paper_id; });

    std::vector<std::string> rows(order.size());
    parallel_for(order.size(), config_.workers, [&](std::size_t i) {
        const PaperRecord& p = *order[i];
        std::ostringstream r;
        r << p.paper_id << ',' << p.year << ',' << p.authors.size() << ',';
        auto put_gender = [&](GenderBasis basis) {
            auto g = paper_gender(p, model, basis, config_.max_team_size_gender);
            if (g) r << fmt_double(g->value);
            r << ',';
        };
        put_gender(GenderBasis::first_author);
        put_gender(GenderBasis::last_author);
        put_gender(GenderBasis::all_authors_mean);
        if (!p.authors.empty()) {
            std::vector<ResearchBackground> team;
            for (const auto& a : p.authors)
                team.push_back(build_background(a.author_id, corpus, p.year, level0));
            TeamDispersion d = interdisciplinarity(team);
            if (d.defined) r << fmt_double(d.value);
        }
        r << ',';
        if (p.journal_rank) r << fmt_double(*p.journal_rank);
        r << ',' << p.citation_count << ',';
        if (p.tweet_count) r << *p.tweet_count;
        r << '\n';
        rows[i] = r.str();
    });
    std::ostringstream out;
    out << "paper_id,year,n_authors,gender_first,gender_last,gender_all,interdisciplinarity,"
           "journal_rank,citation_count,tweet_count\n";
    for (const auto& r : rows) out << r;
    write_file((dir / "features.csv").string(), out.str());
    finish_stage("features", inputs, {"features.csv", "name_model.json"});
}

// --- network ---------------------------------------------------------------

void Pipeline::run_network() {
    require_stage("ingest");
    fs::path in_corpus = fs::path(stage_dir("ingest")) / "corpus.jsonl";
    Corpus corpus = load_ingested(in_corpus.string());
    fs::create_directories(stage_dir("network"));

    std::set<std::string> subfields;
    for (const auto& p : corpus.papers())
        for (const auto& t : p.subfield_tags()) subfields.insert(t);

    std::vector<std::pair<std::string, int>> tasks;
    for (const auto& sf : subfields)
        for (int t = config_.correlation_start; t <= config_.correlation_end; ++t)
            tasks.emplace_back(sf, t);

    std::vector<std::string> rows(tasks.size());
    parallel_for(tasks.size(), config_.workers, [&](std::size_t i) {
        const auto& [sf, t] = tasks[i];
        CoauthorGraph g = build_graph(corpus, sf, t, config_.min_graph_nodes);
        if (g.members.empty()) return;
        std::ostringstream r;
        r << sf << ',' << t << ',' << g.members.size() << ',' << g.externals.size() << ',';
        if (g.members.size() >= 2) r << fmt_double(gini_centrality(g));
        r << ',' << fmt_double(echo_chamber(g, EchoChamberMode::node_ratio)) << ','
          << fmt_double(echo_chamber(g, EchoChamberMode::edge_ratio)) << ',' << (g.sparse ? 1 : 0)
          << '\n';
        rows[i] = r.str();
    });
    std::ostringstream out;
    out << "subfield,year,members,externals,gini,echo_node,echo_edge,sparse\n";
    for (const auto& r : rows) out << r;
    write_file((fs::path(stage_dir("network")) / "network_metrics.csv").string(), out.str());
    finish_stage("network",
                 {{in_corpus.string(), hex64(hash_file(in_corpus.string()))}},
                 {"network_metrics.csv"});
}

// --- analyze ---------------------------------------------------------------

namespace {

struct FeatureRow {
    int year = 0;
    int n_authors = 0;
    std::optional<double> gender_first, gender_last, gender_all, interdisc, journal_rank;
    long citations = 0;
    std::optional<long> tweets;
};

std::map<std::string, double> load_paper_scores(const std::string& path) {
    std::map<std::string, double> out;
    auto lines = read_lines(path);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        auto cols = split(lines[i], ',');
        out[cols[0]] = *parse_double(cols[2]);
    }
    return out;
}

std::map<std::string, FeatureRow> load_features(const std::string& path) {
    std::map<std::string, FeatureRow> out;
    auto lines = read_lines(path);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        auto cols = split(lines[i], ',');
        FeatureRow f;
        f.year = static_cast<int>(*parse_long(cols[1]));
        f.n_authors = static_cast<int>(*parse_long(cols[2]));
        if (!cols[3].empty()) f.gender_first = *parse_double(cols[3]);
        if (!cols[4].empty()) f.gender_last = *parse_double(cols[4]);
        if (!cols[5].empty()) f.gender_all = *parse_double(cols[5]);
        if (!cols[6].empty()) f.interdisc = *parse_double(cols[6]);
        if (!cols[7].empty()) f.journal_rank = *parse_double(cols[7]);
        f.citations = *parse_long(cols[8]);
        if (!cols[9].empty()) f.tweets = *parse_long(cols[9]);
        out[cols[0]] = f;
    }
    return out;
}

struct NetworkRow {
    std::optional<double> gini;
    double echo_node = 1.0, echo_edge = 0.0;
    std::size_t members = 0;
    bool sparse = true;
};

std::map<std::pair<std::string, int>, NetworkRow> load_network(const std::string& path) {
    std::map<std::pair<std::string, int>, NetworkRow> out;
    auto lines = read_lines(path);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        auto cols = split(lines[i], ',');
        NetworkRow r;
        r.members = static_cast<std::size_t>(*parse_long(cols[2]));
        if (!cols[4].empty()) r.gini = *parse_double(cols[4]);
        r.echo_node = *parse_double(cols[5]);
        r.echo_edge = *parse_double(cols[6]);
        r.sparse = *parse_long(cols[7]) != 0;
        out[{cols[0], static_cast<int>(*parse_long(cols[1]))}] = r;
    }
    return out;
}

}  // namespace

void Pipeline::run_analyze() {
    require_stage("score");
    require_stage("features");
    require_stage("network");
    fs::path in_corpus = fs::path(stage_dir("ingest")) / "corpus.jsonl";
    Corpus corpus = load_ingested(in_corpus.string());
    fs::path scores_path = fs::path(stage_dir("score")) / "paper_scores.csv";
    fs::path features_path = fs::path(stage_dir("features")) / "features.csv";
    fs::path network_path = fs::path(stage_dir("network")) / "network_metrics.csv";
    auto scores = load_paper_scores(scores_path.string());
    auto features = load_features(features_path.string());
    auto network = load_network(network_path.string());
    if (config_.regions.empty()) throw PipelineError("config: paths.regions is required for analyze");
    RegionMap regions = RegionMap::load(config_.regions);

    fs::create_directories(stage_dir("analyze"));
    AnalysisTable table;

    auto fields = config_.all_fields();
    for (const auto& field : fields) {
        table.append(annual_averages(corpus, scores, field, config_.temporal_start,
                                     config_.temporal_end,
                                     static_cast<std::size_t>(config_.annual_floor)));

        // Per-paper joins inside the correlation window.
        std::vector<YearObs> team_obs, inter_obs, gf_obs, gl_obs, ga_obs, rank_obs, cite_obs,
            gini_obs, echo_obs;
        for (const auto& p : corpus.papers()) {
            if (p.year < config_.correlation_start || p.year > config_.correlation_end) continue;
            auto tags = p.level_tags(0);
            if (std::find(tags.begin(), tags.end(), field) == tags.end()) continue;
            auto sit = scores.find(p.paper_id);
            if (sit == scores.end()) continue;
            double cert = sit->second;
            auto fit = features.find(p.paper_id);
            if (fit == features.end()) continue;
            const FeatureRow& f = fit->second;

            if (f.interdisc) {
                team_obs.push_back({p.year, static_cast<double>(f.n_authors), cert, {*f.interdisc}});
                inter_obs.push_back({p.year, *f.interdisc, cert, {static_cast<double>(f.n_authors)}});
            }
            if (f.gender_first) gf_obs.push_back({p.year, *f.gender_first, cert, {}});
            if (f.gender_last) gl_obs.push_back({p.year, *f.gender_last, cert, {}});
            if (f.gender_all) ga_obs.push_back({p.year, *f.gender_all, cert, {}});
            if (f.journal_rank) rank_obs.push_back({p.year, *f.journal_rank, cert, {}});
            cite_obs.push_back({p.year, static_cast<double>(f.citations), cert, {}});

            // Pre-publication join: the predictor graph covers [t-10, t-1],
            // so a paper never contributes edges to its own predictor.
            auto subs = p.subfield_tags();
            std::sort(subs.begin(), subs.end());
            for (const auto& sf : subs) {
                auto nit = network.find({sf, p.year});
                if (nit == network.end() || nit->second.sparse) continue;
                if (nit->second.gini) gini_obs.push_back({p.year, *nit->second.gini, cert, {}});
                echo_obs.push_back({p.year, nit->second.echo_node, cert, {}});
                break;  // first (lexicographic) usable subfield
            }
        }
        double a = config_.alpha_temporal;
        table.append(yearly_correlation(field, "corr_team_size", team_obs, CorrMethod::partial, a,
                                        {"interdisciplinarity"}));
        table.append(yearly_correlation(field, "corr_interdisciplinarity", inter_obs,
                                        CorrMethod::partial, a, {"team_size"}));
        table.append(yearly_correlation(field, "corr_gender_first", gf_obs, CorrMethod::spearman, a));
        table.append(yearly_correlation(field, "corr_gender_last", gl_obs, CorrMethod::spearman, a));
        table.append(yearly_correlation(field, "corr_gender_all", ga_obs, CorrMethod::spearman, a));
        table.append(yearly_correlation(field, "corr_journal_rank", rank_obs, CorrMethod::spearman, a));
        table.append(yearly_correlation(field, "corr_citations", cite_obs, CorrMethod::spearman, a));
        table.append(yearly_correlation(field, "corr_centrality", gini_obs, CorrMethod::spearman, a));
        table.append(yearly_correlation(field, "corr_echo_chamber", echo_obs, CorrMethod::spearman, a));

        // Tweet count association for the focus year, journal rank controlled.
        std::vector<YearObs> tweet_obs;
        for (const auto& p : corpus.papers()) {
            if (p.year != config_.tweet_year) continue;
            auto tags = p.level_tags(0);
            if (std::find(tags.begin(), tags.end(), field) == tags.end()) continue;
            auto sit = scores.find(p.paper_id);
            auto fit = features.find(p.paper_id);
            if (sit == scores.end() || fit == features.end()) continue;
            const FeatureRow& f = fit->second;
            if (!f.tweets || !f.journal_rank) continue;
            tweet_obs.push_back(
                {p.year, static_cast<double>(*f.tweets), sit->second, {*f.journal_rank}});
        }
        table.append(yearly_correlation(field, "corr_tweets_partial_journal", tweet_obs,
                                        CorrMethod::partial, a, {"journal_rank"}));
    }
    fs::path dir = stage_dir("analyze");
    write_file((dir / "analysis.csv").string(), table.to_csv());

    // Tweeted vs non-tweeted comparison for the focus year.
    auto tweet_cmp = tweet_group_comparison(corpus, scores, config_.tweet_year, fields);
    std::ostringstream tw;
    tw << "field,pct_certainty_decrease,n_tweeted,n_untweeted,log10_n_tweeted,u,p_value\n";
    for (const auto& t : tweet_cmp) {
        tw << t.field << ',' << fmt_double(t.pct_certainty_decrease) << ',' << t.n_tweeted << ','
           << t.n_untweeted << ',' << fmt_double(t.log10_n_tweeted) << ',' << fmt_double(t.u) << ','
           << fmt_double(t.p_value) << '\n';
    }
    write_file((dir / "tweets.csv").string(), tw.str());

    // Geographic summaries per discipline group.
    std::vector<std::pair<std::string, std::vector<std::string>>> groups = {
        {"computational", config_.fields_computational},
        {"life", config_.fields_life},
        {"social", config_.fields_social},
    };
    std::vector<std::string> geo_files;
    for (const auto& [group, gfields] : groups) {
        if (gfields.empty()) continue;
        GeographicSummary g = geographic_summary(
            corpus, scores, gfields, static_cast<std::size_t>(config_.min_country_papers), regions,
            config_.geo_trend_start, config_.geo_trend_end, config_.alpha_geo);
        std::ostringstream co, re, tr;
        co << "country,mean_certainty,n\n";
        for (const auto& c : g.countries)
            co << c.country << ',' << fmt_double(c.mean_certainty) << ',' << c.n << '\n';
        re << "region,mean_certainty,normalized,n\n";
        for (const auto& r : g.regions)
            re << r.region << ',' << fmt_double(r.mean_certainty) << ',' << fmt_double(r.normalized)
               << ',' << r.n << '\n';
        tr << "country,trend,p_value,masked,n\n";
        for (const auto& t : g.trends)
            tr << t.field << ',' << fmt_double(t.value) << ',' << fmt_double(*t.p_value) << ','
               << (t.masked ? 1 : 0) << ',' << t.n << '\n';
        write_file((dir / ("geo_countries_" + group + ".csv")).string(), co.str());
        write_file((dir / ("geo_regions_" + group + ".csv")).string(), re.str());
        write_file((dir / ("geo_trends_" + group + ".csv")).string(), tr.str());
        geo_files.push_back("geo_countries_" + group + ".csv");
        geo_files.push_back("geo_regions_" + group + ".csv");
        geo_files.push_back("geo_trends_" + group + ".csv");
    }

    std::map<std::string, std::string> inputs;
    for (const auto& p : {in_corpus, scores_path, features_path, network_path})
        inputs[p.string()] = hex64(hash_file(p.string()));
    inputs[config_.regions] = hex64(hash_file(config_.regions));
    std::vector<std::string> outputs = {"analysis.csv", "tweets.csv"};
    outputs.insert(outputs.end(), geo_files.begin(), geo_files.end());
    finish_stage("analyze", inputs, outputs);
}

// --- report ----------------------------------------------------------------

namespace {

// analysis.csv rows grouped back into per-figure series.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::string& path) {
    CsvTable t;
    auto lines = read_lines(path);
    if (lines.empty()) return t;
    t.header = split(lines[0], ',');
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        t.rows.push_back(split(lines[i], ','));
    }
    return t;
}

nlohmann::ordered_json correlation_series(const CsvTable& analysis, const std::string& metric) {
    // field -> sorted year rows
    std::map<std::string, nlohmann::ordered_json> by_field;
    for (const auto& r : analysis.rows) {
        if (r[2] != metric) continue;
        auto& arr = by_field[r[0]];
        if (arr.is_null()) arr = nlohmann::ordered_json::array();
        nlohmann::ordered_json point;
        point["year"] = std::stoi(r[1]);
        point["value"] = std::stod(r[3]);
        point["p_value"] = std::stod(r[4]);
        point["masked"] = r[5] == "1";
        point["n"] = std::stoul(r[6]);
        arr.push_back(point);
    }
    nlohmann::ordered_json series = nlohmann::ordered_json::array();
    for (const auto& [field, arr] : by_field) {
        nlohmann::ordered_json s;
        s["field"] = field;
        s["points"] = arr;
        series.push_back(s);
    }
    return series;
}

}  // namespace

void Pipeline::run_report() {
    require_stage("analyze");
    fs::path adir = stage_dir("analyze");
    fs::create_directories(stage_dir("report"));
    fs::path rdir = stage_dir("report");

    CsvTable analysis = read_csv((adir / "analysis.csv").string());

    std::map<std::string, std::string> figures;  // figure id -> file name
    auto emit = [&](const std::string& fig, nlohmann::ordered_json content) {
        nlohmann::ordered_json j;
        j["figure"] = fig;
        j["data"] = std::move(content);
        std::string name = "fig" + fig + ".json";
        write_file((rdir / name).string(), j.dump(2) + "\n");
        figures[fig] = name;
    };

    // 2d-f: annual certainty averages per discipline group.
    std::vector<std::pair<std::string, std::vector<std::string>>> groups = {
        {"2d", config_.fields_computational},
        {"2e", config_.fields_life},
        {"2f", config_.fields_social},
    };
    for (const auto& [fig, gfields] : groups) {
        nlohmann::ordered_json series = nlohmann::ordered_json::array();
        for (const auto& field : gfields) {
            std::map<int, std::pair<double, double>> mean_sd;
            std::map<int, std::size_t> counts;
            for (const auto& r : analysis.rows) {
                if (r[0] != field) continue;
                int year = std::stoi(r[1]);
                if (r[2] == "certainty_mean") {
                    mean_sd[year].first = std::stod(r[3]);
                    counts[year] = std::stoul(r[6]);
                } else if (r[2] == "certainty_sd") {
                    mean_sd[year].second = std::stod(r[3]);
                }
            }
            nlohmann::ordered_json points = nlohmann::ordered_json::array();
            for (const auto& [year, ms] : mean_sd) {
                nlohmann::ordered_json p;
                p["year"] = year;
                p["mean"] = ms.first;
                p["sd"] = ms.second;
                p["n"] = counts[year];
                points.push_back(p);
            }
            nlohmann::ordered_json s;
            s["field"] = field;
            s["points"] = points;
            series.push_back(s);
        }
        emit(fig, series);
    }

    // 3a-g and 3i: correlation series per metric.
    const std::vector<std::pair<std::string, std::string>> corr_figures = {
        {"3a", "corr_team_size"},      {"3b", "corr_gender_first"},
        {"3c", "corr_interdisciplinarity"}, {"3d", "corr_journal_rank"},
        {"3e", "corr_centrality"},     {"3f", "corr_echo_chamber"},
        {"3g", "corr_citations"},      {"3i", "corr_tweets_partial_journal"},
    };
    for (const auto& [fig, metric] : corr_figures) emit(fig, correlation_series(analysis, metric));

    // 3h: tweeted vs non-tweeted comparison.
    {
        CsvTable tw = read_csv((adir / "tweets.csv").string());
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& r : tw.rows) {
            nlohmann::ordered_json j;
            j["field"] = r[0];
            j["pct_certainty_decrease"] = std::stod(r[1]);
            j["n_tweeted"] = std::stoul(r[2]);
            j["n_untweeted"] = std::stoul(r[3]);
            j["log10_n_tweeted"] = std::stod(r[4]);
            j["u"] = std::stod(r[5]);
            j["p_value"] = std::stod(r[6]);
            arr.push_back(j);
        }
        emit("3h", arr);
    }

    // 4a-c: geographic tables; 4a/4b from the computational group.
    auto geo_json = [&](const std::string& file) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        if (!fs::exists(adir / file)) return arr;
        CsvTable t = read_csv((adir / file).string());
        for (const auto& r : t.rows) {
            nlohmann::ordered_json j;
            for (std::size_t c = 0; c < t.header.size(); ++c) {
                auto d = parse_double(r[c]);
                if (d) j[t.header[c]] = *d;
                else j[t.header[c]] = r[c];
            }
            arr.push_back(j);
        }
        return arr;
    };
    emit("4a", geo_json("geo_countries_computational.csv"));
    emit("4b", geo_json("geo_trends_computational.csv"));
    {
        nlohmann::ordered_json by_group;
        for (const auto& g : {"computational", "life", "social"})
            by_group[g] = geo_json(std::string("geo_regions_") + g + ".csv");
        emit("4c", by_group);
    }

    nlohmann::ordered_json manifest;
    manifest["figures"] = figures;
    write_file((rdir / "report_manifest.json").string(), manifest.dump(2) + "\n");

    std::vector<std::string> outputs{"report_manifest.json"};
    for (const auto& [fig, name] : figures) outputs.push_back(name);
    finish_stage("report",
                 {{(adir / "analysis.csv").string(), hex64(hash_file((adir / "analysis.csv").string()))}},
                 outputs);
}

void Pipeline::run_all() {
    run_ingest();
    run_score();
    run_features();
    run_network();
    run_analyze();
    run_report();
}

}  // namespace scicert
