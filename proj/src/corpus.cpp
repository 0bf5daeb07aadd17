#include "scicert/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <json.hpp>
#include <set>

#include "scicert/util.hpp"

namespace scicert {

bool AuthorRef::abbreviated_name() const {
    std::string n = trim(first_name);
    if (n.size() == 1 && std::isalpha(static_cast<unsigned char>(n[0]))) return true;
    if (n.size() == 2 && std::isalpha(static_cast<unsigned char>(n[0])) && n[1] == '.') return true;
    return false;
}

std::vector<std::string> PaperRecord::level_tags(int level) const {
    std::vector<std::string> out;
    for (const auto& ft : field_tags)
        if (ft.level == level) out.push_back(ft.tag);
    return out;
}

std::vector<std::string> PaperRecord::subfield_tags() const {
    // A level-5 tag counts only when a level-0 ancestor is present on the
    // same record.
    if (level_tags(0).empty()) return {};
    return level_tags(5);
}

void Corpus::add(PaperRecord rec) {
    if (by_id_.count(rec.paper_id))
        throw PipelineError("duplicate paper_id: " + rec.paper_id);
    papers_.push_back(std::move(rec));
    reindex_last();
}

void Corpus::reindex_last() {
    std::size_t idx = papers_.size() - 1;
    const PaperRecord& rec = papers_[idx];
    by_id_[rec.paper_id] = idx;
    for (const auto& a : rec.authors) by_author_[a.author_id].push_back(idx);
    for (const auto& t : rec.field_tags) by_tag_[t].push_back(idx);
}

const PaperRecord* Corpus::find(const std::string& paper_id) const {
    auto it = by_id_.find(paper_id);
    return it == by_id_.end() ? nullptr : &papers_[it->second];
}

PaperRecord* Corpus::find(const std::string& paper_id) {
    auto it = by_id_.find(paper_id);
    return it == by_id_.end() ? nullptr : &papers_[it->second];
}

static std::vector<std::size_t> sorted_by_id(const std::vector<PaperRecord>& papers,
                                             std::vector<std::size_t> idx) {
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return papers[a].paper_id < papers[b].paper_id;
    });
    return idx;
}

std::vector<std::size_t> Corpus::papers_of_author(const std::string& author_id) const {
    auto it = by_author_.find(author_id);
    if (it == by_author_.end()) return {};
    return sorted_by_id(papers_, it->second);
}

std::vector<std::size_t> Corpus::papers_with_tag(const FieldTag& tag) const {
    auto it = by_tag_.find(tag);
    if (it == by_tag_.end()) return {};
    return sorted_by_id(papers_, it->second);
}

std::vector<std::string> Corpus::level0_fields() const {
    std::set<std::string> tags;
    for (const auto& p : papers_)
        for (const auto& t : p.field_tags)
            if (t.level == 0) tags.insert(t.tag);
    return {tags.begin(), tags.end()};
}

std::string Corpus::serialize_jsonl() const {
    std::vector<std::size_t> order(papers_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    order = sorted_by_id(papers_, order);

    std::string out;
    for (std::size_t i : order) {
        const PaperRecord& p = papers_[i];
        nlohmann::ordered_json j;
        j["paper_id"] = p.paper_id;
        j["title"] = p.title;
        j["abstract"] = p.abstract;
        j["year"] = p.year;
        if (!p.language.empty()) j["language"] = p.language;
        auto tags = nlohmann::ordered_json::array();
        for (const auto& t : p.field_tags) tags.push_back({{"level", t.level}, {"tag", t.tag}});
        j["field_tags"] = tags;
        auto authors = nlohmann::ordered_json::array();
        for (const auto& a : p.authors) {
            nlohmann::ordered_json ja;
            ja["author_id"] = a.author_id;
            if (!a.first_name.empty()) ja["first_name"] = a.first_name;
            if (!a.country.empty()) ja["country"] = a.country;
            authors.push_back(ja);
        }
        j["authors"] = authors;
        if (p.journal_rank) j["journal_rank"] = *p.journal_rank;
        j["citation_count"] = p.citation_count;
        if (p.tweet_count) j["tweet_count"] = *p.tweet_count;
        out += j.dump();
        out += '\n';
    }
    return out;
}

// --- English heuristic -----------------------------------------------------

bool looks_english(const std::string& text) {
    // Frequent English character trigrams; a text qualifies when at least
    // 2.5% of its trigram positions hit the list. Frozen by tests.
    static const std::set<std::string> kTrigrams = {
        "the", "and", "ing", "ion", "tio", "ent", "ati", "for", "her", "ter",
        "hat", "tha", "ere", "ate", "his", "con", "res", "ver", "all", "ons",
        "nce", "men", "ith", "ted", "ers", "pro", "thi", "wit", "are", "ess",
        "not", "ive", "was", "ect", "rea", "com", "eve", "per", "int", "est",
        "sta", "our", "whi", "ich", "ult", "sho", "ose", "hes", "ear", "ous",
    };
    std::string t = lower(text);
    if (t.size() < 3) return false;
    std::size_t hits = 0, positions = t.size() - 2;
    for (std::size_t i = 0; i + 3 <= t.size(); ++i) {
        if (kTrigrams.count(t.substr(i, 3))) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(positions) >= 0.025;
}

// --- Record parsing --------------------------------------------------------

PaperRecord parse_record_json(const std::string& line) {
    nlohmann::json j = nlohmann::json::parse(line);
    PaperRecord p;
    p.paper_id = j.at("paper_id").get<std::string>();
    p.title = j.value("title", std::string());
    p.abstract = j.value("abstract", std::string());
    p.year = j.at("year").get<int>();
    p.language = j.value("language", std::string());
    if (j.contains("field_tags")) {
        for (const auto& t : j.at("field_tags")) {
            p.field_tags.push_back({t.at("level").get<int>(), t.at("tag").get<std::string>()});
        }
    }
    if (j.contains("authors")) {
        for (const auto& a : j.at("authors")) {
            AuthorRef ar;
            ar.author_id = a.at("author_id").get<std::string>();
            ar.first_name = a.value("first_name", std::string());
            ar.country = a.value("country", std::string());
            p.authors.push_back(ar);
        }
    }
    if (j.contains("journal_rank")) p.journal_rank = j.at("journal_rank").get<double>();
    p.citation_count = j.value("citation_count", 0L);
    if (j.contains("tweet_count")) p.tweet_count = j.at("tweet_count").get<long>();
    return p;
}

// TSV layout (documented in the README): paper_id, title, abstract, year,
// language, field_tags "level:tag;...", authors "id:first:country|...",
// journal_rank, citation_count, tweet_count. Empty cell = absent.
static PaperRecord parse_record_tsv(const std::string& line) {
    auto cols = split(line, '\t');
    if (cols.size() != 10) throw PipelineError("expected 10 TSV columns, got " + std::to_string(cols.size()));
    PaperRecord p;
    p.paper_id = cols[0];
    p.title = cols[1];
    p.abstract = cols[2];
    auto year = parse_long(cols[3]);
    if (!year) throw PipelineError("bad year: " + cols[3]);
    p.year = static_cast<int>(*year);
    p.language = cols[4];
    if (!cols[5].empty()) {
        for (const auto& part : split(cols[5], ';')) {
            auto lv = split(part, ':');
            if (lv.size() != 2) throw PipelineError("bad field tag: " + part);
            auto level = parse_long(lv[0]);
            if (!level) throw PipelineError("bad field tag level: " + part);
            p.field_tags.push_back({static_cast<int>(*level), lv[1]});
        }
    }
    if (!cols[6].empty()) {
        for (const auto& part : split(cols[6], '|')) {
            auto f = split(part, ':');
            if (f.empty() || f.size() > 3) throw PipelineError("bad author: " + part);
            AuthorRef a;
            a.author_id = f[0];
            if (f.size() > 1) a.first_name = f[1];
            if (f.size() > 2) a.country = f[2];
            p.authors.push_back(a);
        }
    }
    if (!cols[7].empty()) {
        auto r = parse_double(cols[7]);
        if (!r) throw PipelineError("bad journal_rank: " + cols[7]);
        p.journal_rank = *r;
    }
    if (!cols[8].empty()) {
        auto c = parse_long(cols[8]);
        if (!c) throw PipelineError("bad citation_count: " + cols[8]);
        p.citation_count = *c;
    }
    if (!cols[9].empty()) {
        auto t = parse_long(cols[9]);
        if (!t) throw PipelineError("bad tweet_count: " + cols[9]);
        p.tweet_count = *t;
    }
    return p;
}

// Returns empty when the record must be skipped; reason goes to the warning.
static bool validate_record(const PaperRecord& p, std::string& reason) {
    if (p.paper_id.empty()) { reason = "missing paper_id"; return false; }
    if (trim(p.abstract).empty()) { reason = "missing abstract"; return false; }
    if (p.year < 1900 || p.year > 2021) { reason = "year out of range: " + std::to_string(p.year); return false; }
    if (!p.language.empty()) {
        if (lower(p.language) != "en") { reason = "non-English language field: " + p.language; return false; }
    } else if (!looks_english(p.abstract)) {
        reason = "abstract failed English heuristic";
        return false;
    }
    if (p.journal_rank && *p.journal_rank < 0) { reason = "negative journal_rank"; return false; }
    if (p.citation_count < 0) { reason = "negative citation_count"; return false; }
    if (p.tweet_count && *p.tweet_count < 0) { reason = "negative tweet_count"; return false; }
    return true;
}

Corpus ingest(const std::string& path, RecordFormat format) {
    std::ifstream in(path);
    if (!in) throw PipelineError("cannot open record file: " + path);
    Corpus corpus;
    IngestStats stats;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        PaperRecord rec;
        try {
            rec = (format == RecordFormat::jsonl) ? parse_record_json(line) : parse_record_tsv(line);
        } catch (const std::exception& e) {
            warn("line " + std::to_string(lineno) + ": malformed record: " + e.what());
            ++stats.skipped;
            continue;
        }
        std::string reason;
        if (!validate_record(rec, reason)) {
            warn("line " + std::to_string(lineno) + ": skipped (" + reason + ")");
            ++stats.skipped;
            continue;
        }
        if (corpus.find(rec.paper_id)) {
            warn("line " + std::to_string(lineno) + ": duplicate paper_id " + rec.paper_id + ", skipped");
            ++stats.skipped;
            continue;
        }
        corpus.add(std::move(rec));
        ++stats.accepted;
    }
    corpus.set_ingest_stats(stats);
    info("ingested " + std::to_string(stats.accepted) + " records, skipped " +
         std::to_string(stats.skipped));
    return corpus;
}

// --- Sentence splitting ----------------------------------------------------

static const std::set<std::string>& abbreviations() {
    static const std::set<std::string> kAbbrev = {
        "e.g", "i.e", "etc", "cf",  "vs",  "al",   "fig",  "figs", "eq",  "eqs",
        "dr",  "mr",  "mrs", "ms",  "prof", "st",  "no",   "ca",   "approx",
        "resp", "ref", "refs", "sec", "secs", "vol", "chap", "dept",
    };
    return kAbbrev;
}

static bool is_boundary(const std::string& s, std::size_t i) {
    char c = s[i];
    if (c == '!' || c == '?') {
        return i + 1 == s.size() || std::isspace(static_cast<unsigned char>(s[i + 1]));
    }
    if (c != '.') return false;
    if (i + 1 < s.size() && s[i + 1] == '.') return false;  // ellipsis
    // Token ending at the period, dots included ("e.g.").
    std::size_t b = i;
    while (b > 0) {
        char pc = s[b - 1];
        if (std::isalpha(static_cast<unsigned char>(pc)) || pc == '.') --b; else break;
    }
    std::string tok = s.substr(b, i - b);
    while (!tok.empty() && tok.back() == '.') tok.pop_back();
    std::string key = lower(tok);
    if (abbreviations().count(key)) return false;
    if (key.size() == 1 && std::islower(static_cast<unsigned char>(tok[0]))) return false;
    // Next printable character decides: lowercase continuation is no boundary.
    std::size_t n = i + 1;
    while (n < s.size() && std::isspace(static_cast<unsigned char>(s[n]))) ++n;
    if (n == s.size()) return true;
    if (n == i + 1) return false;  // no whitespace after the period (e.g. "3.14")
    char nc = s[n];
    return std::isupper(static_cast<unsigned char>(nc)) ||
           std::isdigit(static_cast<unsigned char>(nc)) || nc == '(' || nc == '"';
}

std::vector<SentenceSpan> split_sentences(const std::string& paper_id, const std::string& abstract) {
    std::vector<SentenceSpan> spans;
    std::size_t start = 0;
    auto flush = [&](std::size_t end) {
        std::string text = trim(abstract.substr(start, end - start));
        if (!text.empty()) {
            SentenceSpan sp;
            sp.paper_id = paper_id;
            sp.index = static_cast<int>(spans.size());
            sp.text = text;
            spans.push_back(std::move(sp));
        }
        start = end;
    };
    for (std::size_t i = 0; i < abstract.size(); ++i) {
        if (is_boundary(abstract, i)) flush(i + 1);
    }
    flush(abstract.size());
    return spans;
}

// --- Conclusion tagging ----------------------------------------------------

std::vector<std::string> CuePhraseTagger::default_cues() {
    return {"in conclusion", "we conclude", "our results show", "these findings suggest",
            "taken together"};
}

CuePhraseTagger::CuePhraseTagger(std::vector<std::string> cues, bool last_sentence_fallback)
    : fallback_(last_sentence_fallback) {
    for (auto& c : cues) cues_.push_back(lower(c));
}

void CuePhraseTagger::tag(PaperRecord& paper) const {
    bool any = false;
    for (auto& s : paper.sentences) {
        std::string low = lower(s.text);
        bool hit = std::any_of(cues_.begin(), cues_.end(),
                               [&](const std::string& c) { return low.find(c) != std::string::npos; });
        s.role = hit ? SentenceRole::conclusion : SentenceRole::other;
        any = any || hit;
    }
    if (!any && fallback_ && !paper.sentences.empty()) {
        paper.sentences.back().role = SentenceRole::conclusion;
    }
}

FileTagger::FileTagger(const std::string& path) {
    auto lines = read_lines(path);
    std::size_t lineno = 0;
    for (const auto& line : lines) {
        ++lineno;
        if (trim(line).empty() || line[0] == '#') continue;
        auto cols = split(line, '\t');
        if (cols.size() != 3)
            throw PipelineError("tagger file line " + std::to_string(lineno) + ": expected 3 columns");
        auto idx = parse_long(cols[1]);
        if (!idx) throw PipelineError("tagger file line " + std::to_string(lineno) + ": bad index");
        SentenceRole role;
        std::string r = lower(trim(cols[2]));
        if (r == "conclusion") role = SentenceRole::conclusion;
        else if (r == "other") role = SentenceRole::other;
        else throw PipelineError("tagger file line " + std::to_string(lineno) + ": unknown role " + cols[2]);
        auto key = std::make_pair(cols[0], static_cast<int>(*idx));
        if (roles_.count(key))
            throw PipelineError("tagger file: duplicate key " + cols[0] + "/" + cols[1]);
        roles_[key] = role;
    }
}

void FileTagger::tag(PaperRecord& paper) const {
    for (auto& s : paper.sentences) {
        auto it = roles_.find({paper.paper_id, s.index});
        if (it == roles_.end())
            throw PipelineError("external tagger missing sentence " + std::to_string(s.index) +
                                " of paper " + paper.paper_id);
        s.role = it->second;
    }
}

void tag_conclusions(Corpus& corpus, const ConclusionTagger& tagger) {
    for (auto& p : corpus.papers()) {
        if (p.sentences.empty()) p.sentences = split_sentences(p.paper_id, p.abstract);
        tagger.tag(p);
        bool any = std::any_of(p.sentences.begin(), p.sentences.end(),
                               [](const SentenceSpan& s) { return s.role == SentenceRole::conclusion; });
        p.excluded_no_conclusion = !any;
    }
}

// --- Jaccard overlap -------------------------------------------------------

std::vector<std::vector<double>> jaccard_overlap(const std::vector<std::string>& fields,
                                                 const Corpus& corpus) {
    if (fields.size() < 2) throw PipelineError("jaccard_overlap needs at least 2 fields");
    std::vector<std::set<std::string>> sets;
    for (const auto& f : fields) {
        std::set<std::string> ids;
        for (std::size_t i : corpus.papers_with_tag({0, f})) ids.insert(corpus.papers()[i].paper_id);
        if (ids.empty()) warn("field has zero papers: " + f);
        sets.push_back(std::move(ids));
    }
    std::size_t n = fields.size();
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            if (sets[i].empty() || sets[j].empty()) continue;  // defined as 0
            std::vector<std::string> inter;
            std::set_intersection(sets[i].begin(), sets[i].end(), sets[j].begin(), sets[j].end(),
                                  std::back_inserter(inter));
            std::size_t uni = sets[i].size() + sets[j].size() - inter.size();
            double v = uni == 0 ? 0.0 : static_cast<double>(inter.size()) / static_cast<double>(uni);
            m[i][j] = m[j][i] = v;
        }
    }
    return m;
}

}  // namespace scicert
