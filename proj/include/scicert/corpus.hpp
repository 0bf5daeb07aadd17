#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace scicert {

struct FieldTag {
    int level = 0;  // 0..5
    std::string tag;
    bool operator==(const FieldTag&) const = default;
    auto operator<=>(const FieldTag&) const = default;
};

struct AuthorRef {
    std::string author_id;
    std::string first_name;  // empty when absent
    std::string country;     // ISO-3166 alpha-2, empty when absent

    // Single letter optionally followed by a period ("C", "C.").
    bool abbreviated_name() const;
    bool has_usable_name() const { return !first_name.empty() && !abbreviated_name(); }
};

enum class SentenceRole { unassigned, conclusion, other };

struct SentenceSpan {
    std::string paper_id;
    int index = 0;  // 0-based, contiguous per abstract
    std::string text;
    SentenceRole role = SentenceRole::unassigned;
};

struct PaperRecord {
    std::string paper_id;
    std::string title;
    std::string abstract;
    int year = 0;  // 1900..2021 accepted
    std::string language;  // optional; empty means "detect"
    std::vector<FieldTag> field_tags;
    std::vector<AuthorRef> authors;  // order carries first/last semantics
    std::optional<double> journal_rank;
    long citation_count = 0;
    std::optional<long> tweet_count;

    std::vector<SentenceSpan> sentences;   // filled by split_sentences
    bool excluded_no_conclusion = false;   // set by tag_conclusions

    std::vector<std::string> level_tags(int level) const;
    // Level-5 tags that have a level-0 ancestor among this record's tags.
    std::vector<std::string> subfield_tags() const;
};

struct IngestStats {
    std::size_t accepted = 0;
    std::size_t skipped = 0;
};

enum class RecordFormat { jsonl, tsv };

class Corpus {
  public:
    void add(PaperRecord rec);  // throws on duplicate paper_id

    const std::vector<PaperRecord>& papers() const { return papers_; }
    std::vector<PaperRecord>& papers() { return papers_; }
    const PaperRecord* find(const std::string& paper_id) const;
    PaperRecord* find(const std::string& paper_id);

    // Paper indices, sorted by paper_id for determinism.
    std::vector<std::size_t> papers_of_author(const std::string& author_id) const;
    std::vector<std::size_t> papers_with_tag(const FieldTag& tag) const;
    std::vector<std::string> level0_fields() const;  // sorted distinct tags

    const IngestStats& ingest_stats() const { return stats_; }
    void set_ingest_stats(IngestStats s) { stats_ = s; }

    // Canonical serialization: one JSON object per line, papers sorted by
    // paper_id, keys in fixed order. Bytewise stable for identical input.
    std::string serialize_jsonl() const;

  private:
    void reindex_last();
    std::vector<PaperRecord> papers_;
    std::unordered_map<std::string, std::size_t> by_id_;
    std::map<std::string, std::vector<std::size_t>> by_author_;
    std::map<FieldTag, std::vector<std::size_t>> by_tag_;
    IngestStats stats_;
};

// Trigram-frequency English heuristic; used when a record has no language
// field. Threshold documented in the implementation.
bool looks_english(const std::string& text);

Corpus ingest(const std::string& path, RecordFormat format);
PaperRecord parse_record_json(const std::string& line);

// Rule-based splitter with an abbreviation exception list, frozen by
// golden-file tests.
std::vector<SentenceSpan> split_sentences(const std::string& paper_id, const std::string& abstract);

class ConclusionTagger {
  public:
    virtual ~ConclusionTagger() = default;
    // Assigns a role to every sentence of the paper.
    virtual void tag(PaperRecord& paper) const = 0;
};

class CuePhraseTagger : public ConclusionTagger {
  public:
    explicit CuePhraseTagger(std::vector<std::string> cues = default_cues(),
                             bool last_sentence_fallback = false);
    void tag(PaperRecord& paper) const override;
    static std::vector<std::string> default_cues();

  private:
    std::vector<std::string> cues_;  // lowercased
    bool fallback_;
};

// Reads (paper_id, sentence_index, role) TSV rows produced by an external
// classifier; a sentence with no row is a fatal error naming the paper.
class FileTagger : public ConclusionTagger {
  public:
    explicit FileTagger(const std::string& path);
    void tag(PaperRecord& paper) const override;

  private:
    std::map<std::pair<std::string, int>, SentenceRole> roles_;
};

// Splits (when needed), assigns roles, and marks papers with zero conclusion
// sentences as excluded from certainty analysis.
void tag_conclusions(Corpus& corpus, const ConclusionTagger& tagger);

// Pairwise Jaccard over paper-id sets of level-0 tags. Entries touching a
// zero-paper field are 0 (with a warning), including that field's diagonal.
std::vector<std::vector<double>> jaccard_overlap(const std::vector<std::string>& fields,
                                                 const Corpus& corpus);

}  // namespace scicert
