#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace scicert {

struct HedgeLexicon {
    // Entries stored as token-normalized lowercase phrases.
    std::vector<std::vector<std::string>> entries;
    std::string source;

    static HedgeLexicon from_terms(const std::vector<std::string>& terms,
                                   const std::string& source = "inline");
    // One hedge per line, '#' comments, UTF-8.
    static HedgeLexicon load(const std::string& path);
    bool empty() const { return entries.empty(); }
};

struct CertaintyScore {
    double value = 3.0;   // in [1,3]; 1 = least certain
    std::string scorer;
    double raw = 0.0;     // pre-transfer model output
};

enum class SummaryPolicy { min, mean };

// raw = lexicon matches (longest-match, non-overlapping, whole-token,
// case-insensitive); value = 3 - 2*min(raw, cap)/cap.
CertaintyScore score_sentence_hedge(const std::string& sentence, const HedgeLexicon& lexicon,
                                    int cap = 3);

// Affine map [raw_min, raw_max] -> [1,3]; raw outside the range is clamped
// with a warning, a degenerate range is an error.
double linear_transfer(double raw, double raw_min, double raw_max);

// TSV of (paper_id, sentence_index, raw_score); duplicate key is fatal.
std::map<std::pair<std::string, int>, CertaintyScore> load_external_scores(
    const std::string& path, double raw_min, double raw_max,
    const std::string& scorer_label = "external");

CertaintyScore summarize_paper(const std::vector<CertaintyScore>& scores, SummaryPolicy policy);

struct AnnotationEval {
    std::optional<double> spearman;  // absent when undefined (constant labels)
    double p_value = 1.0;
    std::size_t n = 0;
    std::vector<std::size_t> histogram;  // fixed bins over [1,3]
    double bin_width = 0.0;
};

// Scores vs 1..3 annotation labels; Spearman plus a fixed-bin score-density
// histogram for the distribution plots.
AnnotationEval evaluate_against_annotations(const std::vector<double>& scores,
                                            const std::vector<int>& labels, std::size_t bins = 40);

}  // namespace scicert
