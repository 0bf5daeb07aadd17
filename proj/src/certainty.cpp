#include "scicert/certainty.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "scicert/stats.hpp"
#include "scicert/util.hpp"

namespace scicert {

HedgeLexicon HedgeLexicon::from_terms(const std::vector<std::string>& terms,
                                      const std::string& source) {
    HedgeLexicon lex;
    lex.source = source;
    std::set<std::vector<std::string>> seen;
    for (const auto& t : terms) {
        auto toks = tokenize_words(t);
        if (toks.empty()) continue;
        if (seen.insert(toks).second) lex.entries.push_back(toks);
    }
    if (lex.entries.empty()) throw PipelineError("hedge lexicon is empty: " + source);
    // Longer phrases first so longest-match wins.
    std::stable_sort(lex.entries.begin(), lex.entries.end(),
                     [](const auto& a, const auto& b) { return a.size() > b.size(); });
    return lex;
}

HedgeLexicon HedgeLexicon::load(const std::string& path) {
    std::vector<std::string> terms;
    for (const auto& line : read_lines(path)) {
        std::string t = trim(line);
        auto hash = t.find('#');
        if (hash != std::string::npos) t = trim(t.substr(0, hash));
        if (!t.empty()) terms.push_back(t);
    }
    return from_terms(terms, path);
}

CertaintyScore score_sentence_hedge(const std::string& sentence, const HedgeLexicon& lexicon,
                                    int cap) {
    if (lexicon.empty()) throw PipelineError("empty hedge lexicon");
    if (cap < 1) throw PipelineError("hedge cap must be >= 1");
    auto toks = tokenize_words(sentence);
    int matches = 0;
    std::size_t i = 0;
    while (i < toks.size()) {
        std::size_t advance = 1;
        for (const auto& phrase : lexicon.entries) {  // sorted longest-first
            if (phrase.size() > toks.size() - i) continue;
            if (std::equal(phrase.begin(), phrase.end(), toks.begin() + static_cast<long>(i))) {
                ++matches;
                advance = phrase.size();
                break;
            }
        }
        i += advance;
    }
    CertaintyScore s;
    s.raw = matches;
    s.value = 3.0 - 2.0 * static_cast<double>(std::min(matches, cap)) / static_cast<double>(cap);
    s.scorer = "hedge";
    return s;
}

double linear_transfer(double raw, double raw_min, double raw_max) {
    if (!(raw_max > raw_min)) throw PipelineError("degenerate raw range for linear transfer");
    if (raw < raw_min || raw > raw_max) {
        warn("raw score " + fmt_double(raw) + " outside [" + fmt_double(raw_min) + ", " +
             fmt_double(raw_max) + "], clamped");
        raw = std::clamp(raw, raw_min, raw_max);
    }
    return 1.0 + 2.0 * (raw - raw_min) / (raw_max - raw_min);
}

std::map<std::pair<std::string, int>, CertaintyScore> load_external_scores(
    const std::string& path, double raw_min, double raw_max, const std::string& scorer_label) {
    std::map<std::pair<std::string, int>, CertaintyScore> out;
    std::size_t lineno = 0;
    for (const auto& line : read_lines(path)) {
        ++lineno;
        if (trim(line).empty() || line[0] == '#') continue;
        auto cols = split(line, '\t');
        if (cols.size() != 3)
            throw PipelineError("score file line " + std::to_string(lineno) + ": expected 3 columns");
        auto idx = parse_long(cols[1]);
        if (!idx) throw PipelineError("score file line " + std::to_string(lineno) + ": bad index");
        auto raw = parse_double(cols[2]);
        if (!raw)
            throw PipelineError("score file line " + std::to_string(lineno) + ": non-numeric score '" +
                                cols[2] + "'");
        auto key = std::make_pair(cols[0], static_cast<int>(*idx));
        if (out.count(key))
            throw PipelineError("score file: duplicate key " + cols[0] + "/" + cols[1]);
        CertaintyScore s;
        s.raw = *raw;
        s.value = linear_transfer(*raw, raw_min, raw_max);
        s.scorer = scorer_label;
        out[key] = s;
    }
    return out;
}

CertaintyScore summarize_paper(const std::vector<CertaintyScore>& scores, SummaryPolicy policy) {
    if (scores.empty())
        throw PipelineError("summarize_paper on empty score set (exclusion contract violated)");
    CertaintyScore out;
    out.scorer = scores.front().scorer + (policy == SummaryPolicy::min ? "/min" : "/mean");
    if (policy == SummaryPolicy::min) {
        out.value = std::min_element(scores.begin(), scores.end(),
                                     [](const CertaintyScore& a, const CertaintyScore& b) {
                                         return a.value < b.value;
                                     })
                        ->value;
    } else {
        double sum = std::accumulate(scores.begin(), scores.end(), 0.0,
                                     [](double acc, const CertaintyScore& s) { return acc + s.value; });
        out.value = sum / static_cast<double>(scores.size());
    }
    out.raw = out.value;
    return out;
}

AnnotationEval evaluate_against_annotations(const std::vector<double>& scores,
                                            const std::vector<int>& labels, std::size_t bins) {
    if (scores.size() != labels.size()) throw PipelineError("scores/labels length mismatch");
    if (scores.size() < 3) throw PipelineError("need at least 3 annotated sentences");
    for (int l : labels)
        if (l < 1 || l > 3) throw PipelineError("annotation label out of {1,2,3}: " + std::to_string(l));

    AnnotationEval ev;
    ev.n = scores.size();
    ev.histogram.assign(bins, 0);
    ev.bin_width = 2.0 / static_cast<double>(bins);
    for (double s : scores) {
        auto b = static_cast<std::size_t>((s - 1.0) / ev.bin_width);
        if (b >= bins) b = bins - 1;
        ++ev.histogram[b];
    }

    std::vector<double> y(labels.begin(), labels.end());
    bool const_labels = std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; });
    bool const_scores =
        std::all_of(scores.begin(), scores.end(), [&](double v) { return v == scores[0]; });
    if (const_labels || const_scores) {
        warn("annotation correlation undefined: constant series");
        return ev;
    }
    CorrResult r = spearman(scores, y);
    ev.spearman = r.coefficient;
    ev.p_value = r.p_value;
    return ev;
}

}  // namespace scicert
