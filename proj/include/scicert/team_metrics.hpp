#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scicert/corpus.hpp"

namespace scicert {

struct ResearchBackground {
    std::vector<double> pmf;  // over a shared level-0 field index, sums to 1
    int n_past_papers = 0;
    bool defined = false;     // false when the author has no prior tagged papers
};

struct TeamDispersion {
    double value = 0.0;
    int n_a = 0;        // team size entering the formula
    bool defined = true;  // false when every member lacked a background
};

// Level-0 tag counts over the author's papers strictly before cutoff_year;
// a paper with k level-0 tags contributes 1/k to each.
ResearchBackground build_background(const std::string& author_id, const Corpus& corpus,
                                    int cutoff_year, const std::vector<std::string>& level0_fields);

// exp(-(1/n_a) * sum_i cos_sim(v_i, centroid)); exactly 0 for n_a = 1.
// Members with undefined backgrounds are dropped before the formula.
TeamDispersion interdisciplinarity(const std::vector<ResearchBackground>& team);

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace scicert
