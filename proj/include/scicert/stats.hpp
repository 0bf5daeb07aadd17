#pragma once

#include <string>
#include <vector>

namespace scicert {

struct CorrResult {
    double coefficient = 0.0;  // in [-1, 1]
    double p_value = 1.0;
    std::size_t n = 0;
    std::vector<std::string> controlled_for;
    bool defined = true;  // false when variance vanishes
    bool masked = false;  // set by mask_significance
};

// Average ranks for ties.
std::vector<double> midranks(const std::vector<double>& x);

double pearson(const std::vector<double>& x, const std::vector<double>& y);

// Pearson of mid-ranks; p-value via the t approximation.
CorrResult spearman(const std::vector<double>& x, const std::vector<double>& y);

// Pearson of residuals after least-squares regression of x and y on
// [1, controls]; error names collinear columns.
CorrResult partial_pearson(const std::vector<double>& x, const std::vector<double>& y,
                           const std::vector<std::vector<double>>& controls,
                           const std::vector<std::string>& control_names = {});

struct MannWhitneyResult {
    double u = 0.0;  // U statistic of the first sample, mid-rank convention
    double p_value = 1.0;
    bool exact = false;  // exact permutation distribution used
};

// Exact permutation p when |a|*|b| <= exact_threshold, otherwise normal
// approximation with tie correction.
MannWhitneyResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b,
                                 std::size_t exact_threshold = 400);

// Flags entries masked iff p_value > alpha (p == alpha stays significant).
void mask_significance(std::vector<CorrResult>& series, double alpha);

// Two-sided p helpers; exposed for reuse by the evaluators.
double student_t_two_sided_p(double t, double df);
double normal_two_sided_p(double z);

}  // namespace scicert
