#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scicert/corpus.hpp"
#include "scicert/stats.hpp"

namespace scicert {

struct AnalysisRow {
    std::string field;  // level-0 tag (or country/region key for geo tables)
    int year = 0;
    std::string metric;
    double value = 0.0;
    std::optional<double> p_value;
    bool masked = false;  // significance mask, or below-floor flag for averages
    std::size_t n = 0;
};

class AnalysisTable {
  public:
    void add(AnalysisRow row);  // (field, year, metric) must be unique
    void append(const std::vector<AnalysisRow>& rows);
    const std::vector<AnalysisRow>& rows() const { return rows_; }
    // Canonically sorted CSV: field,year,metric,value,p_value,masked,n
    std::string to_csv() const;

  private:
    std::vector<AnalysisRow> rows_;
};

// Per-year mean and sample (n-1) standard deviation of paper-level certainty
// for one level-0 field; years with zero papers are absent, years under the
// floor are flagged via `masked`.
std::vector<AnalysisRow> annual_averages(const Corpus& corpus,
                                         const std::map<std::string, double>& paper_scores,
                                         const std::string& field, int year_start, int year_end,
                                         std::size_t n_floor = 1);

enum class CorrMethod { spearman, partial };

struct YearObs {
    int year = 0;
    double metric = 0.0;
    double certainty = 0.0;
    std::vector<double> controls;
};

// One correlation per year; years with n < 3 are dropped with a warning.
std::vector<AnalysisRow> yearly_correlation(const std::string& field, const std::string& metric_name,
                                            const std::vector<YearObs>& obs, CorrMethod method,
                                            double alpha,
                                            const std::vector<std::string>& control_names = {});

struct TweetComparison {
    std::string field;
    double pct_certainty_decrease = 0.0;  // vs the non-tweeted group mean
    std::size_t n_tweeted = 0;
    std::size_t n_untweeted = 0;
    double log10_n_tweeted = 0.0;
    double u = 0.0;
    double p_value = 1.0;
};

// Tweeted vs non-tweeted split for papers of one year, per level-0 field;
// fields with an empty group are skipped with a note.
std::vector<TweetComparison> tweet_group_comparison(const Corpus& corpus,
                                                    const std::map<std::string, double>& paper_scores,
                                                    int year,
                                                    const std::vector<std::string>& fields);

// First/last-author country rule; mismatch or missing data excludes the paper.
std::optional<std::string> assign_country(const PaperRecord& paper);

class RegionMap {
  public:
    static RegionMap load(const std::string& path);  // CSV country,region
    // Unmapped countries go to "unassigned" with a warning.
    std::string region(const std::string& country) const;
    std::vector<std::string> regions() const;

  private:
    std::map<std::string, std::string> map_;
};

struct CountrySummary {
    std::string country;
    double mean_certainty = 0.0;
    std::size_t n = 0;
};

struct RegionSummary {
    std::string region;
    double mean_certainty = 0.0;   // paper-count-weighted mean of country means
    double normalized = 0.0;       // min-max over regions of this summary
    std::size_t n = 0;
};

struct GeographicSummary {
    std::vector<CountrySummary> countries;  // under-floor countries omitted
    std::vector<RegionSummary> regions;
    std::vector<AnalysisRow> trends;  // per-country year-trend Spearman, masked at alpha
};

// `fields`: papers tagged with any of the listed level-0 fields enter the
// summary (a discipline group, or a single field).
GeographicSummary geographic_summary(const Corpus& corpus,
                                     const std::map<std::string, double>& paper_scores,
                                     const std::vector<std::string>& fields, std::size_t min_papers,
                                     const RegionMap& regions, int trend_start, int trend_end,
                                     double trend_alpha);

}  // namespace scicert
