#include "scicert/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "scicert/util.hpp"

namespace scicert {

void AnalysisTable::add(AnalysisRow row) {
    for (const auto& r : rows_) {
        if (r.field == row.field && r.year == row.year && r.metric == row.metric)
            throw PipelineError("duplicate analysis row: " + row.field + "/" +
                                std::to_string(row.year) + "/" + row.metric);
    }
    rows_.push_back(std::move(row));
}

void AnalysisTable::append(const std::vector<AnalysisRow>& rows) {
    for (const auto& r : rows) add(r);
}

std::string AnalysisTable::to_csv() const {
    std::vector<AnalysisRow> sorted = rows_;
    std::sort(sorted.begin(), sorted.end(), [](const AnalysisRow& a, const AnalysisRow& b) {
        return std::tie(a.field, a.year, a.metric) < std::tie(b.field, b.year, b.metric);
    });
    std::ostringstream out;
    out << "field,year,metric,value,p_value,masked,n\n";
    for (const auto& r : sorted) {
        out << r.field << ',' << r.year << ',' << r.metric << ',' << fmt_double(r.value) << ',';
        if (r.p_value) out << fmt_double(*r.p_value);
        out << ',' << (r.masked ? 1 : 0) << ',' << r.n << '\n';
    }
    return out.str();
}

std::vector<AnalysisRow> annual_averages(const Corpus& corpus,
                                         const std::map<std::string, double>& paper_scores,
                                         const std::string& field, int year_start, int year_end,
                                         std::size_t n_floor) {
    if (year_end < year_start) throw PipelineError("annual_averages: empty year range");
    std::map<int, std::vector<double>> by_year;
    for (const auto& p : corpus.papers()) {
        if (p.year < year_start || p.year > year_end) continue;
        auto tags = p.level_tags(0);
        if (std::find(tags.begin(), tags.end(), field) == tags.end()) continue;
        auto it = paper_scores.find(p.paper_id);
        if (it == paper_scores.end()) continue;
        by_year[p.year].push_back(it->second);
    }
    std::vector<AnalysisRow> rows;
    for (const auto& [year, vals] : by_year) {
        double n = static_cast<double>(vals.size());
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= n;
        double sd = 0.0;
        if (vals.size() > 1) {
            for (double v : vals) sd += (v - mean) * (v - mean);
            sd = std::sqrt(sd / (n - 1.0));
        }
        bool low = vals.size() < n_floor;
        rows.push_back({field, year, "certainty_mean", mean, std::nullopt, low, vals.size()});
        rows.push_back({field, year, "certainty_sd", sd, std::nullopt, low, vals.size()});
    }
    return rows;
}

std::vector<AnalysisRow> yearly_correlation(const std::string& field, const std::string& metric_name,
                                            const std::vector<YearObs>& obs, CorrMethod method,
                                            double alpha,
                                            const std::vector<std::string>& control_names) {
    std::map<int, std::vector<const YearObs*>> by_year;
    for (const auto& o : obs) by_year[o.year].push_back(&o);

    std::vector<AnalysisRow> rows;
    for (const auto& [year, group] : by_year) {
        std::size_t k = control_names.size();
        std::size_t need = method == CorrMethod::partial ? k + 3 : 3;
        if (group.size() < need) {
            warn(metric_name + " " + field + " " + std::to_string(year) + ": only " +
                 std::to_string(group.size()) + " observations, row dropped");
            continue;
        }
        std::vector<double> x, y;
        std::vector<std::vector<double>> controls(k);
        for (const auto* o : group) {
            x.push_back(o->metric);
            y.push_back(o->certainty);
            for (std::size_t c = 0; c < k; ++c) controls[c].push_back(o->controls.at(c));
        }
        CorrResult r;
        try {
            r = method == CorrMethod::spearman ? spearman(x, y)
                                               : partial_pearson(x, y, controls, control_names);
        } catch (const std::exception& e) {
            warn(metric_name + " " + field + " " + std::to_string(year) + ": " + e.what());
            continue;
        }
        if (!r.defined) continue;
        AnalysisRow row;
        row.field = field;
        row.year = year;
        row.metric = metric_name;
        row.value = r.coefficient;
        row.p_value = r.p_value;
        row.masked = r.p_value > alpha;
        row.n = r.n;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<TweetComparison> tweet_group_comparison(const Corpus& corpus,
                                                    const std::map<std::string, double>& paper_scores,
                                                    int year,
                                                    const std::vector<std::string>& fields) {
    std::vector<TweetComparison> out;
    for (const auto& field : fields) {
        std::vector<double> tweeted, untweeted;
        for (const auto& p : corpus.papers()) {
            if (p.year != year || !p.tweet_count) continue;
            auto tags = p.level_tags(0);
            if (std::find(tags.begin(), tags.end(), field) == tags.end()) continue;
            auto it = paper_scores.find(p.paper_id);
            if (it == paper_scores.end()) continue;
            (*p.tweet_count > 0 ? tweeted : untweeted).push_back(it->second);
        }
        if (tweeted.empty() || untweeted.empty()) {
            info("tweet comparison skipped for " + field + ": a group is empty");
            continue;
        }
        double mt = 0.0, mu = 0.0;
        for (double v : tweeted) mt += v;
        mt /= static_cast<double>(tweeted.size());
        for (double v : untweeted) mu += v;
        mu /= static_cast<double>(untweeted.size());

        TweetComparison tc;
        tc.field = field;
        tc.pct_certainty_decrease = 100.0 * (mu - mt) / mu;
        tc.n_tweeted = tweeted.size();
        tc.n_untweeted = untweeted.size();
        tc.log10_n_tweeted = std::log10(static_cast<double>(tweeted.size()));
        auto mw = mann_whitney_u(tweeted, untweeted);
        tc.u = mw.u;
        tc.p_value = mw.p_value;
        out.push_back(std::move(tc));
    }
    return out;
}

std::optional<std::string> assign_country(const PaperRecord& paper) {
    if (paper.authors.empty()) return std::nullopt;
    const std::string& first = paper.authors.front().country;
    const std::string& last = paper.authors.back().country;
    if (first.empty() || last.empty()) return std::nullopt;
    if (first != last) return std::nullopt;
    return first;
}

RegionMap RegionMap::load(const std::string& path) {
    RegionMap rm;
    std::size_t lineno = 0;
    for (const auto& line : read_lines(path)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto cols = split(t, ',');
        if (cols.size() != 2)
            throw PipelineError("region map line " + std::to_string(lineno) + ": expected 2 columns");
        if (lineno == 1 && lower(trim(cols[0])) == "country") continue;
        rm.map_[trim(cols[0])] = trim(cols[1]);
    }
    if (rm.map_.empty()) throw PipelineError("region map is empty: " + path);
    return rm;
}

std::string RegionMap::region(const std::string& country) const {
    auto it = map_.find(country);
    if (it == map_.end()) {
        warn("country not in region map, routed to 'unassigned': " + country);
        return "unassigned";
    }
    return it->second;
}

std::vector<std::string> RegionMap::regions() const {
    std::set<std::string> r;
    for (const auto& [c, reg] : map_) r.insert(reg);
    return {r.begin(), r.end()};
}

GeographicSummary geographic_summary(const Corpus& corpus,
                                     const std::map<std::string, double>& paper_scores,
                                     const std::vector<std::string>& fields, std::size_t min_papers,
                                     const RegionMap& regions, int trend_start, int trend_end,
                                     double trend_alpha) {
    // country -> year -> scores
    std::map<std::string, std::map<int, std::vector<double>>> by_country;
    for (const auto& p : corpus.papers()) {
        auto tags = p.level_tags(0);
        bool in_group = std::any_of(fields.begin(), fields.end(), [&](const std::string& f) {
            return std::find(tags.begin(), tags.end(), f) != tags.end();
        });
        if (!in_group) continue;
        auto it = paper_scores.find(p.paper_id);
        if (it == paper_scores.end()) continue;
        auto country = assign_country(p);
        if (!country) continue;
        by_country[*country][p.year].push_back(it->second);
    }

    GeographicSummary out;
    std::map<std::string, std::pair<double, std::size_t>> region_acc;  // sum, n
    for (const auto& [country, years] : by_country) {
        std::size_t n = 0;
        double sum = 0.0;
        for (const auto& [year, vals] : years) {
            n += vals.size();
            for (double v : vals) sum += v;
        }
        if (n < min_papers) continue;
        CountrySummary cs{country, sum / static_cast<double>(n), n};
        out.countries.push_back(cs);
        auto& acc = region_acc[regions.region(country)];
        acc.first += sum;  // paper-count-weighted mean of country means
        acc.second += n;

        // Year trend over the configured window.
        std::vector<double> xs, ys;
        for (const auto& [year, vals] : years) {
            if (year < trend_start || year > trend_end) continue;
            double m = 0.0;
            for (double v : vals) m += v;
            xs.push_back(year);
            ys.push_back(m / static_cast<double>(vals.size()));
        }
        if (xs.size() >= 3) {
            CorrResult r = spearman(xs, ys);
            if (r.defined) {
                AnalysisRow row;
                row.field = country;
                row.year = trend_end;
                row.metric = "certainty_year_trend";
                row.value = r.coefficient;
                row.p_value = r.p_value;
                row.masked = r.p_value > trend_alpha;
                row.n = r.n;
                out.trends.push_back(std::move(row));
            }
        }
    }
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const auto& [region, acc] : region_acc) {
        double mean = acc.first / static_cast<double>(acc.second);
        out.regions.push_back({region, mean, 0.0, acc.second});
        lo = first ? mean : std::min(lo, mean);
        hi = first ? mean : std::max(hi, mean);
        first = false;
    }
    for (auto& r : out.regions)
        r.normalized = hi > lo ? (r.mean_certainty - lo) / (hi - lo) : 0.0;
    return out;
}

}  // namespace scicert
