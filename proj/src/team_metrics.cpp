#include "scicert/team_metrics.hpp"

#include <algorithm>
#include <cmath>

#include "scicert/util.hpp"

namespace scicert {

ResearchBackground build_background(const std::string& author_id, const Corpus& corpus,
                                    int cutoff_year, const std::vector<std::string>& level0_fields) {
    ResearchBackground bg;
    bg.pmf.assign(level0_fields.size(), 0.0);
    double mass = 0.0;
    for (std::size_t idx : corpus.papers_of_author(author_id)) {
        const PaperRecord& p = corpus.papers()[idx];
        if (p.year >= cutoff_year) continue;  // strictly prior work only
        auto tags = p.level_tags(0);
        if (tags.empty()) continue;
        double frac = 1.0 / static_cast<double>(tags.size());
        bool counted = false;
        for (const auto& t : tags) {
            auto it = std::find(level0_fields.begin(), level0_fields.end(), t);
            if (it == level0_fields.end()) continue;
            bg.pmf[static_cast<std::size_t>(it - level0_fields.begin())] += frac;
            mass += frac;
            counted = true;
        }
        if (counted) ++bg.n_past_papers;
    }
    if (mass <= 0.0) {
        bg.defined = false;
        return bg;
    }
    for (double& v : bg.pmf) v /= mass;
    bg.defined = true;
    return bg;
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw PipelineError("cosine_similarity: dimension mismatch");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) throw PipelineError("cosine_similarity: zero vector");
    return dot / std::sqrt(na * nb);
}

TeamDispersion interdisciplinarity(const std::vector<ResearchBackground>& team) {
    if (team.empty()) throw PipelineError("interdisciplinarity: empty team");
    std::vector<const ResearchBackground*> valid;
    for (const auto& m : team)
        if (m.defined) valid.push_back(&m);

    TeamDispersion d;
    if (valid.empty()) {
        d.defined = false;
        return d;
    }
    d.n_a = static_cast<int>(valid.size());
    if (d.n_a == 1) {
        d.value = 0.0;  // zero by definition for a single author
        return d;
    }
    std::size_t dim = valid.front()->pmf.size();
    std::vector<double> centroid(dim, 0.0);
    for (const auto* m : valid) {
        if (m->pmf.size() != dim) throw PipelineError("interdisciplinarity: PMF dimension mismatch");
        for (std::size_t i = 0; i < dim; ++i) centroid[i] += m->pmf[i];
    }
    for (double& v : centroid) v /= static_cast<double>(d.n_a);
    double sum = 0.0;
    for (const auto* m : valid) sum += cosine_similarity(m->pmf, centroid);
    d.value = std::exp(-sum / static_cast<double>(d.n_a));
    return d;
}

}  // namespace scicert
