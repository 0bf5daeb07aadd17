#include "scicert/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "scicert/util.hpp"

namespace scicert {

int CoauthorGraph::edge_weight(const std::string& a, const std::string& b) const {
    auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    auto it = edges.find(key);
    return it == edges.end() ? 0 : it->second;
}

std::map<std::string, double> CoauthorGraph::member_degrees() const {
    std::map<std::string, double> deg;
    for (const auto& m : members) deg[m] = 0.0;
    for (const auto& [key, w] : edges) {
        if (members.count(key.first) && members.count(key.second)) {
            deg[key.first] += w;
            deg[key.second] += w;
        }
    }
    return deg;
}

std::string CoauthorGraph::export_edge_list() const {
    std::ostringstream out;
    out << "author_a\tauthor_b\tweight\ta_member\tb_member\n";
    for (const auto& [key, w] : edges) {
        out << key.first << '\t' << key.second << '\t' << w << '\t'
            << (members.count(key.first) ? 1 : 0) << '\t' << (members.count(key.second) ? 1 : 0)
            << '\n';
    }
    return out.str();
}

namespace {

std::size_t levenshtein(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    std::iota(prev.begin(), prev.end(), std::size_t{0});
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

}  // namespace

CoauthorGraph build_graph(const Corpus& corpus, const std::string& subfield, int year,
                          int min_nodes) {
    CoauthorGraph g;
    g.subfield = subfield;
    g.window_start = year - 10;
    g.window_end = year - 1;

    std::set<std::string> known;
    for (const auto& p : corpus.papers())
        for (const auto& t : p.subfield_tags()) known.insert(t);
    if (!known.count(subfield)) {
        std::vector<std::pair<std::size_t, std::string>> ranked;
        for (const auto& t : known) ranked.emplace_back(levenshtein(subfield, t), t);
        std::sort(ranked.begin(), ranked.end());
        std::string hint;
        for (std::size_t i = 0; i < std::min<std::size_t>(3, ranked.size()); ++i)
            hint += (i ? ", " : "") + ranked[i].second;
        throw PipelineError("unknown subfield tag '" + subfield +
                            (hint.empty() ? "'" : "'; nearest known tags: " + hint));
    }

    // Member set from subfield papers inside the window.
    std::vector<const PaperRecord*> window_papers;
    for (const auto& p : corpus.papers()) {
        if (p.year < g.window_start || p.year > g.window_end) continue;
        window_papers.push_back(&p);
        auto subs = p.subfield_tags();
        if (std::find(subs.begin(), subs.end(), subfield) != subs.end())
            for (const auto& a : p.authors) g.members.insert(a.author_id);
    }
    // Edges from any window paper touching a member; weights count distinct papers.
    for (const auto* p : window_papers) {
        bool touches = std::any_of(p->authors.begin(), p->authors.end(), [&](const AuthorRef& a) {
            return g.members.count(a.author_id) > 0;
        });
        if (!touches) continue;
        std::set<std::string> ids;
        for (const auto& a : p->authors) ids.insert(a.author_id);
        for (auto it = ids.begin(); it != ids.end(); ++it) {
            for (auto jt = std::next(it); jt != ids.end(); ++jt) {
                if (!g.members.count(*it) && !g.members.count(*jt)) continue;
                g.edges[{*it, *jt}] += 1;
            }
        }
    }
    for (const auto& [key, w] : g.edges) {
        if (!g.members.count(key.first)) g.externals.insert(key.first);
        if (!g.members.count(key.second)) g.externals.insert(key.second);
    }
    g.sparse = static_cast<int>(g.members.size()) < min_nodes;
    return g;
}

LorenzCurve lorenz_curve(std::vector<double> degrees) {
    std::sort(degrees.begin(), degrees.end());
    double total = std::accumulate(degrees.begin(), degrees.end(), 0.0);
    LorenzCurve lc;
    lc.points.emplace_back(0.0, 0.0);
    double n = static_cast<double>(degrees.size());
    double cum = 0.0;
    for (std::size_t i = 0; i < degrees.size(); ++i) {
        cum += degrees[i];
        lc.points.emplace_back(static_cast<double>(i + 1) / n, total > 0.0 ? cum / total : 0.0);
    }
    return lc;
}

double LorenzCurve::area_under() const {
    double area = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        area += (points[i].first - points[i - 1].first) *
                (points[i].second + points[i - 1].second) / 2.0;
    }
    return area;
}

double gini_from_degrees(std::vector<double> degrees) {
    if (degrees.size() < 2) throw PipelineError("gini needs at least 2 nodes");
    double total = std::accumulate(degrees.begin(), degrees.end(), 0.0);
    if (total <= 0.0) {
        warn("gini on all-zero degrees, defined as 0");
        return 0.0;
    }
    return 1.0 - 2.0 * lorenz_curve(std::move(degrees)).area_under();
}

double gini_centrality(const CoauthorGraph& graph) {
    auto deg = graph.member_degrees();
    if (deg.size() < 2) throw PipelineError("gini_centrality needs at least 2 member nodes");
    std::vector<double> degrees;
    for (const auto& [id, d] : deg) degrees.push_back(d);
    return gini_from_degrees(std::move(degrees));
}

double echo_chamber(const CoauthorGraph& graph, EchoChamberMode mode) {
    if (graph.members.empty()) throw PipelineError("echo_chamber on empty member set");
    if (mode == EchoChamberMode::node_ratio) {
        return static_cast<double>(graph.members.size()) /
               static_cast<double>(graph.members.size() + graph.externals.size());
    }
    // edge_ratio: boundary weight over total weight incident to M.
    double boundary = 0.0, incident = 0.0;
    for (const auto& [key, w] : graph.edges) {
        bool am = graph.members.count(key.first) > 0, bm = graph.members.count(key.second) > 0;
        if (!am && !bm) continue;
        incident += w;
        if (am != bm) boundary += w;
    }
    if (incident == 0.0) return 0.0;
    return boundary / incident;
}

}  // namespace scicert
