#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "scicert/corpus.hpp"

namespace scicert {

struct CoauthorGraph {
    std::string subfield;  // level-5 tag
    int window_start = 0;  // [t-10, t-1] inclusive
    int window_end = 0;
    std::set<std::string> members;    // M: authors of window papers in the subfield
    std::set<std::string> externals;  // N: their coauthors outside M
    // Undirected edges keyed by ordered id pair; weight = distinct coauthored papers.
    std::map<std::pair<std::string, std::string>, int> edges;
    bool sparse = false;  // |M| below the node floor

    int edge_weight(const std::string& a, const std::string& b) const;
    // Weighted degree over member-internal edges only.
    std::map<std::string, double> member_degrees() const;
    std::string export_edge_list() const;  // TSV with membership flags
};

struct LorenzCurve {
    // (cumulative population fraction, cumulative degree fraction), from (0,0) to (1,1).
    std::vector<std::pair<double, double>> points;
    double area_under() const;  // trapezoid rule
};

CoauthorGraph build_graph(const Corpus& corpus, const std::string& subfield, int year,
                          int min_nodes = 50);

LorenzCurve lorenz_curve(std::vector<double> degrees);

// 1 - 2 * area under the Lorenz curve of the sorted member degree sequence;
// all-zero degrees give 0 with a warning.
double gini_centrality(const CoauthorGraph& graph);
double gini_from_degrees(std::vector<double> degrees);

enum class EchoChamberMode { node_ratio, edge_ratio };

// node_ratio: |M| / (|M| + |N|); edge_ratio: weight of boundary edges over
// total weight incident to M.
double echo_chamber(const CoauthorGraph& graph, EchoChamberMode mode = EchoChamberMode::node_ratio);

}  // namespace scicert
