#pragma once

#include <cctype>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "heatlab/format.hpp"
#include "heatlab/graph.hpp"

namespace heatlab {

/// Line-oriented text format:
///   graph v1
///   # comment
///   v <id> [<m>]          measure defaults to 1.0
///   e <id> <id> <w>
/// Vertex ids must be the dense range 0..n-1. Duplicate v or e lines are
/// rejected; connectivity and positivity are validated by WeightedGraph.
inline WeightedGraph load_graph(std::istream& in) {
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    std::map<VertexId, double> measures;
    std::vector<Edge> edges;
    std::map<std::pair<VertexId, VertexId>, bool> edge_seen;

    auto fail = [&](ErrorKind kind, const std::string& what) {
        raise(kind, "line " + std::to_string(lineno) + ": " + what);
    };

    while (std::getline(in, line)) {
        ++lineno;
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos) continue;
        if (line[start] == '#') continue;
        std::istringstream ls(line);
        if (!header_seen) {
            std::string word, version;
            ls >> word >> version;
            if (word != "graph" || version != "v1")
                fail(ErrorKind::parse_error, "expected header 'graph v1'");
            header_seen = true;
            continue;
        }
        std::string tag;
        ls >> tag;
        if (tag == "v") {
            long long id = -1;
            if (!(ls >> id) || id < 0) fail(ErrorKind::parse_error, "bad vertex id");
            double m = 1.0;
            if (ls >> m) {
                std::string rest;
                if (ls >> rest) fail(ErrorKind::parse_error, "trailing tokens on v line");
            } else if (!ls.eof()) {
                fail(ErrorKind::parse_error, "bad vertex measure");
            }
            if (!(m > 0.0)) fail(ErrorKind::nonpositive_weight, "vertex measure must be positive");
            VertexId vid = static_cast<VertexId>(id);
            if (measures.count(vid))
                fail(ErrorKind::parse_error, "duplicate vertex " + std::to_string(vid));
            measures[vid] = m;
        } else if (tag == "e") {
            long long a = -1, b = -1;
            double w = 0.0;
            if (!(ls >> a >> b >> w)) fail(ErrorKind::parse_error, "expected 'e <id> <id> <w>'");
            std::string rest;
            if (ls >> rest) fail(ErrorKind::parse_error, "trailing tokens on e line");
            if (a < 0 || b < 0) fail(ErrorKind::parse_error, "bad edge endpoint");
            VertexId u = static_cast<VertexId>(a);
            VertexId v = static_cast<VertexId>(b);
            if (!measures.count(u) || !measures.count(v))
                fail(ErrorKind::unknown_vertex, "edge references undeclared vertex");
            if (u == v) fail(ErrorKind::parse_error, "self-loop not allowed");
            if (!(w > 0.0)) fail(ErrorKind::nonpositive_weight, "edge weight must be positive");
            auto key = std::minmax(u, v);
            if (edge_seen.count(key))
                fail(ErrorKind::duplicate_edge,
                     "edge {" + std::to_string(u) + "," + std::to_string(v) + "} listed twice");
            edge_seen[key] = true;
            edges.push_back({u, v, w});
        } else {
            fail(ErrorKind::parse_error, "unknown record '" + tag + "'");
        }
    }
    if (!header_seen) raise(ErrorKind::parse_error, "empty input, expected 'graph v1' header");
    if (measures.empty()) raise(ErrorKind::parse_error, "no vertices declared");

    const int n = static_cast<int>(measures.size());
    std::vector<double> m(n, 1.0);
    for (const auto& [vid, mv] : measures) {
        if (vid >= n)
            raise(ErrorKind::parse_error,
                  "vertex ids must be dense 0..n-1 (saw " + std::to_string(vid) + " with n=" +
                      std::to_string(n) + ")");
        m[vid] = mv;
    }
    return WeightedGraph(std::move(m), std::move(edges), "custom", std::nullopt);
}

inline void save_graph(const WeightedGraph& g, std::ostream& out) {
    out << "graph v1\n";
    for (VertexId x = 0; x < g.vertex_count(); ++x)
        out << "v " << x << " " << format_double(g.measure(x)) << "\n";
    for (const Edge& e : g.edges()) {
        VertexId u = std::min(e.u, e.v);
        VertexId v = std::max(e.u, e.v);
        out << "e " << u << " " << v << " " << format_double(e.weight) << "\n";
    }
}

} // namespace heatlab
