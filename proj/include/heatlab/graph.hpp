#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "heatlab/errors.hpp"

namespace heatlab {

using VertexId = int;

struct Edge {
    VertexId u = -1;
    VertexId v = -1;
    double weight = 1.0;
};

/// Known generated families. Lattice and tree graphs are finite balls of the
/// corresponding infinite graph; path and cycle are finite as-is.
enum class Family { path, cycle, lattice_Z, lattice_Z2, tree_regular };

inline std::string_view to_string(Family family) {
    switch (family) {
        case Family::path: return "path";
        case Family::cycle: return "cycle";
        case Family::lattice_Z: return "lattice_Z";
        case Family::lattice_Z2: return "lattice_Z2";
        case Family::tree_regular: return "tree_regular";
    }
    return "unknown";
}

/// Undirected weighted graph with positive edge weights w_e and positive
/// vertex measures m_x. Vertex ids are dense integers 0..n-1. Immutable after
/// construction; the constructor validates simplicity, positivity and
/// connectivity.
class WeightedGraph {
public:
    WeightedGraph(std::vector<double> vertex_measure, std::vector<Edge> edges,
                  std::string family_tag = "custom",
                  std::optional<int> truncation_radius = std::nullopt)
        : measure_(std::move(vertex_measure)),
          edges_(std::move(edges)),
          family_tag_(std::move(family_tag)),
          truncation_radius_(truncation_radius) {
        const int n = static_cast<int>(measure_.size());
        if (n == 0) raise(ErrorKind::invalid_param, "graph needs at least one vertex");
        for (VertexId x = 0; x < n; ++x) {
            if (!(measure_[x] > 0.0))
                raise(ErrorKind::nonpositive_weight,
                      "vertex measure m_" + std::to_string(x) + " must be positive");
        }
        adjacency_.assign(n, {});
        std::map<std::pair<VertexId, VertexId>, bool> seen;
        for (const Edge& e : edges_) {
            if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
                raise(ErrorKind::unknown_vertex, "edge endpoint out of range");
            if (e.u == e.v)
                raise(ErrorKind::invalid_param, "self-loop at vertex " + std::to_string(e.u));
            if (!(e.weight > 0.0))
                raise(ErrorKind::nonpositive_weight,
                      "edge weight w_{" + std::to_string(e.u) + "," + std::to_string(e.v) +
                          "} must be positive");
            auto key = std::minmax(e.u, e.v);
            if (seen.count(key))
                raise(ErrorKind::duplicate_edge,
                      "duplicate edge {" + std::to_string(e.u) + "," + std::to_string(e.v) + "}");
            seen[key] = true;
            adjacency_[e.u].push_back({e.v, e.weight});
            adjacency_[e.v].push_back({e.u, e.weight});
        }
        check_connected();
    }

    int vertex_count() const { return static_cast<int>(measure_.size()); }
    double measure(VertexId x) const { return measure_[x]; }
    const std::vector<double>& measures() const { return measure_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<std::pair<VertexId, double>>& neighbors(VertexId x) const {
        return adjacency_[x];
    }
    int degree(VertexId x) const { return static_cast<int>(adjacency_[x].size()); }
    const std::string& family_tag() const { return family_tag_; }
    std::optional<int> truncation_radius() const { return truncation_radius_; }

    /// Sum of edge weights incident to x (the numerator of the Laplacian's
    /// diagonal term).
    double weighted_degree(VertexId x) const {
        double s = 0.0;
        for (const auto& [y, w] : adjacency_[x]) {
            (void)y;
            s += w;
        }
        return s;
    }

    bool contains(VertexId x) const { return x >= 0 && x < vertex_count(); }

private:
    void check_connected() const {
        const int n = vertex_count();
        std::vector<char> visited(n, 0);
        std::queue<VertexId> queue;
        queue.push(0);
        visited[0] = 1;
        int reached = 1;
        while (!queue.empty()) {
            VertexId x = queue.front();
            queue.pop();
            for (const auto& [y, w] : adjacency_[x]) {
                (void)w;
                if (!visited[y]) {
                    visited[y] = 1;
                    ++reached;
                    queue.push(y);
                }
            }
        }
        if (reached != n)
            raise(ErrorKind::disconnected, "graph has more than one component (" +
                                               std::to_string(reached) + " of " +
                                               std::to_string(n) + " vertices reachable)");
    }

    std::vector<double> measure_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::pair<VertexId, double>>> adjacency_;
    std::string family_tag_;
    std::optional<int> truncation_radius_;
};

/// Tight bounded-geometry constant
///   c0 = max( max_e w_e, max_e 1/w_e, max_x m_x, max_x 1/m_x, max_x deg x )
/// together with the vertices/edges attaining each extreme.
struct GeometryCertificate {
    double c0 = 1.0;
    int witness_edge_min = -1;   // index into edges(), smallest weight
    int witness_edge_max = -1;   // index into edges(), largest weight
    VertexId witness_measure_min = -1;
    VertexId witness_measure_max = -1;
    VertexId witness_degree_max = -1;
};

inline GeometryCertificate certify_bounded_geometry(const WeightedGraph& g) {
    GeometryCertificate cert;
    const auto& edges = g.edges();
    double wmin = std::numeric_limits<double>::infinity();
    double wmax = -std::numeric_limits<double>::infinity();
    if (edges.empty()) {
        // Single-vertex graph: only the measure bounds are active.
        cert.witness_edge_min = cert.witness_edge_max = -1;
        wmin = wmax = 1.0;
    }
    for (int i = 0; i < static_cast<int>(edges.size()); ++i) {
        if (edges[i].weight < wmin) {
            wmin = edges[i].weight;
            cert.witness_edge_min = i;
        }
        if (edges[i].weight > wmax) {
            wmax = edges[i].weight;
            cert.witness_edge_max = i;
        }
    }
    double mmin = std::numeric_limits<double>::infinity();
    double mmax = -std::numeric_limits<double>::infinity();
    int degmax = 0;
    for (VertexId x = 0; x < g.vertex_count(); ++x) {
        if (g.measure(x) < mmin) {
            mmin = g.measure(x);
            cert.witness_measure_min = x;
        }
        if (g.measure(x) > mmax) {
            mmax = g.measure(x);
            cert.witness_measure_max = x;
        }
        if (g.degree(x) > degmax || cert.witness_degree_max < 0) {
            degmax = g.degree(x);
            cert.witness_degree_max = x;
        }
    }
    cert.c0 = std::max({wmax, 1.0 / wmin, mmax, 1.0 / mmin, static_cast<double>(degmax)});
    cert.c0 = std::max(cert.c0, 1.0);
    return cert;
}

/// BFS layering around a root: distance(x) = combinatorial distance to the
/// root, spheres[n] = all vertices at distance exactly n.
struct BallDecomposition {
    VertexId root = 0;
    std::vector<int> distance;                // indexed by vertex id
    std::vector<std::vector<VertexId>> spheres;
    int max_radius = 0;

    /// Vertices with distance <= n, in sphere order.
    std::vector<VertexId> ball(int n) const {
        std::vector<VertexId> out;
        for (int k = 0; k <= n && k < static_cast<int>(spheres.size()); ++k)
            out.insert(out.end(), spheres[k].begin(), spheres[k].end());
        return out;
    }
};

inline BallDecomposition decompose_balls(const WeightedGraph& g, VertexId root) {
    if (!g.contains(root))
        raise(ErrorKind::unknown_vertex, "root " + std::to_string(root) + " not in graph");
    BallDecomposition balls;
    balls.root = root;
    balls.distance.assign(g.vertex_count(), -1);
    balls.distance[root] = 0;
    std::vector<VertexId> frontier{root};
    while (!frontier.empty()) {
        balls.spheres.push_back(frontier);
        std::vector<VertexId> next;
        for (VertexId x : frontier) {
            for (const auto& [y, w] : g.neighbors(x)) {
                (void)w;
                if (balls.distance[y] < 0) {
                    balls.distance[y] = balls.distance[x] + 1;
                    next.push_back(y);
                }
            }
        }
        std::sort(next.begin(), next.end());
        frontier = std::move(next);
    }
    balls.max_radius = static_cast<int>(balls.spheres.size()) - 1;
    return balls;
}

/// Canonical root of a generated graph: the center vertex for truncated
/// families, vertex 0 otherwise.
inline VertexId canonical_root(const WeightedGraph& g) {
    const std::string& tag = g.family_tag();
    const int N = g.truncation_radius().value_or(0);
    if (tag == "lattice-Z") return N;          // ids are position + N
    if (tag == "lattice-Z2") return N * N + N; // row-major l^1 ball, center (0,0)
    return 0;                                  // tree root, or first vertex
}

namespace detail {

inline WeightedGraph make_unit(int n, std::vector<Edge> edges, std::string tag,
                               std::optional<int> trunc) {
    return WeightedGraph(std::vector<double>(n, 1.0), std::move(edges), std::move(tag), trunc);
}

} // namespace detail

/// Build a canonical family with unit weights and unit measures.
///   path, cycle:   size_param = number of vertices
///   lattice_Z:     ball of radius size_param around 0 in Z, ids = position + N
///   lattice_Z2:    ball of radius size_param around the origin in Z^2
///   tree_regular:  ball of radius size_param in the degree_param-regular tree
/// Truncated families record truncation_radius; path and cycle do not.
inline WeightedGraph generate_family(Family family, int size_param,
                                     std::optional<int> degree_param = std::nullopt) {
    if (size_param < 1) raise(ErrorKind::invalid_param, "size_param must be >= 1");
    switch (family) {
        case Family::path: {
            std::vector<Edge> edges;
            for (int i = 0; i + 1 < size_param; ++i) edges.push_back({i, i + 1, 1.0});
            return detail::make_unit(size_param, std::move(edges), "path", std::nullopt);
        }
        case Family::cycle: {
            if (size_param < 3)
                raise(ErrorKind::invalid_param, "cycle needs at least 3 vertices");
            std::vector<Edge> edges;
            for (int i = 0; i < size_param; ++i)
                edges.push_back({i, (i + 1) % size_param, 1.0});
            return detail::make_unit(size_param, std::move(edges), "cycle", std::nullopt);
        }
        case Family::lattice_Z: {
            const int N = size_param;
            std::vector<Edge> edges;
            for (int p = -N; p < N; ++p) edges.push_back({p + N, p + N + 1, 1.0});
            return detail::make_unit(2 * N + 1, std::move(edges), "lattice-Z", N);
        }
        case Family::lattice_Z2: {
            const int N = size_param;
            // Enumerate the l^1 ball row by row for a reproducible labeling.
            std::map<std::pair<int, int>, VertexId> id;
            std::vector<std::pair<int, int>> coords;
            for (int i = -N; i <= N; ++i) {
                const int jmax = N - std::abs(i);
                for (int j = -jmax; j <= jmax; ++j) {
                    id[{i, j}] = static_cast<VertexId>(coords.size());
                    coords.push_back({i, j});
                }
            }
            std::vector<Edge> edges;
            for (const auto& [c, x] : id) {
                auto right = id.find({c.first + 1, c.second});
                if (right != id.end()) edges.push_back({x, right->second, 1.0});
                auto up = id.find({c.first, c.second + 1});
                if (up != id.end()) edges.push_back({x, up->second, 1.0});
            }
            WeightedGraph g = detail::make_unit(static_cast<int>(coords.size()),
                                                std::move(edges), "lattice-Z2", N);
            return g;
        }
        case Family::tree_regular: {
            if (!degree_param || *degree_param < 3)
                raise(ErrorKind::invalid_param, "tree_regular needs degree_param >= 3");
            const int d = *degree_param;
            const int N = size_param;
            // Vertex 0 is the root; children are appended breadth first.
            std::vector<Edge> edges;
            std::vector<VertexId> level{0};
            int next_id = 1;
            for (int depth = 0; depth < N; ++depth) {
                std::vector<VertexId> next_level;
                for (VertexId parent : level) {
                    const int children = (depth == 0) ? d : d - 1;
                    for (int c = 0; c < children; ++c) {
                        edges.push_back({parent, next_id, 1.0});
                        next_level.push_back(next_id);
                        ++next_id;
                    }
                }
                level = std::move(next_level);
            }
            return detail::make_unit(next_id, std::move(edges), "tree-" + std::to_string(d), N);
        }
    }
    raise(ErrorKind::invalid_param, "unknown family");
}

/// The vertices the infinite-graph statements are checked on: everything
/// strictly inside the truncation boundary. For graphs that are not
/// truncations the whole vertex set is interior.
inline std::vector<VertexId> interior_vertices(const WeightedGraph& g,
                                               const BallDecomposition& balls) {
    if (!g.truncation_radius()) {
        std::vector<VertexId> all(g.vertex_count());
        for (int i = 0; i < g.vertex_count(); ++i) all[i] = i;
        return all;
    }
    return balls.ball(*g.truncation_radius() - 1);
}

} // namespace heatlab
