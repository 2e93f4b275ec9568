#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "heatlab/graph.hpp"

namespace heatlab {

/// A function V -> R, indexed by vertex id. Callers pair it with the graph it
/// lives on; operations validate the size.
using VertexFunction = std::vector<double>;

inline void require_domain(const WeightedGraph& g, const VertexFunction& f,
                           const char* what = "function") {
    if (static_cast<int>(f.size()) != g.vertex_count())
        raise(ErrorKind::domain_mismatch, std::string(what) + " has " +
                                              std::to_string(f.size()) + " values, graph has " +
                                              std::to_string(g.vertex_count()) + " vertices");
}

/// Graph Laplacian: (Delta f)(x) = sum_{y ~ x} (w_xy / m_x) (f(y) - f(x)).
inline VertexFunction apply_laplacian(const WeightedGraph& g, const VertexFunction& f) {
    require_domain(g, f);
    VertexFunction out(f.size(), 0.0);
    for (VertexId x = 0; x < g.vertex_count(); ++x) {
        double acc = 0.0;
        for (const auto& [y, w] : g.neighbors(x)) acc += w * (f[y] - f[x]);
        out[x] = acc / g.measure(x);
    }
    return out;
}

inline double max_abs(const VertexFunction& f) {
    double m = 0.0;
    for (double v : f) m = std::max(m, std::abs(v));
    return m;
}

/// Laplacian restricted to an interior vertex set with outside values frozen
/// to zero. Row x keeps the full diagonal -(sum over ALL neighbors w)/m_x, so
/// the operator agrees with Delta on functions vanishing outside the
/// interior. Self-adjoint in the m-weighted inner product:
/// m_x entry(x,y) = w_xy = m_y entry(y,x).
class DirichletOperator {
public:
    DirichletOperator(const WeightedGraph& g, std::vector<VertexId> interior, VertexId root,
                      int radius)
        : graph_(&g), interior_(std::move(interior)), root_(root), radius_(radius) {
        const int n = static_cast<int>(interior_.size());
        local_index_.assign(g.vertex_count(), -1);
        for (int i = 0; i < n; ++i) local_index_[interior_[i]] = i;
        diag_.resize(n);
        m_.resize(n);
        boundary_weight_.assign(n, 0.0);
        in_adj_.assign(n, {});
        for (int i = 0; i < n; ++i) {
            VertexId x = interior_[i];
            m_[i] = g.measure(x);
            diag_[i] = g.weighted_degree(x) / m_[i];
            for (const auto& [y, w] : g.neighbors(x)) {
                int j = local_index_[y];
                if (j >= 0)
                    in_adj_[i].push_back({j, w});
                else
                    boundary_weight_[i] += w;
            }
        }
    }

    const WeightedGraph& graph() const { return *graph_; }
    const std::vector<VertexId>& interior() const { return interior_; }
    int size() const { return static_cast<int>(interior_.size()); }
    VertexId root() const { return root_; }
    int radius() const { return radius_; }
    int local_index(VertexId x) const { return local_index_[x]; }
    double measure_local(int i) const { return m_[i]; }
    const std::vector<std::pair<int, double>>& interior_neighbors(int i) const {
        return in_adj_[i];
    }

    /// Matrix entry of Delta_D in global vertex ids (zero outside the
    /// interior pattern). Diagonal entries are negative.
    double entry(VertexId x, VertexId y) const {
        int i = local_index_[x];
        if (i < 0 || local_index_[y] < 0) return 0.0;
        if (x == y) return -diag_[i];
        for (const auto& [j, w] : in_adj_[i])
            if (interior_[j] == y) return w / m_[i];
        return 0.0;
    }

    /// out = (-Delta_D) v on interior coordinates. Positive semidefinite in
    /// the m-weighted inner product (definite when some interior vertex sees
    /// the boundary).
    void apply_neg(const std::vector<double>& v, std::vector<double>& out) const {
        const int n = size();
        out.assign(n, 0.0);
        for (int i = 0; i < n; ++i) {
            double acc = diag_[i] * v[i];
            for (const auto& [j, w] : in_adj_[i]) acc -= (w / m_[i]) * v[j];
            out[i] = acc;
        }
    }

    /// Weight mass from interior vertex i into the frozen boundary; the
    /// right-hand side of a boundary-value solve with datum g_b is
    /// b_i = boundary_rhs(i) * g_b when the datum is constant.
    double boundary_weight(int i) const { return boundary_weight_[i]; }

    double inner_m(const std::vector<double>& a, const std::vector<double>& b) const {
        double s = 0.0;
        for (int i = 0; i < size(); ++i) s += m_[i] * a[i] * b[i];
        return s;
    }

    double norm_m(const std::vector<double>& a) const { return std::sqrt(inner_m(a, a)); }

private:
    const WeightedGraph* graph_;
    std::vector<VertexId> interior_;
    std::vector<int> local_index_;
    std::vector<double> diag_;
    std::vector<double> m_;
    std::vector<double> boundary_weight_;
    std::vector<std::vector<std::pair<int, double>>> in_adj_;
    VertexId root_;
    int radius_;
};

/// Dirichlet restriction to the ball of the given radius: interior is
/// B_{radius-1}(root), boundary values frozen to zero on the sphere
/// partial B_radius (and beyond).
inline DirichletOperator assemble_dirichlet(const WeightedGraph& g,
                                            const BallDecomposition& balls, int radius) {
    if (radius < 1 || radius > balls.max_radius)
        raise(ErrorKind::radius_out_of_range,
              "radius " + std::to_string(radius) + " not in [1, " +
                  std::to_string(balls.max_radius) + "]");
    return DirichletOperator(g, balls.ball(radius - 1), balls.root, radius);
}

struct SubharmonicReport {
    bool subharmonic = true;
    // (vertex, Delta f value) at every checked vertex where Delta f < -tol.
    std::vector<std::pair<VertexId, double>> violations;
};

/// Checks Delta f >= -tol at the given vertices (all vertices when the list
/// is empty). The tolerance is absolute after normalizing max|f| to 1.
inline SubharmonicReport is_subharmonic(const WeightedGraph& g, const VertexFunction& f,
                                        const std::vector<VertexId>& check_at = {},
                                        double tol = 1e-10) {
    require_domain(g, f);
    VertexFunction lap = apply_laplacian(g, f);
    const double scale = std::max(max_abs(f), 1.0);
    SubharmonicReport report;
    auto check = [&](VertexId x) {
        if (lap[x] / scale < -tol) {
            report.subharmonic = false;
            report.violations.push_back({x, lap[x]});
        }
    };
    if (check_at.empty())
        for (VertexId x = 0; x < g.vertex_count(); ++x) check(x);
    else
        for (VertexId x : check_at) check(x);
    return report;
}

/// Maximum principle for subharmonic functions:
///   max over partial B_n(root) of f == max over B_n(root) of f.
/// Throws NotSubharmonic when f fails the subharmonicity precondition on the
/// interior (B_{n-1}, plus everything inside the truncation boundary).
inline bool check_maximum_principle(const WeightedGraph& g, const BallDecomposition& balls,
                                    const VertexFunction& f, int n, double tol = 1e-10) {
    require_domain(g, f);
    if (n < 0 || n > balls.max_radius)
        raise(ErrorKind::radius_out_of_range, "sphere index " + std::to_string(n) + " out of range");
    if (g.truncation_radius() && n >= *g.truncation_radius())
        raise(ErrorKind::radius_out_of_range,
              "sphere index must stay below the truncation radius");

    std::vector<VertexId> interior = interior_vertices(g, balls);
    SubharmonicReport sub = is_subharmonic(g, f, interior, tol);
    if (!sub.subharmonic)
        raise(ErrorKind::not_subharmonic,
              "function is not subharmonic at " + std::to_string(sub.violations.size()) +
                  " interior vertices; maximum principle does not apply");

    double ball_max = -std::numeric_limits<double>::infinity();
    for (int k = 0; k <= n; ++k)
        for (VertexId x : balls.spheres[k]) ball_max = std::max(ball_max, f[x]);
    double sphere_max = -std::numeric_limits<double>::infinity();
    for (VertexId x : balls.spheres[n]) sphere_max = std::max(sphere_max, f[x]);

    const double scale = std::max(max_abs(f), 1.0);
    return std::abs(ball_max - sphere_max) / scale <= tol;
}

} // namespace heatlab
