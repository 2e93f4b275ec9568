#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "heatlab/errors.hpp"
#include "heatlab/laplacian.hpp"

namespace heatlab {

/// Sparse linear system with M-matrix sign structure:
///   row i:  diag[i] * v[i] - sum_{(j,c) in off[i]} c * v[j]  =  b[i]
/// with c >= 0 and m[i] * c_ij = m[j] * c_ji, so the matrix is self-adjoint
/// in the m-weighted inner product.
struct SparseSystem {
    std::vector<double> diag;
    std::vector<std::vector<std::pair<int, double>>> off;
    std::vector<double> m;

    int size() const { return static_cast<int>(diag.size()); }

    void apply(const std::vector<double>& v, std::vector<double>& out) const {
        const int n = size();
        out.assign(n, 0.0);
        for (int i = 0; i < n; ++i) {
            double acc = diag[i] * v[i];
            for (const auto& [j, c] : off[i]) acc -= c * v[j];
            out[i] = acc;
        }
    }

    double inner_m(const std::vector<double>& a, const std::vector<double>& b) const {
        double s = 0.0;
        for (int i = 0; i < size(); ++i) s += m[i] * a[i] * b[i];
        return s;
    }

    double norm_m(const std::vector<double>& a) const { return std::sqrt(inner_m(a, a)); }
};

/// shift * I + (-Delta_D) on the interior of a Dirichlet restriction.
inline SparseSystem shifted_dirichlet_system(const DirichletOperator& op, double shift) {
    SparseSystem sys;
    const int n = op.size();
    sys.diag.resize(n);
    sys.off.resize(n);
    sys.m.resize(n);
    for (int i = 0; i < n; ++i) {
        VertexId x = op.interior()[i];
        sys.m[i] = op.measure_local(i);
        sys.diag[i] = shift + op.graph().weighted_degree(x) / sys.m[i];
        for (const auto& [j, w] : op.interior_neighbors(i)) sys.off[i].push_back({j, w / sys.m[i]});
    }
    return sys;
}

/// I + tau * (-Delta) on the whole graph (backward Euler step matrix).
inline SparseSystem implicit_heat_system(const WeightedGraph& g, double tau) {
    SparseSystem sys;
    const int n = g.vertex_count();
    sys.diag.resize(n);
    sys.off.resize(n);
    sys.m.resize(n);
    for (VertexId x = 0; x < n; ++x) {
        sys.m[x] = g.measure(x);
        sys.diag[x] = 1.0 + tau * g.weighted_degree(x) / sys.m[x];
        for (const auto& [y, w] : g.neighbors(x)) sys.off[x].push_back({y, tau * w / sys.m[x]});
    }
    return sys;
}

struct SolveStats {
    bool direct = false;   // exact forest elimination was used
    int iterations = 0;    // CG iterations (0 for direct)
    double residual = 0.0; // relative residual in the m-weighted norm
};

namespace detail {

/// Gaussian elimination for systems whose off-diagonal pattern is a forest.
/// Vertices are eliminated leaves first; Schur complements of M-matrices keep
/// the sign structure, so no pivoting is needed. Returns false when the
/// pattern contains a cycle.
inline bool forest_solve(const SparseSystem& sys, const std::vector<double>& rhs,
                         std::vector<double>& v) {
    const int n = sys.size();
    std::vector<double> diag = sys.diag;
    std::vector<double> b = rhs;
    std::vector<int> deg(n, 0);
    std::vector<char> eliminated(n, 0);
    for (int i = 0; i < n; ++i) deg[i] = static_cast<int>(sys.off[i].size());

    // coefficient lookup c_ij for active neighbors
    auto coeff = [&](int i, int j) -> double {
        for (const auto& [k, c] : sys.off[i])
            if (k == j) return c;
        return 0.0;
    };

    struct Step {
        int x;
        int parent;    // -1 if none
        double c_xp;   // coefficient of parent in x's row
        double d_x;    // pivot
    };
    std::vector<Step> order;
    order.reserve(n);
    std::vector<int> queue;
    for (int i = 0; i < n; ++i)
        if (deg[i] <= 1) queue.push_back(i);

    while (!queue.empty()) {
        int x = queue.back();
        queue.pop_back();
        if (eliminated[x]) continue;
        int parent = -1;
        for (const auto& [j, c] : sys.off[x]) {
            (void)c;
            if (!eliminated[j]) {
                parent = j;
                break;
            }
        }
        double d = diag[x];
        if (!(std::abs(d) > 1e-300)) raise(ErrorKind::solve_failure, "singular pivot");
        double c_xp = parent >= 0 ? coeff(x, parent) : 0.0;
        order.push_back({x, parent, c_xp, d});
        eliminated[x] = 1;
        if (parent >= 0) {
            double c_px = coeff(parent, x);
            diag[parent] -= c_px * c_xp / d;
            b[parent] += c_px * b[x] / d;
            if (--deg[parent] <= 1 && !eliminated[parent]) queue.push_back(parent);
        }
    }
    if (static_cast<int>(order.size()) != n) return false;

    v.assign(n, 0.0);
    for (int k = n - 1; k >= 0; --k) {
        const Step& s = order[k];
        double parent_value = s.parent >= 0 ? v[s.parent] : 0.0;
        v[s.x] = (b[s.x] + s.c_xp * parent_value) / s.d_x;
    }
    return true;
}

} // namespace detail

/// Solve A v = b for an m-self-adjoint positive definite SparseSystem.
/// Forest patterns (paths, trees, ball truncations of trees) are solved
/// exactly by elimination; everything else falls back to Jacobi-
/// preconditioned conjugate gradients in the m-weighted inner product.
inline SolveStats solve_spd(const SparseSystem& sys, const std::vector<double>& b,
                            std::vector<double>& v, double tol = 1e-12, int max_iterations = 20000) {
    SolveStats stats;
    if (detail::forest_solve(sys, b, v)) {
        stats.direct = true;
        std::vector<double> Av;
        sys.apply(v, Av);
        double bn = sys.norm_m(b);
        double rn = 0.0;
        for (int i = 0; i < sys.size(); ++i) {
            double r = b[i] - Av[i];
            rn += sys.m[i] * r * r;
        }
        stats.residual = bn > 0 ? std::sqrt(rn) / bn : std::sqrt(rn);
        return stats;
    }

    const int n = sys.size();
    v.assign(n, 0.0);
    std::vector<double> r = b;
    std::vector<double> z(n), d(n), q(n);
    const double bnorm = sys.norm_m(b);
    if (bnorm == 0.0) return stats;
    for (int i = 0; i < n; ++i) z[i] = r[i] / sys.diag[i];
    d = z;
    double delta = sys.inner_m(r, z);
    for (int it = 0; it < max_iterations; ++it) {
        sys.apply(d, q);
        double dq = sys.inner_m(d, q);
        if (!(dq > 0.0)) raise(ErrorKind::solve_failure, "system is not positive definite");
        double alpha = delta / dq;
        for (int i = 0; i < n; ++i) {
            v[i] += alpha * d[i];
            r[i] -= alpha * q[i];
        }
        stats.iterations = it + 1;
        double rnorm = sys.norm_m(r);
        stats.residual = rnorm / bnorm;
        if (stats.residual <= tol) return stats;
        for (int i = 0; i < n; ++i) z[i] = r[i] / sys.diag[i];
        double delta_new = sys.inner_m(r, z);
        double beta = delta_new / delta;
        delta = delta_new;
        for (int i = 0; i < n; ++i) d[i] = z[i] + beta * d[i];
    }
    raise(ErrorKind::solve_failure, "conjugate gradients did not converge (residual " +
                                        std::to_string(stats.residual) + ")");
}

} // namespace heatlab
