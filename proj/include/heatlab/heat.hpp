#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <vector>

#include "heatlab/dense_eigen.hpp"
#include "heatlab/eigenfunctions.hpp"
#include "heatlab/linear_solver.hpp"
#include "heatlab/rng.hpp"

namespace heatlab {

struct HeatState {
    double time = 0.0;
    VertexFunction values;
};

/// Backward Euler step for the heat equation: solve (I - tau Delta) u+ = u.
/// The step matrix is an M-matrix, so nonnegative states stay nonnegative;
/// total mass sum_x m_x u(x) is conserved up to solver tolerance.
inline HeatState step_heat_implicit(const WeightedGraph& g, const HeatState& state, double tau) {
    if (!(tau > 0.0)) raise(ErrorKind::invalid_param, "tau must be positive");
    require_domain(g, state.values);
    SparseSystem sys = implicit_heat_system(g, tau);
    HeatState next;
    next.time = state.time + tau;
    solve_spd(sys, state.values, next.values, 1e-13);
    return next;
}

/// Exact reference solver for small graphs: full m-orthonormal
/// eigendecomposition of Delta, then u(t) = sum_i e^{mu_i t} <u0, phi_i>_m phi_i.
inline HeatState solve_heat_spectral(const WeightedGraph& g, const VertexFunction& u0, double t) {
    const int n = g.vertex_count();
    if (n > 2000) raise(ErrorKind::too_large, "spectral solver is limited to 2000 vertices");
    if (t < 0.0) raise(ErrorKind::invalid_param, "forward heat flow needs t >= 0");
    require_domain(g, u0);

    // Symmetrize -Delta by the similarity D^{1/2} (-Delta) D^{-1/2}:
    // S_xy = -w_xy / sqrt(m_x m_y), S_xx = (sum w) / m_x.
    std::vector<std::vector<double>> S(n, std::vector<double>(n, 0.0));
    std::vector<double> sqrt_m(n);
    for (VertexId x = 0; x < n; ++x) {
        sqrt_m[x] = std::sqrt(g.measure(x));
        S[x][x] = g.weighted_degree(x) / g.measure(x);
    }
    for (const Edge& e : g.edges()) {
        double v = -e.weight / (sqrt_m[e.u] * sqrt_m[e.v]);
        S[e.u][e.v] = v;
        S[e.v][e.u] = v;
    }
    SymmetricEigen eig = dense_symmetric_eigen(std::move(S));

    // psi_k orthonormal for S; phi_k = D^{-1/2} psi_k is m-orthonormal for
    // -Delta with the same eigenvalue theta_k >= 0.
    std::vector<double> y(n, 0.0); // y = D^{1/2} u0, so <u0, phi_k>_m = psi_k . y
    for (VertexId x = 0; x < n; ++x) y[x] = sqrt_m[x] * u0[x];
    HeatState out;
    out.time = t;
    out.values.assign(n, 0.0);
    for (int k = 0; k < n; ++k) {
        double coeff = 0.0;
        for (int j = 0; j < n; ++j) coeff += eig.vectors[k][j] * y[j];
        double decay = std::exp(-std::max(eig.values[k], 0.0) * t);
        for (int j = 0; j < n; ++j) out.values[j] += decay * coeff * eig.vectors[k][j] / sqrt_m[j];
    }
    return out;
}

/// Finitely many spectral atoms (lambda_i, nu_i, w_i). nu is a probability
/// vector; every lambda_i must be admissible (>= -lambda1_reference) and
/// every atom carries a strictly positive eigenfunction.
struct SpectralAtom {
    double lambda = 0.0;
    double nu = 0.0;
    Eigenfunction w;
};

struct SpectralMeasure {
    std::vector<SpectralAtom> atoms;
    double lambda1_reference = 0.0;
};

/// Ancient solution in closed form: u(x,t) = sum_i nu_i e^{lambda_i t} w_i(x)
/// for t below the horizon. Backward time stepping is never used; the closed
/// form is global in time.
class AncientSolution {
public:
    AncientSolution(const WeightedGraph& g, SpectralMeasure measure, double horizon,
                    std::vector<VertexId> domain)
        : graph_(&g), measure_(std::move(measure)), horizon_(horizon), domain_(std::move(domain)) {}

    const WeightedGraph& graph() const { return *graph_; }
    const SpectralMeasure& measure() const { return measure_; }
    double horizon() const { return horizon_; }
    const std::vector<VertexId>& domain() const { return domain_; }

    double value(VertexId x, double t) const {
        double u = 0.0;
        for (const SpectralAtom& a : measure_.atoms)
            u += a.nu * std::exp(a.lambda * t) * a.w.values[x];
        return u;
    }

    /// Exact time derivative of the closed form.
    double dt_value(VertexId x, double t) const {
        double u = 0.0;
        for (const SpectralAtom& a : measure_.atoms)
            u += a.nu * a.lambda * std::exp(a.lambda * t) * a.w.values[x];
        return u;
    }

    VertexFunction field(double t) const {
        VertexFunction u(graph_->vertex_count(), 0.0);
        for (const SpectralAtom& a : measure_.atoms) {
            double scale = a.nu * std::exp(a.lambda * t);
            for (VertexId x = 0; x < graph_->vertex_count(); ++x)
                u[x] += scale * a.w.values[x];
        }
        return u;
    }

private:
    const WeightedGraph* graph_;
    SpectralMeasure measure_;
    double horizon_;
    std::vector<VertexId> domain_;
};

/// Validate a spectral measure and wrap it as an evaluable ancient solution.
inline AncientSolution synthesize_ancient(const SpectralMeasure& measure, double horizon) {
    if (measure.atoms.empty())
        raise(ErrorKind::invalid_param, "measure needs at least one atom");
    const WeightedGraph* g = measure.atoms.front().w.graph;
    const VertexId root = measure.atoms.front().w.root;
    double total = 0.0;
    for (const SpectralAtom& a : measure.atoms) {
        if (a.w.graph != g || a.w.root != root)
            raise(ErrorKind::mixed_domains, "atoms must share one graph and root");
        if (!(a.nu > 0.0))
            raise(ErrorKind::measure_not_normalized, "atom weights must be positive");
        if (a.lambda < -measure.lambda1_reference - 1e-12)
            raise(ErrorKind::admissibility_violation,
                  "atom lambda = " + std::to_string(a.lambda) +
                      " lies below -lambda1 = " + std::to_string(-measure.lambda1_reference));
        if (a.w.positivity != Positivity::strictly_positive)
            raise(ErrorKind::invalid_param,
                  "atoms must carry strictly positive eigenfunctions");
        total += a.nu;
    }
    if (std::abs(total - 1.0) > 1e-12)
        raise(ErrorKind::measure_not_normalized,
              "atom weights sum to " + std::to_string(total) + ", expected 1");

    BallDecomposition balls = decompose_balls(*g, root);
    return AncientSolution(*g, measure, horizon, interior_vertices(*g, balls));
}

/// Max over the sample grid of |Delta u - du/dt| with the time derivative
/// taken from the closed form.
inline double heat_residual(const AncientSolution& sol, const std::vector<double>& sample_times,
                            const std::vector<VertexId>& sample_vertices) {
    const WeightedGraph& g = sol.graph();
    std::vector<char> in_domain(g.vertex_count(), 0);
    for (VertexId x : sol.domain()) in_domain[x] = 1;
    for (VertexId x : sample_vertices) {
        if (!g.contains(x) || !in_domain[x])
            raise(ErrorKind::out_of_domain, "vertex " + std::to_string(x) + " outside the domain");
    }
    double worst = 0.0;
    for (double t : sample_times) {
        if (t >= sol.horizon())
            raise(ErrorKind::out_of_domain, "sample time at or beyond the horizon");
        VertexFunction u = sol.field(t);
        VertexFunction lap = apply_laplacian(g, u);
        for (VertexId x : sample_vertices)
            worst = std::max(worst, std::abs(lap[x] - sol.dt_value(x, t)));
    }
    return worst;
}

struct HarnackSample {
    VertexId x = 0;
    VertexId y = 0;
    double t1 = 0.0;
    double t2 = 0.0;
    double lhs = 0.0; // ln( u(x,t1) / u(y,t2) )
    int rho = 0;      // combinatorial distance between x and y
};

struct HarnackAudit {
    std::vector<HarnackSample> samples;
    double fitted_c1 = 0.0;
    double fitted_c2 = 0.0;
    double max_violation = 0.0; // max over samples of lhs - C1 dt - C2 rho^2/dt
    HarnackSample worst;
    std::uint64_t seed = 0;
    double window_lo = 0.0;
    double window_hi = 0.0;
};

struct HarnackSampleSpec {
    int count = 1000;
    double t_lo = -8.0;
    double t_hi = -1.0;
    std::uint64_t seed = 1;
};

namespace detail {

inline int bfs_distance(const WeightedGraph& g, VertexId from, VertexId to) {
    if (from == to) return 0;
    std::vector<int> dist(g.vertex_count(), -1);
    dist[from] = 0;
    std::queue<VertexId> queue;
    queue.push(from);
    while (!queue.empty()) {
        VertexId x = queue.front();
        queue.pop();
        for (const auto& [y, w] : g.neighbors(x)) {
            (void)w;
            if (dist[y] < 0) {
                dist[y] = dist[x] + 1;
                if (y == to) return dist[y];
                queue.push(y);
            }
        }
    }
    return -1;
}

} // namespace detail

/// Empirical audit of the two-constant parabolic Harnack comparison
///   u(x,t1) <= u(y,t2) exp{ C1 (t2-t1) + C2 rho^2(x,y) / (t2-t1) }.
/// Samples (x, y, t1 < t2) from the deep interior (two spheres away from the
/// truncation boundary), then grid-searches the smallest feasible (C1, C2)
/// in [0,50]^2 with refinement. The point of the audit is the existence of
/// finite constants, not sharpness.
inline HarnackAudit audit_harnack(const WeightedGraph& g, const BallDecomposition& balls,
                                  const std::function<double(VertexId, double)>& u,
                                  const HarnackSampleSpec& spec) {
    if (spec.count < 1) raise(ErrorKind::invalid_param, "sample count must be positive");
    if (!(spec.t_lo < spec.t_hi)) raise(ErrorKind::invalid_param, "bad time window");

    int deep_radius = balls.max_radius;
    if (g.truncation_radius()) deep_radius = *g.truncation_radius() - 2;
    std::vector<VertexId> pool = balls.ball(std::max(deep_radius, 0));
    if (pool.empty()) raise(ErrorKind::invalid_param, "empty sampling pool");

    HarnackAudit audit;
    audit.seed = spec.seed;
    audit.window_lo = spec.t_lo;
    audit.window_hi = spec.t_hi;
    SplitMix64 rng(spec.seed);
    audit.samples.reserve(spec.count);
    for (int k = 0; k < spec.count; ++k) {
        HarnackSample s;
        s.x = pool[rng.index(pool.size())];
        s.y = pool[rng.index(pool.size())];
        double a = rng.uniform(spec.t_lo, spec.t_hi);
        double b = rng.uniform(spec.t_lo, spec.t_hi);
        while (std::abs(b - a) < 1e-9) b = rng.uniform(spec.t_lo, spec.t_hi);
        s.t1 = std::min(a, b);
        s.t2 = std::max(a, b);
        double ux = u(s.x, s.t1);
        double uy = u(s.y, s.t2);
        if (!(ux > 0.0) || !(uy > 0.0))
            raise(ErrorKind::nonpositive_sample, "solution is not positive on the audit domain");
        s.lhs = std::log(ux) - std::log(uy);
        s.rho = detail::bfs_distance(g, s.x, s.y);
        audit.samples.push_back(s);
    }

    auto violation = [&](double c1, double c2) {
        double worst = -std::numeric_limits<double>::infinity();
        for (const HarnackSample& s : audit.samples) {
            double dt = s.t2 - s.t1;
            double v = s.lhs - c1 * dt - c2 * static_cast<double>(s.rho) * s.rho / dt;
            worst = std::max(worst, v);
        }
        return worst;
    };

    // Feasibility is monotone in both constants, so scan a coarse grid for
    // the smallest feasible C1 + C2, then refine around the winner.
    double best_c1 = 50.0, best_c2 = 50.0;
    bool feasible = violation(best_c1, best_c2) <= 0.0;
    double lo1 = 0.0, hi1 = 50.0, lo2 = 0.0, hi2 = 50.0;
    for (int pass = 0; pass < 4; ++pass) {
        const int steps = 10;
        double d1 = (hi1 - lo1) / steps, d2 = (hi2 - lo2) / steps;
        double pick1 = best_c1, pick2 = best_c2;
        bool found = false;
        for (int i = 0; i <= steps; ++i)
            for (int j = 0; j <= steps; ++j) {
                double c1 = lo1 + d1 * i, c2 = lo2 + d2 * j;
                if (violation(c1, c2) <= 0.0) {
                    if (!found || c1 + c2 < pick1 + pick2) {
                        pick1 = c1;
                        pick2 = c2;
                        found = true;
                    }
                }
            }
        if (!found) break;
        feasible = true;
        best_c1 = pick1;
        best_c2 = pick2;
        lo1 = std::max(0.0, pick1 - d1);
        hi1 = pick1 + d1;
        lo2 = std::max(0.0, pick2 - d2);
        hi2 = pick2 + d2;
    }
    if (!feasible)
        raise(ErrorKind::convergence_failure,
              "no feasible (C1, C2) in [0,50]^2; widen the grid or check the solution");

    audit.fitted_c1 = best_c1;
    audit.fitted_c2 = best_c2;
    audit.max_violation = violation(best_c1, best_c2);
    double worst_v = -std::numeric_limits<double>::infinity();
    for (const HarnackSample& s : audit.samples) {
        double dt = s.t2 - s.t1;
        double v = s.lhs - best_c1 * dt - best_c2 * static_cast<double>(s.rho) * s.rho / dt;
        if (v > worst_v) {
            worst_v = v;
            audit.worst = s;
        }
    }
    return audit;
}

} // namespace heatlab
