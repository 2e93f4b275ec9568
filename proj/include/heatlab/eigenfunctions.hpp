#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "heatlab/graph.hpp"
#include "heatlab/laplacian.hpp"
#include "heatlab/linear_solver.hpp"
#include "heatlab/spectrum.hpp"

namespace heatlab {

enum class Positivity { strictly_positive, identically_zero, indefinite };

inline std::string_view to_string(Positivity p) {
    switch (p) {
        case Positivity::strictly_positive: return "strictly_positive";
        case Positivity::identically_zero: return "identically_zero";
        case Positivity::indefinite: return "indefinite";
    }
    return "unknown";
}

/// A generalized eigenfunction: Delta w = lambda w on the interior of a
/// truncation, normalized to w(root) = 1. residual is the max over interior
/// vertices of |Delta w - lambda w| relative to max w.
struct Eigenfunction {
    const WeightedGraph* graph = nullptr;
    double lambda = 0.0;
    VertexFunction values;
    double residual = 0.0;
    Positivity positivity = Positivity::indefinite;
    VertexId root = 0;
};

/// max over the given vertices of |Delta w - lambda w|, relative to max w.
inline double eigen_residual(const WeightedGraph& g, double lambda, const VertexFunction& values,
                             const std::vector<VertexId>& at) {
    require_domain(g, values);
    VertexFunction lap = apply_laplacian(g, values);
    double worst = 0.0;
    for (VertexId x : at) worst = std::max(worst, std::abs(lap[x] - lambda * values[x]));
    double scale = max_abs(values);
    return scale > 0.0 ? worst / scale : worst;
}

/// Solve the exhaustion boundary-value problem Delta w = lambda w on the
/// interior B_{N-1} with w = 1 on the truncation sphere, then normalize
/// w(root) = 1. Admissibility gate: lambda must clear the bottom Dirichlet
/// eigenvalue of the interior by the given margin, otherwise the system loses
/// definiteness and no positive solution exists (NotAdmissible).
inline Eigenfunction construct_positive_eigenfunction(const WeightedGraph& g,
                                                      const BallDecomposition& balls,
                                                      double lambda, double tol = 1e-10,
                                                      double margin = 1e-6) {
    if (!g.truncation_radius())
        raise(ErrorKind::radius_too_small, "eigenfunction construction needs a truncation");
    const int radius = *g.truncation_radius();
    if (radius < 3) raise(ErrorKind::radius_too_small, "truncation radius must be >= 3");
    if (balls.root != canonical_root(g) && !g.contains(balls.root))
        raise(ErrorKind::unknown_vertex, "ball decomposition root not in graph");

    DirichletOperator op = assemble_dirichlet(g, balls, radius);
    const double bottom = dirichlet_bottom_eigenvalue(op).value;
    if (lambda < -bottom + margin)
        raise(ErrorKind::not_admissible,
              "lambda = " + std::to_string(lambda) + " is below the admissible threshold " +
                  std::to_string(-bottom) + " of this truncation");

    const int n = op.size();
    std::vector<double> rhs(n);
    for (int i = 0; i < n; ++i) rhs[i] = op.boundary_weight(i) / op.measure_local(i);

    SparseSystem sys = shifted_dirichlet_system(op, lambda);
    std::vector<double> w_int;
    solve_spd(sys, rhs, w_int, 1e-13);

    Eigenfunction ef;
    ef.graph = &g;
    ef.lambda = lambda;
    ef.root = balls.root;
    ef.values.assign(g.vertex_count(), 1.0); // boundary datum
    for (int i = 0; i < n; ++i) ef.values[op.interior()[i]] = w_int[i];

    double interior_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) interior_min = std::min(interior_min, w_int[i]);
    if (!(interior_min > 0.0))
        raise(ErrorKind::not_admissible,
              "solve produced a sign-changing field (lambda too close to the threshold)");

    const double at_root = ef.values[balls.root];
    for (double& v : ef.values) v /= at_root;

    ef.residual = eigen_residual(g, lambda, ef.values, op.interior());
    if (ef.residual > tol)
        raise(ErrorKind::solve_failure,
              "residual " + std::to_string(ef.residual) + " exceeds tolerance");
    ef.positivity = Positivity::strictly_positive;
    return ef;
}

/// Dichotomy check for nonnegative eigenfunctions: a zero anywhere in the
/// interior forces the function to vanish identically. Returns true when the
/// instance satisfies the dichotomy; inputs that are not near-eigenfunctions
/// (residual above tol) or not nonnegative are rejected.
inline bool verify_zero_propagation(const WeightedGraph& g, const Eigenfunction& w,
                                    double tol = 1e-8) {
    require_domain(g, w.values);
    BallDecomposition balls = decompose_balls(g, w.root);
    std::vector<VertexId> interior = interior_vertices(g, balls);

    double scale = max_abs(w.values);
    for (VertexId x : interior)
        if (w.values[x] < -tol * std::max(scale, 1.0))
            raise(ErrorKind::not_an_eigenfunction, "field is not nonnegative");
    double residual = eigen_residual(g, w.lambda, w.values, interior);
    if (residual > tol)
        raise(ErrorKind::not_an_eigenfunction,
              "residual " + std::to_string(residual) + " too large for a zero-propagation check");

    std::size_t zeros = 0;
    for (VertexId x : interior)
        if (std::abs(w.values[x]) <= tol) ++zeros;
    return zeros == 0 || zeros == interior.size();
}

/// Ball maxima M_n = max_{B_n} w, their successive ratios, and crude
/// exponential-rate envelopes ln(M_n)/n over a tail window that excludes the
/// two outermost spheres (boundary layer of the truncation).
struct GrowthProfile {
    VertexId root = 0;
    std::vector<double> M;      // indexed by n = 0..max_radius
    std::vector<double> ratios; // ratios[n] = M_{n+1} / M_n
    double rate_upper = 0.0;    // max over tail of ln(M_n)/n
    double rate_lower = 0.0;    // min over tail of ln(M_n)/n
    int tail_start = 1;
};

inline GrowthProfile growth_profile(const Eigenfunction& w, const BallDecomposition& balls,
                                    double tail_fraction = 0.5) {
    if (!(tail_fraction > 0.0 && tail_fraction < 1.0))
        raise(ErrorKind::invalid_param, "tail_fraction must lie in (0,1)");
    if (balls.root != w.root)
        raise(ErrorKind::domain_mismatch, "ball decomposition rooted elsewhere");

    GrowthProfile profile;
    profile.root = w.root;
    double running = -std::numeric_limits<double>::infinity();
    for (const auto& sphere : balls.spheres) {
        for (VertexId x : sphere) running = std::max(running, w.values[x]);
        profile.M.push_back(running);
    }
    for (std::size_t n = 0; n + 1 < profile.M.size(); ++n)
        profile.ratios.push_back(profile.M[n] > 0.0
                                     ? profile.M[n + 1] / profile.M[n]
                                     : std::numeric_limits<double>::quiet_NaN());

    const int radius = w.graph && w.graph->truncation_radius() ? *w.graph->truncation_radius()
                                                               : balls.max_radius;
    int tail_end = std::max(1, radius - 2);
    profile.tail_start = std::clamp(static_cast<int>(std::ceil(tail_fraction * radius)), 1, tail_end);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int n = profile.tail_start; n <= tail_end && n < static_cast<int>(profile.M.size()); ++n) {
        double r = std::log(profile.M[n]) / n;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    profile.rate_lower = lo;
    profile.rate_upper = hi;
    return profile;
}

struct RatioRow {
    int n = 0;
    double M = 0.0;
    double ratio = 0.0; // M_{n+1}/M_n, NaN on the last row
    bool pass = true;
};

/// Growth-bound audit for a positive eigenfunction profile.
/// Lower per-step bound (lambda > 0):  M_{n+1}/M_n >= (c0^3 + lambda)/c0^3.
/// Upper per-step bound (lambda >= 0): one-step comparison of neighbor values
/// gives w(y) <= c0^2 (lambda + c0^3) w(x), hence the same cap on ball maxima.
/// The upper constant is this artifact's own explicit bound.
struct GrowthBoundReport {
    double lambda = 0.0;
    double c0 = 1.0;
    double ratio_lower_bound = 1.0;          // (c0^3+lambda)/c0^3, 1 when lambda = 0
    double ratio_upper_bound = 1.0;          // c0^2 (lambda + c0^3)
    double rate_lower_bound = 0.0;           // ln of ratio_lower_bound
    double rate_upper_bound = 0.0;           // ln of ratio_upper_bound
    bool lower_bound_applicable = false;     // lambda > 0 only
    bool rate_lower_ok = true;
    bool rate_upper_ok = true;
    bool ratios_ok = true;
    std::vector<RatioRow> rows;
    bool pass = true;
};

inline GrowthBoundReport check_growth_bounds(const GrowthProfile& profile, double lambda,
                                             const GeometryCertificate& cert,
                                             double slack = 0.05) {
    if (lambda < 0.0)
        raise(ErrorKind::lambda_out_of_range, "growth bounds need lambda >= 0");
    GrowthBoundReport report;
    report.lambda = lambda;
    report.c0 = cert.c0;
    const double c03 = cert.c0 * cert.c0 * cert.c0;
    report.lower_bound_applicable = lambda > 0.0;
    report.ratio_lower_bound = report.lower_bound_applicable ? (c03 + lambda) / c03 : 1.0;
    report.ratio_upper_bound = cert.c0 * cert.c0 * (lambda + c03);
    report.rate_lower_bound = std::log(report.ratio_lower_bound);
    report.rate_upper_bound = std::log(report.ratio_upper_bound);

    if (report.lower_bound_applicable)
        report.rate_lower_ok = profile.rate_lower >= report.rate_lower_bound - slack;
    report.rate_upper_ok = profile.rate_upper <= report.rate_upper_bound + slack;

    const double fp_slack = 1e-12;
    for (std::size_t n = 0; n < profile.M.size(); ++n) {
        RatioRow row;
        row.n = static_cast<int>(n);
        row.M = profile.M[n];
        if (n < profile.ratios.size()) {
            row.ratio = profile.ratios[n];
            row.pass = row.ratio >= report.ratio_lower_bound * (1.0 - fp_slack) &&
                       row.ratio <= report.ratio_upper_bound * (1.0 + fp_slack);
            if (!row.pass) report.ratios_ok = false;
        } else {
            row.ratio = std::numeric_limits<double>::quiet_NaN();
        }
        report.rows.push_back(row);
    }
    report.pass = report.rate_lower_ok && report.rate_upper_ok && report.ratios_ok;
    return report;
}

struct HarnackEdgeViolation {
    VertexId x = -1;
    VertexId y = -1;
    double ratio = 0.0;
};

/// One-step comparison for a positive lambda-eigenfunction (lambda >= 0):
/// for every interior x and every neighbor y, w(y)/w(x) <= c0^2 (lambda + c0^3).
/// Returns the violating directed pairs (empty on pass).
inline std::vector<HarnackEdgeViolation> one_step_harnack_violations(
    const WeightedGraph& g, const Eigenfunction& w, const BallDecomposition& balls,
    const GeometryCertificate& cert) {
    const double c03 = cert.c0 * cert.c0 * cert.c0;
    const double bound = cert.c0 * cert.c0 * (std::max(w.lambda, 0.0) + c03);
    std::vector<HarnackEdgeViolation> out;
    for (VertexId x : interior_vertices(g, balls)) {
        if (!(w.values[x] > 0.0)) {
            out.push_back({x, x, 0.0});
            continue;
        }
        for (const auto& [y, weight] : g.neighbors(x)) {
            (void)weight;
            double ratio = w.values[y] / w.values[x];
            if (ratio > bound * (1.0 + 1e-12)) out.push_back({x, y, ratio});
        }
    }
    return out;
}

} // namespace heatlab
