#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "heatlab/heat.hpp"

namespace heatlab {

/// Growth classification of an ancient solution against the subexponential
/// hypotheses: spatially along ball maxima at a fixed time t_star, temporally
/// at the root as t -> -infinity. Rates are clamped at zero: decay counts as
/// subexponential, only genuine exponential growth registers.
struct GrowthClassification {
    double spatial_rate = 0.0;
    double temporal_rate = 0.0;
    bool spatial_subexponential = true;
    bool temporal_subexponential = true;
    double t_star = -1.0;
    VertexId y0 = 0;
    double rate_tol = 0.02;
};

enum class MeasureSupport { only_zero, has_positive_atom, has_negative_atom };

inline std::string_view to_string(MeasureSupport s) {
    switch (s) {
        case MeasureSupport::only_zero: return "only_zero";
        case MeasureSupport::has_positive_atom: return "has_positive_atom";
        case MeasureSupport::has_negative_atom: return "has_negative_atom";
    }
    return "unknown";
}

struct LiouvilleVerdict {
    GrowthClassification classification;
    MeasureSupport support = MeasureSupport::only_zero;
    bool stationary = false;
    bool harmonic = false;
    bool consistent_with_theorem = false;
};

namespace detail {

/// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t k = xs.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(k);
    my /= static_cast<double>(k);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
    }
    if (!(den > 0.0)) raise(ErrorKind::degenerate_window, "tail fit needs distinct abscissae");
    return num / den;
}

} // namespace detail

/// Estimate the spatial rate (slope of n -> ln max_{sphere n} u(., t_star)
/// over the interior tail window) and the temporal rate (slope of
/// -t -> ln u(root, t) over the most negative grid times).
inline GrowthClassification classify_growth(const AncientSolution& sol,
                                            const BallDecomposition& balls, double t_star,
                                            const std::vector<double>& time_grid,
                                            double rate_tol = 0.02,
                                            double tail_fraction = 0.5) {
    if (t_star >= sol.horizon())
        raise(ErrorKind::out_of_domain, "t_star must lie below the horizon");
    for (double t : time_grid)
        if (t >= sol.horizon()) raise(ErrorKind::out_of_domain, "time grid crosses the horizon");

    GrowthClassification cls;
    cls.t_star = t_star;
    cls.y0 = balls.root;
    cls.rate_tol = rate_tol;

    const WeightedGraph& g = sol.graph();
    const int radius = g.truncation_radius() ? *g.truncation_radius() : balls.max_radius;
    int tail_end = radius - 2;
    int tail_start = std::max(1, static_cast<int>(std::ceil(tail_fraction * radius)));
    if (tail_end < tail_start || tail_end - tail_start + 1 < 2)
        raise(ErrorKind::degenerate_window, "spatial tail window has fewer than 2 spheres");

    VertexFunction u = sol.field(t_star);
    std::vector<double> xs, ys;
    for (int n = tail_start; n <= tail_end && n <= balls.max_radius; ++n) {
        double mx = 0.0;
        for (VertexId x : balls.spheres[n]) mx = std::max(mx, u[x]);
        if (!(mx > 0.0)) raise(ErrorKind::nonpositive_sample, "solution vanished on a sphere");
        xs.push_back(n);
        ys.push_back(std::log(mx));
    }
    cls.spatial_rate = std::max(0.0, detail::fit_slope(xs, ys));

    std::vector<double> grid = time_grid;
    std::sort(grid.begin(), grid.end());
    std::size_t points = std::min<std::size_t>(4, grid.size());
    if (points < 2) raise(ErrorKind::degenerate_window, "temporal grid has fewer than 2 points");
    xs.clear();
    ys.clear();
    for (std::size_t i = 0; i < points; ++i) {
        double uval = sol.value(cls.y0, grid[i]);
        if (!(uval > 0.0)) raise(ErrorKind::nonpositive_sample, "solution not positive at root");
        xs.push_back(-grid[i]);
        ys.push_back(std::log(uval));
    }
    cls.temporal_rate = std::max(0.0, detail::fit_slope(xs, ys));

    cls.spatial_subexponential = cls.spatial_rate <= rate_tol;
    cls.temporal_subexponential = cls.temporal_rate <= rate_tol;
    return cls;
}

/// Combine the growth classification with what the measure actually contains
/// and check the dichotomy: subexponential growth in space and time forces a
/// measure supported at {0}, hence a stationary harmonic solution; a positive
/// atom forces spatial exponential growth; a negative atom forces temporal
/// exponential growth.
inline LiouvilleVerdict render_verdict(const AncientSolution& sol,
                                       const GrowthClassification& cls, double tol = 1e-8) {
    LiouvilleVerdict verdict;
    verdict.classification = cls;

    bool has_pos = false, has_neg = false;
    for (const SpectralAtom& a : sol.measure().atoms) {
        if (a.lambda > 1e-12) has_pos = true;
        if (a.lambda < -1e-12) has_neg = true;
    }
    verdict.support = has_pos   ? MeasureSupport::has_positive_atom
                      : has_neg ? MeasureSupport::has_negative_atom
                                : MeasureSupport::only_zero;

    const std::vector<double> times = {cls.t_star, cls.t_star - 10.0, cls.t_star - 40.0};
    std::vector<VertexFunction> fields;
    double umax = 0.0;
    for (double t : times) {
        fields.push_back(sol.field(t));
        umax = std::max(umax, max_abs(fields.back()));
    }
    double drift = 0.0;
    for (std::size_t i = 0; i + 1 < fields.size(); ++i)
        for (std::size_t j = i + 1; j < fields.size(); ++j)
            for (VertexId x : sol.domain())
                drift = std::max(drift, std::abs(fields[i][x] - fields[j][x]));
    verdict.stationary = umax > 0.0 && drift / umax <= tol;

    VertexFunction lap = apply_laplacian(sol.graph(), fields.front());
    double worst_lap = 0.0;
    for (VertexId x : sol.domain()) worst_lap = std::max(worst_lap, std::abs(lap[x]));
    verdict.harmonic = umax > 0.0 && worst_lap / umax <= tol;

    const bool both_subexponential = cls.spatial_subexponential && cls.temporal_subexponential;
    bool ok = true;
    if (both_subexponential)
        ok = verdict.support == MeasureSupport::only_zero && verdict.stationary && verdict.harmonic;
    if (has_pos && cls.spatial_subexponential) ok = false;
    if (has_neg && cls.temporal_subexponential) ok = false;
    verdict.consistent_with_theorem = ok;
    return verdict;
}

struct FamilySpec {
    Family family = Family::lattice_Z;
    std::optional<int> degree;

    std::string label() const {
        std::string s(to_string(family));
        if (degree) s += "-" + std::to_string(*degree);
        return s;
    }
};

struct SweepConfig {
    FamilySpec family;
    std::vector<double> lambdas;
    int radius = 10;
    std::uint64_t seed = 1;
    double t_star = -1.0;
    std::vector<double> time_grid = {-40, -35, -30, -25, -20, -15, -10};
    double rate_tol = 0.02;
    double verdict_tol = 1e-8;
    double construct_tol = 1e-10;
    double horizon = 0.0;
};

struct SweepRow {
    std::string family;
    double lambda = 0.0;
    int radius = 0;
    std::optional<LiouvilleVerdict> verdict;
    std::string error; // error kind when the row failed to build
};

/// Single-atom dichotomy sweep over a lambda grid: for each admissible
/// lambda, build e^{lambda t} w_lambda and record its verdict. Failed rows
/// (inadmissible lambda, solver trouble) are recorded, not fatal.
inline std::vector<SweepRow> dichotomy_sweep(const SweepConfig& config) {
    int radius = config.radius;
    // Slow spatial rates need a longer tail window to resolve against
    // rate_tol; raise the truncation radius for small positive lambdas.
    for (double l : config.lambdas)
        if (l > 0.0 && l < 0.5) radius = std::max(radius, 40);

    WeightedGraph g = generate_family(config.family.family, radius, config.family.degree);
    BallDecomposition balls = decompose_balls(g, canonical_root(g));
    SpectrumEstimate spectrum = estimate_lambda1_exhaustion(g, balls);

    std::vector<SweepRow> rows;
    for (double lambda : config.lambdas) {
        SweepRow row;
        row.family = config.family.label();
        row.lambda = lambda;
        row.radius = radius;
        try {
            Eigenfunction w =
                construct_positive_eigenfunction(g, balls, lambda, config.construct_tol);
            SpectralMeasure measure;
            measure.lambda1_reference = spectrum.lambda1;
            measure.atoms.push_back({lambda, 1.0, std::move(w)});
            AncientSolution sol = synthesize_ancient(measure, config.horizon);
            GrowthClassification cls =
                classify_growth(sol, balls, config.t_star, config.time_grid, config.rate_tol);
            row.verdict = render_verdict(sol, cls, config.verdict_tol);
        } catch (const Error& e) {
            row.error = std::string(to_string(e.kind()));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace heatlab
