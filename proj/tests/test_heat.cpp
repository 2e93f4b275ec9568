#include <doctest.h>

#include <functional>

#include "heatlab/heat.hpp"
#include "oracles.hpp"

using namespace heatlab;

namespace {

bool throws_kind(ErrorKind kind, const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind() == kind;
    }
    return false;
}

double mass_of(const WeightedGraph& g, const VertexFunction& u) {
    double s = 0.0;
    for (VertexId x = 0; x < g.vertex_count(); ++x) s += g.measure(x) * u[x];
    return s;
}

Eigenfunction constant_one(const WeightedGraph& g, VertexId root) {
    Eigenfunction w;
    w.graph = &g;
    w.lambda = 0.0;
    w.values.assign(g.vertex_count(), 1.0);
    w.residual = 0.0;
    w.positivity = Positivity::strictly_positive;
    w.root = root;
    return w;
}

} // namespace

TEST_CASE("step_heat_implicit: hat on P3 with tau = 1/2") {
    WeightedGraph p3 = generate_family(Family::path, 3);
    HeatState s{0.0, {0.0, 1.0, 0.0}};
    HeatState next = step_heat_implicit(p3, s, 0.5);
    CHECK(next.values[0] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(next.values[1] == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(next.values[2] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(mass_of(p3, next.values) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(next.time == doctest::Approx(0.5));

    HeatState flat{0.0, {2.5, 2.5, 2.5}};
    HeatState still = step_heat_implicit(p3, flat, 1.7);
    for (double v : still.values) CHECK(v == doctest::Approx(2.5).epsilon(1e-13));

    CHECK(throws_kind(ErrorKind::invalid_param, [&] { step_heat_implicit(p3, s, 0.0); }));
}

TEST_CASE("step_heat_implicit: positivity and mass on random nonnegative data") {
    SplitMix64 rng(2024);
    for (auto g : {generate_family(Family::cycle, 10), generate_family(Family::tree_regular, 3, 3)}) {
        for (int trial = 0; trial < 200; ++trial) {
            HeatState s;
            s.values.resize(g.vertex_count());
            for (double& v : s.values) v = rng.uniform01() < 0.2 ? 0.0 : rng.uniform(0.0, 5.0);
            double tau = rng.uniform(1e-3, 2.0);
            double m0 = mass_of(g, s.values);
            HeatState next = step_heat_implicit(g, s, tau);
            for (double v : next.values) CHECK(v >= -1e-12);
            CHECK(std::abs(mass_of(g, next.values) - m0) <= 1e-10 * std::max(1.0, std::abs(m0)));
        }
    }
}

TEST_CASE("solve_heat_spectral: P2 closed form and constants") {
    WeightedGraph p2 = generate_family(Family::path, 2);
    HeatState exact = solve_heat_spectral(p2, {1.0, 0.0}, 0.5);
    CHECK(exact.values[0] == doctest::Approx((1.0 + std::exp(-1.0)) / 2.0).epsilon(1e-12));
    CHECK(exact.values[1] == doctest::Approx((1.0 - std::exp(-1.0)) / 2.0).epsilon(1e-12));

    WeightedGraph c6 = generate_family(Family::cycle, 6);
    HeatState flat = solve_heat_spectral(c6, VertexFunction(6, 1.0), 3.0);
    for (double v : flat.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

    WeightedGraph big = generate_family(Family::path, 2001);
    CHECK(throws_kind(ErrorKind::too_large,
                      [&] { solve_heat_spectral(big, VertexFunction(2001, 0.0), 1.0); }));
}

TEST_CASE("implicit stepping converges to the spectral solution") {
    WeightedGraph p2 = generate_family(Family::path, 2);
    VertexFunction u0{1.0, 0.0};
    HeatState exact = solve_heat_spectral(p2, u0, 0.5);
    double previous_diff = 1e9;
    for (int k : {8, 32, 128}) {
        double tau = 0.5 / k;
        HeatState s{0.0, u0};
        for (int i = 0; i < k; ++i) s = step_heat_implicit(p2, s, tau);
        double diff = 0.0;
        for (int x = 0; x < 2; ++x) diff = std::max(diff, std::abs(s.values[x] - exact.values[x]));
        CHECK(diff <= 10.0 * tau * (1.0 + max_abs(u0)));
        CHECK(diff < previous_diff);
        previous_diff = diff;
    }

    // same comparison on a 20-vertex cycle with mixed data
    WeightedGraph c20 = generate_family(Family::cycle, 20);
    VertexFunction w0(20, 0.0);
    for (int i = 0; i < 20; ++i) w0[i] = (i % 3 == 0) ? 2.0 : 0.25;
    HeatState spectral = solve_heat_spectral(c20, w0, 1.0);
    double tau = 0.05;
    HeatState stepped{0.0, w0};
    for (int i = 0; i < 20; ++i) stepped = step_heat_implicit(c20, stepped, tau);
    double diff = 0.0;
    for (int x = 0; x < 20; ++x)
        diff = std::max(diff, std::abs(stepped.values[x] - spectral.values[x]));
    CHECK(diff <= 10.0 * tau * (1.0 + max_abs(w0)));
}

TEST_CASE("synthesize_ancient: validation of the measure invariants") {
    WeightedGraph g = generate_family(Family::lattice_Z, 12);
    BallDecomposition balls = decompose_balls(g, canonical_root(g));
    SpectrumEstimate est = estimate_lambda1_exhaustion(g, balls);

    SpectralMeasure bad_sum;
    bad_sum.lambda1_reference = est.lambda1;
    bad_sum.atoms.push_back({0.0, 0.5, constant_one(g, balls.root)});
    CHECK(throws_kind(ErrorKind::measure_not_normalized,
                      [&] { synthesize_ancient(bad_sum, 0.0); }));

    SpectralMeasure inadmissible;
    inadmissible.lambda1_reference = est.lambda1;
    Eigenfunction w = constant_one(g, balls.root);
    w.lambda = -0.5;
    inadmissible.atoms.push_back({-0.5, 1.0, w});
    CHECK(throws_kind(ErrorKind::admissibility_violation,
                      [&] { synthesize_ancient(inadmissible, 0.0); }));

    WeightedGraph other = generate_family(Family::lattice_Z, 12);
    SpectralMeasure mixed;
    mixed.lambda1_reference = est.lambda1;
    mixed.atoms.push_back({0.0, 0.5, constant_one(g, balls.root)});
    mixed.atoms.push_back({0.0, 0.5, constant_one(other, canonical_root(other))});
    CHECK(throws_kind(ErrorKind::mixed_domains, [&] { synthesize_ancient(mixed, 0.0); }));
}

TEST_CASE("synthesize_ancient: stationary atom is exactly time independent") {
    WeightedGraph g = generate_family(Family::lattice_Z, 12);
    BallDecomposition balls = decompose_balls(g, canonical_root(g));
    SpectralMeasure measure;
    measure.lambda1_reference = 0.0;
    measure.atoms.push_back({0.0, 1.0, constant_one(g, balls.root)});
    AncientSolution sol = synthesize_ancient(measure, 0.0);
    for (double t : {-40.0, -3.0, -0.1}) {
        CHECK(sol.value(balls.root, t) == 1.0);
        CHECK(sol.dt_value(balls.root, t) == 0.0); // closed-form derivative vanishes identically
    }
    CHECK(heat_residual(sol, {-5.0, -1.0}, sol.domain()) == 0.0);
}

TEST_CASE("heat_residual: single atom reduces to the eigenfunction residual") {
    WeightedGraph g = generate_family(Family::lattice_Z, 20);
    BallDecomposition balls = decompose_balls(g, canonical_root(g));
    Eigenfunction w = construct_positive_eigenfunction(g, balls, 1.0, 1e-10);
    SpectralMeasure measure;
    measure.lambda1_reference = 0.1;
    measure.atoms.push_back({1.0, 1.0, w});
    AncientSolution sol = synthesize_ancient(measure, 0.0);

    // |Delta u - du/dt|(x, t) = e^{lambda t} |Delta w - lambda w|(x), exactly
    VertexFunction lapw = apply_laplacian(g, measure.atoms[0].w.values);
    for (double t : {-2.0, -1.0}) {
        VertexFunction u = sol.field(t);
        VertexFunction lapu = apply_laplacian(g, u);
        for (VertexId x : balls.ball(5)) {
            double direct = std::abs(lapu[x] - sol.dt_value(x, t));
            double expected = std::exp(t) * std::abs(lapw[x] - measure.atoms[0].w.values[x]);
            CHECK(direct == doctest::Approx(expected).epsilon(1e-9));
        }
    }
}

TEST_CASE("heat_residual: two-atom lattice mixture stays below tolerance deep inside") {
    WeightedGraph g = generate_family(Family::lattice_Z, 30);
    BallDecomposition balls = decompose_balls(g, canonical_root(g));
    SpectrumEstimate est = estimate_lambda1_exhaustion(g, balls);
    Eigenfunction w1 = construct_positive_eigenfunction(g, balls, 1.0, 1e-10);

    SpectralMeasure measure;
    measure.lambda1_reference = est.lambda1;
    measure.atoms.push_back({1.0, 0.5, std::move(w1)});
    measure.atoms.push_back({0.0, 0.5, constant_one(g, balls.root)});
    AncientSolution sol = synthesize_ancient(measure, 0.0);

    std::vector<VertexId> deep = balls.ball(15);
    CHECK(heat_residual(sol, {-5.0, -1e-9}, deep) <= 1e-8);

    CHECK(throws_kind(ErrorKind::out_of_domain,
                      [&] { heat_residual(sol, {0.5}, deep); }));
    CHECK(throws_kind(ErrorKind::out_of_domain, [&] {
        heat_residual(sol, {-1.0}, {g.vertex_count() - 1}); // truncation sphere
    }));
}

TEST_CASE("audit_harnack: constants need no Harnack slack at all") {
    WeightedGraph g = generate_family(Family::lattice_Z, 10);
    BallDecomposition balls = decompose_balls(g, canonical_root(g));
    HarnackSampleSpec spec;
    spec.count = 200;
    spec.seed = 5;
    HarnackAudit audit =
        audit_harnack(g, balls, [](VertexId, double) { return 1.0; }, spec);
    CHECK(audit.fitted_c1 == doctest::Approx(0.0));
    CHECK(audit.fitted_c2 == doctest::Approx(0.0));
    CHECK(audit.max_violation <= 0.0);
    for (const HarnackSample& s : audit.samples) CHECK(s.lhs == doctest::Approx(0.0));
}

TEST_CASE("audit_harnack: single growing atom admits finite constants") {
    WeightedGraph g = generate_family(Family::lattice_Z, 30);
    BallDecomposition balls = decompose_balls(g, canonical_root(g));
    Eigenfunction w = construct_positive_eigenfunction(g, balls, 1.0);
    HarnackSampleSpec spec;
    spec.count = 1000;
    spec.seed = 99;
    spec.t_lo = -8.0;
    spec.t_hi = -1.0;
    auto u = [&](VertexId x, double t) { return std::exp(t) * w.values[x]; };
    HarnackAudit audit = audit_harnack(g, balls, u, spec);
    CHECK(std::isfinite(audit.fitted_c1));
    CHECK(std::isfinite(audit.fitted_c2));
    CHECK(audit.max_violation <= 0.0);

    // same-vertex samples obey u(x, t - a) <= u(x, t) e^{C1 a}
    for (const HarnackSample& s : audit.samples)
        if (s.rho == 0) CHECK(s.lhs <= audit.fitted_c1 * (s.t2 - s.t1) + 1e-12);

    // deterministic for a fixed seed
    HarnackAudit again = audit_harnack(g, balls, u, spec);
    REQUIRE(again.samples.size() == audit.samples.size());
    for (std::size_t i = 0; i < audit.samples.size(); ++i) {
        CHECK(again.samples[i].x == audit.samples[i].x);
        CHECK(again.samples[i].lhs == audit.samples[i].lhs);
    }

    auto zero_u = [](VertexId, double) { return 0.0; };
    CHECK(throws_kind(ErrorKind::nonpositive_sample,
                      [&] { audit_harnack(g, balls, zero_u, spec); }));
}

TEST_CASE("audit_harnack: atom growing backward in time still fits finitely") {
    WeightedGraph g = generate_family(Family::tree_regular, 8, 3);
    BallDecomposition balls = decompose_balls(g, 0);
    Eigenfunction w = construct_positive_eigenfunction(g, balls, -0.1);
    HarnackSampleSpec spec;
    spec.count = 400;
    spec.seed = 17;
    auto u = [&](VertexId x, double t) { return std::exp(-0.1 * t) * w.values[x]; };
    HarnackAudit audit = audit_harnack(g, balls, u, spec);
    CHECK(audit.max_violation <= 0.0);
    // the time part alone forces C1 >= |lambda| on same-vertex samples
    CHECK(audit.fitted_c1 >= 0.1 - 1e-9);
}
