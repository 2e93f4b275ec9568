#include <doctest.h>

#include <functional>

#include "heatlab/laplacian.hpp"
#include "heatlab/rng.hpp"

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

WeightedGraph unit_p3() { return generate_family(Family::path, 3); }

} // namespace

TEST_CASE("apply_laplacian: hat function on P3 and constants") {
    WeightedGraph p3 = unit_p3();
    VertexFunction lap = apply_laplacian(p3, {0.0, 1.0, 0.0});
    CHECK(lap[0] == doctest::Approx(1.0));
    CHECK(lap[1] == doctest::Approx(-2.0));
    CHECK(lap[2] == doctest::Approx(1.0));

    VertexFunction flat = apply_laplacian(p3, {3.7, 3.7, 3.7});
    GeometryCertificate cert = certify_bounded_geometry(p3);
    for (double v : flat) CHECK(std::abs(v) <= 1e-14 * 3.7 * cert.c0 * cert.c0);

    CHECK(throws_kind(ErrorKind::domain_mismatch,
                      [&] { apply_laplacian(p3, {1.0, 2.0}); }));
}

TEST_CASE("apply_laplacian: weighted path evaluates the definition") {
    WeightedGraph p3({1.0, 2.0, 1.0}, {{0, 1, 2.0}, {1, 2, 1.0}});
    VertexFunction lap = apply_laplacian(p3, {1.0, 0.0, 0.0});
    CHECK(lap[0] == doctest::Approx(-2.0));
    CHECK(lap[1] == doctest::Approx(1.0));
    CHECK(lap[2] == doctest::Approx(0.0));
}

TEST_CASE("laplacian identities: weighted symmetry and mass annihilation") {
    SplitMix64 rng(42);
    for (auto g : {generate_family(Family::lattice_Z2, 4), generate_family(Family::tree_regular, 5, 3),
                   generate_family(Family::cycle, 17)}) {
        const int n = g.vertex_count();
        VertexFunction f(n), h(n);
        for (int i = 0; i < n; ++i) {
            f[i] = rng.uniform(-1.0, 1.0);
            h[i] = rng.uniform(-1.0, 1.0);
        }
        VertexFunction lf = apply_laplacian(g, f);
        VertexFunction lh = apply_laplacian(g, h);
        double lhs = 0.0, rhs = 0.0, mass = 0.0, scale = 0.0;
        for (int i = 0; i < n; ++i) {
            lhs += g.measure(i) * h[i] * lf[i];
            rhs += g.measure(i) * f[i] * lh[i];
            mass += g.measure(i) * lf[i];
            scale += g.measure(i) * std::abs(lf[i]);
        }
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
        CHECK(std::abs(mass) <= 1e-12 * std::max(1.0, scale));
    }
}

TEST_CASE("laplacian identities hold at 10^4 vertices") {
    WeightedGraph g = generate_family(Family::lattice_Z, 5000); // 10001 vertices
    SplitMix64 rng(8);
    const int n = g.vertex_count();
    VertexFunction f(n), h(n);
    for (int i = 0; i < n; ++i) {
        f[i] = rng.uniform(-1.0, 1.0);
        h[i] = rng.uniform(-1.0, 1.0);
    }
    VertexFunction lf = apply_laplacian(g, f);
    VertexFunction lh = apply_laplacian(g, h);
    double lhs = 0.0, rhs = 0.0, mass = 0.0, scale = 0.0;
    for (int i = 0; i < n; ++i) {
        lhs += g.measure(i) * h[i] * lf[i];
        rhs += g.measure(i) * f[i] * lh[i];
        mass += g.measure(i) * lf[i];
        scale += g.measure(i) * std::abs(lf[i]);
    }
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
    CHECK(std::abs(mass) <= 1e-12 * std::max(1.0, scale));
}

TEST_CASE("assemble_dirichlet: structure on the lattice ball") {
    WeightedGraph g = generate_family(Family::lattice_Z, 2); // vertices -2..2 as 0..4
    BallDecomposition balls = decompose_balls(g, canonical_root(g));
    DirichletOperator op = assemble_dirichlet(g, balls, 2);
    REQUIRE(op.size() == 3); // interior = B_1 = {-1, 0, 1}
    // tridiagonal action: -Delta_D has 2 on the diagonal, -1 off
    CHECK(op.entry(2, 2) == doctest::Approx(-2.0));
    CHECK(op.entry(1, 2) == doctest::Approx(1.0));
    CHECK(op.entry(2, 1) == doctest::Approx(1.0));
    CHECK(op.entry(1, 3) == doctest::Approx(0.0));

    DirichletOperator root_only = assemble_dirichlet(g, balls, 1);
    REQUIRE(root_only.size() == 1);
    CHECK(root_only.entry(2, 2) == doctest::Approx(-2.0));

    CHECK(throws_kind(ErrorKind::radius_out_of_range, [&] { assemble_dirichlet(g, balls, 0); }));
    CHECK(throws_kind(ErrorKind::radius_out_of_range, [&] { assemble_dirichlet(g, balls, 3); }));
}

TEST_CASE("assemble_dirichlet: m-self-adjointness entrywise on a tree") {
    WeightedGraph g = generate_family(Family::tree_regular, 3, 3);
    BallDecomposition balls = decompose_balls(g, 0);
    DirichletOperator op = assemble_dirichlet(g, balls, 3);
    for (VertexId x : op.interior())
        for (VertexId y : op.interior())
            CHECK(g.measure(x) * op.entry(x, y) ==
                  doctest::Approx(g.measure(y) * op.entry(y, x)).epsilon(1e-13));
}

TEST_CASE("dirichlet quadratic form is negative semidefinite") {
    WeightedGraph g = generate_family(Family::lattice_Z2, 4);
    BallDecomposition balls = decompose_balls(g, canonical_root(g));
    DirichletOperator op = assemble_dirichlet(g, balls, 4);
    SplitMix64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> f(op.size()), neg(op.size());
        for (double& v : f) v = rng.uniform(-1.0, 1.0);
        op.apply_neg(f, neg);
        // sum m f (Delta_D f) = -sum m f (-Delta_D f) <= 0
        double quad = -op.inner_m(f, neg);
        CHECK(quad <= 1e-12);
    }
}

TEST_CASE("is_subharmonic: constants, eigen-identities, hat failure") {
    WeightedGraph p3 = unit_p3();
    CHECK(is_subharmonic(p3, {1.0, 1.0, 1.0}).subharmonic);

    SubharmonicReport hat = is_subharmonic(p3, {0.0, 1.0, 0.0});
    CHECK_FALSE(hat.subharmonic);
    REQUIRE(hat.violations.size() == 1);
    CHECK(hat.violations[0].first == 1);
    CHECK(hat.violations[0].second == doctest::Approx(-2.0));
}

TEST_CASE("check_maximum_principle: constants pass, hat is rejected") {
    WeightedGraph g = generate_family(Family::lattice_Z, 4);
    BallDecomposition balls = decompose_balls(g, canonical_root(g));
    CHECK(check_maximum_principle(g, balls, VertexFunction(g.vertex_count(), 2.5), 3));

    VertexFunction hat(g.vertex_count(), 0.0);
    hat[canonical_root(g)] = 1.0;
    CHECK(throws_kind(ErrorKind::not_subharmonic,
                      [&] { check_maximum_principle(g, balls, hat, 2); }));
}
