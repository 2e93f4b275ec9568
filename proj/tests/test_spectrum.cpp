#include <doctest.h>

#include <functional>

#include "heatlab/dense_eigen.hpp"
#include "heatlab/rng.hpp"
#include "heatlab/spectrum.hpp"
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

} // namespace

TEST_CASE("dirichlet_bottom_eigenvalue: frozen small cases") {
    // single interior vertex of the unit lattice ball: -Delta_D = [2]
    WeightedGraph b1 = generate_family(Family::lattice_Z, 1);
    BallDecomposition balls1 = decompose_balls(b1, 1);
    DirichletEigenpair single = dirichlet_bottom_eigenvalue(assemble_dirichlet(b1, balls1, 1));
    CHECK(single.value == doctest::Approx(2.0));
    REQUIRE(single.vector.size() == 1);
    CHECK(single.vector[0] == doctest::Approx(1.0));

    // 3 interior path vertices: tridiag(-1, 2, -1), bottom 2 - sqrt(2)
    WeightedGraph b2 = generate_family(Family::lattice_Z, 2);
    BallDecomposition balls2 = decompose_balls(b2, 2);
    DirichletEigenpair three = dirichlet_bottom_eigenvalue(assemble_dirichlet(b2, balls2, 2));
    CHECK(three.value == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-10));

    // 2 interior vertices: eigenvalues of [[2,-1],[-1,2]] are 1 and 3
    WeightedGraph p4 = generate_family(Family::path, 4);
    DirichletOperator op(p4, {1, 2}, 1, 1);
    DirichletEigenpair two = dirichlet_bottom_eigenvalue(op);
    CHECK(two.value == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("dirichlet_bottom_eigenvalue: residual contract and Perron positivity") {
    WeightedGraph g = generate_family(Family::tree_regular, 6, 3);
    BallDecomposition balls = decompose_balls(g, 0);
    DirichletOperator op = assemble_dirichlet(g, balls, 6);
    const double tol = 1e-8;
    DirichletEigenpair pair = dirichlet_bottom_eigenvalue(op, tol);

    // residual in the m-weighted norm, measured independently
    const int n = op.size();
    std::vector<double> Av(n);
    op.apply_neg(pair.vector, Av);
    double rn = 0.0, vn = 0.0, vmax = 0.0;
    for (int i = 0; i < n; ++i) {
        double r = Av[i] - pair.value * pair.vector[i];
        rn += op.measure_local(i) * r * r;
        vn += op.measure_local(i) * pair.vector[i] * pair.vector[i];
        vmax = std::max(vmax, std::abs(pair.vector[i]));
    }
    CHECK(std::sqrt(rn) <= tol * std::sqrt(vn) * 1.01);
    CHECK(vmax == doctest::Approx(1.0));
    for (double v : pair.vector) CHECK(v > 0.0); // ground state is strictly positive
}

TEST_CASE("exhaustion on the lattice matches the closed-form Dirichlet values") {
    WeightedGraph g = generate_family(Family::lattice_Z, 20);
    BallDecomposition balls = decompose_balls(g, canonical_root(g));
    SpectrumEstimate est = estimate_lambda1_exhaustion(g, balls, 1e-12);
    for (const auto& [n, value] : est.per_radius)
        CHECK(value == doctest::Approx(oracles::lattice_dirichlet_bottom(n)).epsilon(1e-9));
    for (std::size_t i = 1; i < est.per_radius.size(); ++i)
        CHECK(est.per_radius[i].second <= est.per_radius[i - 1].second + 1e-12);
}

TEST_CASE("exhaustion on the 3-regular tree matches two independent oracles") {
    WeightedGraph g = generate_family(Family::tree_regular, 9, 3);
    BallDecomposition balls = decompose_balls(g, 0);
    SpectrumEstimate est = estimate_lambda1_exhaustion(g, balls, 1e-12);

    // radial-reduction tridiagonal (Sturm bisection)
    for (const auto& [n, value] : est.per_radius)
        CHECK(value == doctest::Approx(oracles::tree_dirichlet_bottom_radial(3, n)).epsilon(1e-9));

    // structure-free dense Jacobi cross-check at one radius
    DirichletOperator op = assemble_dirichlet(g, balls, 5);
    auto dense = oracles::dense_dirichlet_sym(g, op.interior());
    double jacobi_bottom = oracles::jacobi_eigenvalues(dense).front();
    bool found = false;
    for (const auto& [n, value] : est.per_radius)
        if (n == 5) {
            CHECK(value == doctest::Approx(jacobi_bottom).epsilon(1e-9));
            found = true;
        }
    CHECK(found);
}

TEST_CASE("2d lattice Dirichlet bottom agrees with the dense Jacobi oracle") {
    // the interior here is not a forest, so this exercises the CG path
    WeightedGraph g = generate_family(Family::lattice_Z2, 4);
    BallDecomposition balls = decompose_balls(g, canonical_root(g));
    DirichletOperator op = assemble_dirichlet(g, balls, 4);
    DirichletEigenpair pair = dirichlet_bottom_eigenvalue(op);
    auto dense = oracles::dense_dirichlet_sym(g, op.interior());
    CHECK(pair.value ==
          doctest::Approx(oracles::jacobi_eigenvalues(dense).front()).epsilon(1e-9));
    for (double v : pair.vector) CHECK(v > 0.0);
}

TEST_CASE("tree exhaustion: extrapolated estimate reaches 3 - 2 sqrt(2)") {
    WeightedGraph g = generate_family(Family::tree_regular, 12, 3);
    BallDecomposition balls = decompose_balls(g, 0);
    SpectrumEstimate est = estimate_lambda1_exhaustion(g, balls);
    const double target = 3.0 - 2.0 * std::sqrt(2.0);
    // raw value is still far (the Dirichlet sequence decays ~ 1/n^2) ...
    CHECK(est.lambda1 > target + 5e-2);
    // ... while the 1/(n+s)^2 tail fit lands within table tolerance
    CHECK(std::abs(est.lambda1_extrapolated - target) <= 1e-2);
}

TEST_CASE("exhaustion guards") {
    WeightedGraph cycle = generate_family(Family::cycle, 8);
    BallDecomposition balls = decompose_balls(cycle, 0);
    CHECK(throws_kind(ErrorKind::radius_too_small,
                      [&] { estimate_lambda1_exhaustion(cycle, balls); }));

    WeightedGraph tiny = generate_family(Family::lattice_Z, 2);
    BallDecomposition tiny_balls = decompose_balls(tiny, 2);
    CHECK(throws_kind(ErrorKind::radius_too_small,
                      [&] { estimate_lambda1_exhaustion(tiny, tiny_balls); }));
}

TEST_CASE("dense eigensolver agrees with Jacobi rotations on a random symmetric matrix") {
    // also validates the machinery behind the spectral heat solver
    SplitMix64 rng(321);
    const int n = 30;
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            double v = rng.uniform(-1.0, 1.0);
            a[i][j] = v;
            a[j][i] = v;
        }
    SymmetricEigen eig = dense_symmetric_eigen(a);
    std::vector<double> reference = oracles::jacobi_eigenvalues(a);
    REQUIRE(eig.values.size() == reference.size());
    for (int k = 0; k < n; ++k)
        CHECK(eig.values[k] == doctest::Approx(reference[k]).epsilon(1e-10));
    // eigenpair residuals A v = theta v
    for (int k = 0; k < n; ++k) {
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            double av = 0.0;
            for (int j = 0; j < n; ++j) av += a[i][j] * eig.vectors[k][j];
            worst = std::max(worst, std::abs(av - eig.values[k] * eig.vectors[k][i]));
        }
        CHECK(worst <= 1e-10);
    }
}

TEST_CASE("bottom_of_spectrum_finite is zero on connected finite graphs") {
    CHECK(std::abs(bottom_of_spectrum_finite(generate_family(Family::cycle, 4))) <= 1e-9);
    CHECK(std::abs(bottom_of_spectrum_finite(generate_family(Family::path, 3))) <= 1e-9);
    WeightedGraph weighted({0.5, 2.0, 1.5}, {{0, 1, 0.25}, {1, 2, 4.0}});
    CHECK(std::abs(bottom_of_spectrum_finite(weighted)) <= 1e-9);
}
