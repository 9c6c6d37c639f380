#include "frackpz/errors.hpp"
#include "frackpz/nonexist.hpp"

#include <doctest.h>

#include "oracle_helpers.hpp"

#include <cmath>

using namespace frackpz;

TEST_CASE("torsion functions approach the closed forms") {
    auto g = make_grid(Domain::interval(-1.0, 1.0), 2.0 / 256);
    const Field phi = torsion_function(g, 0.5);
    const Field psi = torsion_function(g, 0.25);
    // values at the node nearest the center
    int c = 0;
    for (int i = 0; i < g->node_count(); ++i)
        if (std::abs(g->nodes()[i][0]) < std::abs(g->nodes()[c][0])) c = i;
    CHECK(phi.values[c] == doctest::Approx(1.0).epsilon(0.05));
    const double lam = std::sqrt(oracle::kPi) / 2.0; // Getoor constant at sigma = 1/4
    CHECK(psi.values[c] == doctest::Approx(1.0 / lam).epsilon(0.05));
}

TEST_CASE("torsion positivity across shapes and orders") {
    CounterRng rng(12);
    const Domain shapes[3] = {Domain::interval(-0.8, 1.3), Domain::disk({0.2, -0.1}, 0.9),
                              Domain::square({-0.4, -0.6}, 1.1)};
    for (int k = 0; k < 10; ++k) {
        const Domain& dom = shapes[k % 3];
        const double sigma = rng.uniform(0.15, 0.85);
        auto g = make_grid(dom, dom.diameter() / (dom.dimension() == 1 ? 48 : 14));
        const Field phi = torsion_function(g, sigma);
        CHECK(phi.values.minCoeff() > 0.0);
    }
}

TEST_CASE("boundary envelope of the exact profile") {
    auto g = make_grid(Domain::interval(-1.0, 1.0), 2.0 / 512);
    Field exact = make_field(g, [](const Point& x) {
        return std::sqrt(std::max(0.0, 1.0 - x[0] * x[0]));
    });
    const EnvelopePair env = boundary_envelope(exact, 0.5);
    // phi/delta^s = (1+|x|)^{1/2} ranges over [1, sqrt(2)) on the nodes
    CHECK(env.lo >= 1.0);
    CHECK(env.lo <= 1.05);
    CHECK(env.hi <= std::sqrt(2.0));
    CHECK(env.hi >= 1.35);
    CHECK(env.certified() >= 1.0);

    CHECK_THROWS_AS(boundary_envelope(exact, 0.0), validation_error);
    auto tiny = make_grid(Domain::interval(-1.0, 1.0), 0.4);
    Field small = make_field(tiny, 1.0);
    CHECK_THROWS_AS(boundary_envelope(small, 0.5), validation_error); // < 10 usable nodes
}

TEST_CASE("certified envelope constant drifts slowly under refinement") {
    double prev = -1.0;
    for (int n : {256, 512}) {
        auto g = make_grid(Domain::interval(-1.0, 1.0), 2.0 / n);
        const Field phi = torsion_function(g, 0.5);
        const double c0 = boundary_envelope(phi, 0.5).certified();
        CHECK(c0 < 10.0);
        if (prev > 0.0) CHECK(std::abs(c0 - prev) / prev < 0.10);
        prev = c0;
    }
}

TEST_CASE("lambda** for the half-Laplacian variant") {
    auto g = make_grid(Domain::interval(-1.0, 1.0), 2.0 / 512);
    Field f = make_field(g, 1.0);

    SUBCASE("hypotheses enforced") {
        try {
            lambda_starstar_kpz1(g, 0.5, 0.5, 1.1, 1.0, f);
            FAIL("q hypothesis should reject");
        } catch (const validation_error& e) {
            CHECK(std::string(e.what()).find("2(s+1)/(t+2)") != std::string::npos);
        }
        CHECK_THROWS_AS(lambda_starstar_kpz1(g, 0.5, 0.5, 2.0, 0.0, f), validation_error);
        CHECK_THROWS_AS(lambda_starstar_kpz1(g, 0.5, 0.5, 2.0, 1.0, make_field(g, 0.0)),
                        validation_error);
    }
    SUBCASE("homogeneities are exact formula identities") {
        const NonexistenceBundle b1 = lambda_starstar_kpz1(g, 0.5, 0.5, 2.0, 1.0, f);
        const NonexistenceBundle b2 = lambda_starstar_kpz1(g, 0.5, 0.5, 2.0, 2.0, f);
        CHECK(b2.lambda_ss ==
              doctest::Approx(b1.lambda_ss * std::pow(2.0, -1.0)).epsilon(1e-14));
        Field f2 = make_field(g, 2.0);
        const NonexistenceBundle b3 = lambda_starstar_kpz1(g, 0.5, 0.5, 2.0, 1.0, f2);
        CHECK(b3.lambda_ss == doctest::Approx(0.5 * b1.lambda_ss).epsilon(1e-14));
    }
    SUBCASE("matches the closed-form quadrature oracle") {
        const NonexistenceBundle b = lambda_starstar_kpz1(g, 0.5, 0.5, 2.0, 1.0, f);
        CHECK(b.c_q == doctest::Approx(0.25).epsilon(1e-15));
        CHECK(b.lambda_ss ==
              doctest::Approx(oracle::lambda_ss_closed_form()).epsilon(0.05));
        CHECK(b.c0_phi < 10.0);
        CHECK(b.c0_psi < 10.0);
    }
}

TEST_CASE("lambda** for the stein variant") {
    auto g = make_grid(Domain::interval(-1.0, 1.0), 2.0 / 256);
    Field f = make_field(g, 1.0);

    SUBCASE("single bump: the infimum is its own quotient") {
        std::vector<Field> one = default_bump_family(g, 1);
        const Kpz3Threshold res = lambda_starstar_kpz3(g, 0.6, 0.5, 2.0, 1.0, f, one);
        REQUIRE(res.bumps.size() == 1);
        CHECK(res.lambda_ss ==
              doctest::Approx(res.bumps[0].numerator / res.bumps[0].denominator).epsilon(1e-14));
    }
    SUBCASE("bump scaling leaves the quotient unchanged") {
        std::vector<Field> fam = default_bump_family(g, 1);
        const double base = lambda_starstar_kpz3(g, 0.6, 0.5, 2.0, 1.0, f, fam).lambda_ss;
        fam[0].values *= 17.0;
        const double scaled = lambda_starstar_kpz3(g, 0.6, 0.5, 2.0, 1.0, f, fam).lambda_ss;
        CHECK(scaled == doctest::Approx(base).epsilon(1e-12));
    }
    SUBCASE("default family produces a positive infimum with recorded constants") {
        const Kpz3Threshold res =
            lambda_starstar_kpz3(g, 0.6, 0.5, 2.0, 1.0, f, default_bump_family(g));
        CHECK(res.lambda_ss > 0.0);
        CHECK(res.c_q_young == doctest::Approx(0.25));
        CHECK(res.c_q_mvt == doctest::Approx(2.0));
        CHECK(res.kernel_split > 0.0);
        CHECK(res.chain_constant ==
              doctest::Approx(res.c_q_young * std::pow(2.0 * res.c_q_mvt * res.kernel_split,
                                                       2.0)).epsilon(1e-13));
        int admissible = 0;
        for (const auto& row : res.bumps) admissible += row.admissible ? 1 : 0;
        CHECK(admissible == 8);
    }
    SUBCASE("conjugate order is enforced") {
        // 2s - t must lie in (0,1): s=0.9, t=0.7 gives 1.1
        CHECK_THROWS_AS(lambda_starstar_kpz3(g, 0.9, 0.7, 2.0, 1.0, f, default_bump_family(g)),
                        validation_error);
    }
}

TEST_CASE("non-existence chain check") {
    auto g = make_grid(Domain::interval(-1.0, 1.0), 2.0 / 256);
    Field mu = make_field(g, 1.0), f = make_field(g, 1.0);
    ProblemSpec sp = ProblemSpec::make(g, 0.6, 0.5, 2.0, 0.01, mu, f, 2.0,
                                       GradientVariant::half_laplacian);
    const NonexistenceBundle bundle = lambda_starstar_kpz1(g, 0.6, 0.5, 2.0, 1.0, f);

    SUBCASE("zero candidate misses by exactly lambda int f phi") {
        const Field zero = make_field(g, 0.0);
        const ChainCheckReport rep = nonexistence_chain_check(zero, bundle, sp);
        double expect = 0.0;
        for (int i = 0; i < g->node_count(); ++i)
            expect += 0.01 * f.values[i] * bundle.phi.values[i] * g->cell_measure();
        CHECK(rep.gap41 == doctest::Approx(expect).epsilon(1e-12));
        CHECK(rep.gap43 == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(rep.young_ok);
    }
    SUBCASE("converged iterates close the identities to solver scale") {
        GreenOperator green(g, 0.6);
        const double tol = 1e-11;
        auto [u, it] = iterate(sp, green, make_field(g, 0.0), 200, tol);
        REQUIRE(it.converged);
        const ChainCheckReport rep = nonexistence_chain_check(u, bundle, sp);
        const double scale = 1.0 + u.values.cwiseAbs().maxCoeff();
        CHECK(rep.gap41 <= 10.0 * tol * scale);
        CHECK(rep.gap43 <= 1e-10 * scale); // exact by matrix symmetry
        CHECK(rep.young_ok);
    }
    SUBCASE("the duality gap scales with the solver tolerance") {
        GreenOperator green(g, 0.6);
        for (double tol : {1e-6, 1e-10}) {
            auto [u, it] = iterate(sp, green, make_field(g, 0.0), 300, tol);
            REQUIRE(it.converged);
            const ChainCheckReport rep = nonexistence_chain_check(u, bundle, sp);
            CHECK(rep.gap41 <= 50.0 * tol * (1.0 + u.values.cwiseAbs().maxCoeff()));
        }
    }
}

TEST_CASE("sandwich: the empirical blow-up stays below lambda**") {
    auto g = make_grid(Domain::interval(-1.0, 1.0), 2.0 / 96);
    GreenOperator green(g, 0.6);
    CounterRng rng(1);
    Field mu = make_field(g, 1.0), f = make_field(g, 1.0);
    ProblemSpec sp = ProblemSpec::make(g, 0.6, 0.5, 2.0, 0.0, mu, f, 2.0,
                                       GradientVariant::half_laplacian);
    const double lam_ss = lambda_starstar_kpz1(g, 0.6, 0.5, 2.0, 1.0, f).lambda_ss;
    std::vector<double> lambdas;
    for (int k = 1; k <= 12; ++k) lambdas.push_back(lam_ss * 0.1 * k);
    const SweepReport rep = lambda_sweep(sp, lambdas, green, 250, 1e-10);
    if (std::isfinite(rep.largest_converged)) CHECK(rep.largest_converged <= lam_ss * (1.0 + 1e-9));
}
