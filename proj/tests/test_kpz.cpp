#include "frackpz/errors.hpp"
#include "frackpz/kpz.hpp"
#include "frackpz/norms.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace frackpz;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

ProblemSpec reference_spec(std::shared_ptr<const Grid> grid, GradientVariant variant,
                           double lambda = 0.0) {
    Field mu = make_field(grid, 1.0);
    Field f = make_field(grid, 1.0);
    return ProblemSpec::make(std::move(grid), 0.6, 0.5, 2.0, lambda, std::move(mu), std::move(f),
                             2.0, variant);
}
} // namespace

TEST_CASE("qbar cases") {
    CHECK(qbar(3.0, 0.8, 0.5, 2) == kInf);
    CHECK(qbar(5.0, 0.5, 0.6, 2) == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(qbar(2.0, 0.5, 0.5, 2) == doctest::Approx(2.0).epsilon(1e-14));
    // monotone non-increasing in t at fixed (m,s,N)
    for (double m : {1.0, 2.0, 5.0}) {
        double prev = kInf;
        for (double t = 0.3; t < 0.72; t += 0.04) {
            const double v = qbar(m, 0.6, t, 2);
            CHECK(v <= prev * (1.0 + 1e-12));
            prev = v;
        }
    }
}

TEST_CASE("ptilde cases and boundary convention") {
    CHECK(ptilde(50.0, 0.5, 0.5, 1) == kInf);
    CHECK(ptilde(1.0, 0.5, 0.55, 2) == doctest::Approx(1.25).epsilon(1e-14));
    CHECK_THROWS_AS(ptilde(2.0, 0.6, 0.5, 1), validation_error);
    // at m = N/(2s-t) exactly, the min branch is used
    const double s = 0.5, t = 0.55;
    const int N = 2;
    const double m_edge = N / (2.0 * s - t);
    const double expect =
        std::min(m_edge * N / (N - m_edge * s + m_edge * N * (t - s)), 1.0 / (t - s));
    CHECK(ptilde(m_edge, s, t, N) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("mbar formula and range") {
    CHECK(mbar(0.5, 0.4, 2) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK(mbar(0.5, 0.6, 2) == doctest::Approx(4.0 / 2.6).epsilon(1e-14));
    for (int k = 0; k < 20; ++k) {
        const double s = 0.3 + 0.03 * k;
        const double t = std::min(0.95, s * (1.0 + 0.4 / 2.0));
        for (int N : {1, 2}) CHECK(mbar(s, t, N) < N / s);
    }
}

TEST_CASE("pick_r follows the stated selection rule") {
    auto grid1d = make_grid(Domain::interval(-1.0, 1.0), 2.0 / 32);
    auto grid2d = make_grid(Domain::disk({0.0, 0.0}, 1.0), 0.2);

    // t = s, m = 3 > N/s: interval (qm, inf), geometric rule gives 2*qm
    {
        Field mu = make_field(grid2d, 1.0), f = make_field(grid2d, 1.0);
        ProblemSpec sp = ProblemSpec::make(grid2d, 0.8, 0.8, 2.0, 0.1, mu, f, 3.0,
                                           GradientVariant::half_laplacian);
        CHECK(pick_r(sp) == doctest::Approx(12.0).epsilon(1e-14));
    }
    // stein floor: qm = 1.5 < 2 lifts the lower endpoint to 2
    {
        Field mu = make_field(grid1d, 1.0), f = make_field(grid1d, 1.0);
        ProblemSpec sp = ProblemSpec::make(grid1d, 0.8, 0.8, 1.5, 0.1, mu, f, 1.0,
                                           GradientVariant::stein);
        const RInterval iv = admissible_r_interval(sp);
        CHECK(iv.lo == doctest::Approx(2.0).epsilon(1e-14));
    }
    // q at or above qbar is rejected with the constraint named
    {
        Field mu = make_field(grid1d, 1.0), f = make_field(grid1d, 1.0);
        ProblemSpec sp = ProblemSpec::make(grid1d, 0.5, 0.5, 2.0, 0.1, mu, f, 1.0,
                                           GradientVariant::half_laplacian);
        try {
            pick_r(sp);
            FAIL("expected rejection");
        } catch (const validation_error& e) {
            CHECK(std::string(e.what()).find("qbar") != std::string::npos);
        }
    }
}

TEST_CASE("thresholds: unit-constant closed form and homogeneity") {
    auto grid = make_grid(Domain::interval(0.0, 1.0), 1.0 / 64); // |Omega| = 1
    Field mu = make_field(grid, 1.0), f = make_field(grid, 1.0);
    ProblemSpec sp = ProblemSpec::make(grid, 0.6, 0.5, 2.0, 0.1, mu, f, 2.0,
                                       GradientVariant::half_laplacian);
    const ThresholdBundle b = thresholds(sp, 1.0, 1.0);
    CHECK(b.lambda_star == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(b.ell == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(b.identity_gap <= 1e-10);
    CHECK(b.eta > 0.0);
    CHECK(b.theta > 0.0);
    CHECK(b.theta < 1.0);

    // lambda* scales like 1/|f|_m and like |mu|^{-1/(q-1)}
    Field f2 = make_field(grid, 2.0);
    ProblemSpec sp_f2 = ProblemSpec::make(grid, 0.6, 0.5, 2.0, 0.1, mu, f2, 2.0,
                                          GradientVariant::half_laplacian);
    CHECK(thresholds(sp_f2, 1.0, 1.0).lambda_star ==
          doctest::Approx(0.5 * b.lambda_star).epsilon(1e-14));
    Field mu2 = make_field(grid, 2.0);
    ProblemSpec sp_mu2 = ProblemSpec::make(grid, 0.6, 0.5, 2.0, 0.1, mu2, f, 2.0,
                                           GradientVariant::half_laplacian);
    CHECK(thresholds(sp_mu2, 1.0, 1.0).lambda_star ==
          doctest::Approx(b.lambda_star * std::pow(2.0, -1.0 / (2.0 - 1.0))).epsilon(1e-14));

    // case 2 requires the m = 1 constant and produces the cap M
    ProblemSpec sp_c2 = ProblemSpec::make(grid, 0.6, 0.5, 2.0, 0.1, mu, f, 1.2,
                                          GradientVariant::half_laplacian);
    CHECK_THROWS_AS(thresholds(sp_c2, 1.0, 1.0), validation_error);
    const ThresholdBundle b2 = thresholds(sp_c2, 1.0, 1.0, 1.5);
    CHECK(!b2.case1);
    CHECK(std::isfinite(b2.M));
    CHECK(b2.M > 0.0);
}

TEST_CASE("problem spec validation") {
    auto grid = make_grid(Domain::interval(-1.0, 1.0), 2.0 / 32);
    Field mu = make_field(grid, 1.0), f = make_field(grid, 1.0);
    CHECK_THROWS_AS(ProblemSpec::make(grid, 0.4, 0.8, 2.0, 0.1, mu, f, 2.0,
                                      GradientVariant::half_laplacian),
                    validation_error); // t >= s(1+1/N)
    CHECK_THROWS_AS(ProblemSpec::make(grid, 0.6, 0.5, 1.0, 0.1, mu, f, 2.0,
                                      GradientVariant::half_laplacian),
                    validation_error); // q = 1
    const ProblemSpec strict = ProblemSpec::make(grid, 0.6, 0.5, 2.0, 0.1, mu, f, 2.0,
                                                 GradientVariant::half_laplacian);
    CHECK(strict.a1_strict); // 0.5 < 0.6 (1 + 1/2)
    const ProblemSpec weak = ProblemSpec::make(grid, 0.52, 0.9, 8.0, 0.1, mu, f, 2.0,
                                               GradientVariant::half_laplacian);
    CHECK_FALSE(weak.a1_strict); // only the weaker section-3 condition holds
}

TEST_CASE("picard step: linear response and blow-up flag") {
    auto grid = make_grid(Domain::interval(-1.0, 1.0), 2.0 / 128);
    GreenOperator green(grid, 0.6);
    ProblemSpec sp = reference_spec(grid, GradientVariant::half_laplacian, 0.3);

    Field zero = make_field(grid, 0.0);
    Field step = picard_step(sp, zero, green);
    Eigen::VectorXd direct = green.solve(Eigen::VectorXd(0.3 * sp.f.values));
    CHECK((step.values - direct).cwiseAbs().maxCoeff() <= 1e-13);

    ProblemSpec off = sp.with_lambda(0.0);
    off.mu.values.setZero();
    Field anyphi = make_field(grid, [](const Point& x) { return std::cos(x[0]); });
    CHECK(picard_step(off, anyphi, green).values.cwiseAbs().maxCoeff() <= 1e-14);

    Field huge = make_field(grid, 1e200);
    CHECK_THROWS_AS(picard_step(sp, huge, green), numerical_error);
}

TEST_CASE("picard step agrees with manual operator composition") {
    auto grid = make_grid(Domain::interval(-1.0, 1.0), 2.0 / 512);
    GreenOperator green(grid, 0.5);
    Field torsion = green.solve(make_field(grid, 1.0));
    Field mu = make_field(grid, 1.0), f = make_field(grid, 1.0);
    ProblemSpec sp = ProblemSpec::make(grid, 0.5, 0.5, 2.0, 0.1, mu, f, 3.0,
                                       GradientVariant::half_laplacian);
    const Field step = picard_step(sp, torsion, green);

    const Field g = apply_half_laplacian(torsion, 0.5);
    Eigen::VectorXd rhs(grid->node_count());
    for (int i = 0; i < grid->node_count(); ++i)
        rhs[i] = g.values[i] * g.values[i] + 0.1; // mu=1, q=2, lambda f = 0.1
    const Eigen::VectorXd expect = green.solve(rhs);
    CHECK((step.values - expect).cwiseAbs().maxCoeff() <=
          1e-12 * (expect.cwiseAbs().maxCoeff() + 1.0));
}

TEST_CASE("iteration contracts below the measured threshold") {
    auto grid = make_grid(Domain::interval(-1.0, 1.0), 2.0 / 128);
    GreenOperator green(grid, 0.6);
    CounterRng rng(1);
    const Field zero = make_field(grid, 0.0);

    SUBCASE("lambda = 0 fixes the origin") {
        ProblemSpec sp = reference_spec(grid, GradientVariant::half_laplacian, 0.0);
        auto [u, rep] = iterate(sp, green, zero, 50, 1e-11);
        CHECK(rep.converged);
        CHECK(rep.iterations <= 2);
        CHECK(u.values.cwiseAbs().maxCoeff() <= 1e-12);
    }
    SUBCASE("mu = 0 converges in exactly two steps to the linear solve") {
        ProblemSpec sp = reference_spec(grid, GradientVariant::half_laplacian, 0.7);
        sp.mu.values.setZero();
        auto [u, rep] = iterate(sp, green, zero, 50, 1e-12);
        CHECK(rep.converged);
        CHECK(rep.iterations == 2);
        const Eigen::VectorXd lin = green.solve(Eigen::VectorXd(0.7 * sp.f.values));
        CHECK((u.values - lin).cwiseAbs().maxCoeff() <= 1e-12);
    }
    SUBCASE("all variants converge at half the measured threshold") {
        for (GradientVariant v : {GradientVariant::half_laplacian,
                                  GradientVariant::riesz_gradient, GradientVariant::stein}) {
            ProblemSpec sp = reference_spec(grid, v);
            const MeasuredConstants mc = measure_constants(sp, green, 20, 8, rng);
            const ThresholdBundle b = thresholds(sp, mc);
            sp.lambda = 0.5 * b.lambda_star;
            auto [u, rep] = iterate(sp, green, zero, 200, 1e-10, b.ball_radius());
            CHECK(rep.converged);
            CHECK(rep.residual <= 10.0 * 1e-10 * (1.0 + u.values.cwiseAbs().maxCoeff()));
            for (bool inside : rep.in_ball) CHECK(inside);
            // solution dominates one linear step from below
            const Eigen::VectorXd lower =
                green.solve(Eigen::VectorXd(sp.lambda * sp.f.values));
            CHECK(((u.values - lower).minCoeff()) >= -1e-10);
        }
    }
}

TEST_CASE("weak residual: explicit zero-candidate value and converged runs") {
    auto grid = make_grid(Domain::interval(-1.0, 1.0), 2.0 / 128);
    GreenOperator green(grid, 0.6);
    ProblemSpec sp = reference_spec(grid, GradientVariant::half_laplacian, 0.4);

    const Field zero = make_field(grid, 0.0);
    const double res = weak_residual(zero, sp, green);
    double expect = 0.0;
    for (const Field& phi : test_field_battery(green)) {
        const double pairing =
            std::abs(0.4 * sp.f.values.dot(phi.values)) * grid->cell_measure();
        expect = std::max(expect, pairing / phi.values.cwiseAbs().maxCoeff());
    }
    CHECK(res == doctest::Approx(expect).epsilon(1e-12));
    CHECK(res > 0.0);
    CHECK(test_field_battery(green).size() == 10);
}

TEST_CASE("stein power gap and its proof-chain bound") {
    auto grid = make_grid(Domain::interval(-1.0, 1.0), 2.0 / 64);
    const double t = 0.5;
    Field a = make_field(grid, [](const Point& x) { return std::cos(2.0 * x[0]); });
    Field b = make_field(grid, [](const Point& x) { return std::sin(x[0]); });

    CHECK(stein_power_gap(a, a, t, 2.0) == 0.0);
    const Field da = stein_functional(a, t);
    double direct = 0.0;
    for (int i = 0; i < grid->node_count(); ++i)
        direct += std::pow(da.values[i], 2.5) * grid->cell_measure();
    CHECK(stein_power_gap(a, make_field(grid, 0.0), t, 2.5) ==
          doctest::Approx(direct).epsilon(1e-13));

    CounterRng rng(8);
    for (int k = 0; k < 100; ++k) {
        Field u = make_field(grid, 0.0), v = make_field(grid, 0.0);
        for (int i = 0; i < grid->node_count(); ++i) {
            u.values[i] = rng.uniform(-1.0, 1.0);
            v.values[i] = rng.uniform(-1.0, 1.0);
        }
        for (double alpha : {1.5, 2.0, 3.0}) {
            const double gap = stein_power_gap(u, v, t, alpha);
            Field diff = u;
            diff.values -= v.values;
            const double beta = std::max(alpha, 2.0);
            const double du = lebesgue_norm(stein_functional(u, t), beta);
            const double dv = lebesgue_norm(stein_functional(v, t), beta);
            const double dd = lebesgue_norm(stein_functional(diff, t), beta);
            // mean value + Hoelder, with the measure factor for alpha < beta
            const double meas = grid->domain().measure();
            const double bound = alpha * std::pow(meas, 1.0 - alpha / beta) * dd *
                                 std::pow(du + dv, alpha - 1.0);
            CHECK(gap <= bound * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("lambda sweep brackets and edge cases") {
    auto grid = make_grid(Domain::interval(-1.0, 1.0), 2.0 / 96);
    GreenOperator green(grid, 0.6);
    CounterRng rng(1);
    ProblemSpec sp = reference_spec(grid, GradientVariant::half_laplacian);
    const MeasuredConstants mc = measure_constants(sp, green, 15, 6, rng);
    const ThresholdBundle b = thresholds(sp, mc);

    CHECK_THROWS_AS(lambda_sweep(sp, {}, green, 50, 1e-9), validation_error);
    CHECK_THROWS_AS(lambda_sweep(sp, {0.2, 0.1}, green, 50, 1e-9), validation_error);

    std::vector<double> lambdas{0.0, 0.25 * b.lambda_star, 0.5 * b.lambda_star, 40.0, 80.0};
    const SweepReport rep = lambda_sweep(sp, lambdas, green, 120, 1e-9, b.lambda_star);
    REQUIRE(rep.rows.size() == 5);
    CHECK(rep.rows[0].converged); // lambda = 0
    CHECK(rep.rows[1].converged);
    CHECK(rep.rows[2].converged);
    CHECK(rep.rows[4].diverged); // far beyond any threshold
    CHECK(rep.largest_converged >= 0.5 * b.lambda_star);
    CHECK(rep.smallest_diverged <= 80.0);
    CHECK(rep.lambda_star == doctest::Approx(b.lambda_star));
}

TEST_CASE("variants drive different but finite iterations") {
    auto grid = make_grid(Domain::interval(-1.0, 1.0), 2.0 / 96);
    GreenOperator green(grid, 0.6);
    const Field zero = make_field(grid, 0.0);
    ProblemSpec h = reference_spec(grid, GradientVariant::half_laplacian, 0.02);
    ProblemSpec r = reference_spec(grid, GradientVariant::riesz_gradient, 0.02);
    auto [uh, rh] = iterate(h, green, zero, 100, 1e-10);
    auto [ur, rr] = iterate(r, green, zero, 100, 1e-10);
    CHECK(rh.converged);
    CHECK(rr.converged);
    CHECK((uh.values - ur.values).cwiseAbs().maxCoeff() > 1e-8);
}
