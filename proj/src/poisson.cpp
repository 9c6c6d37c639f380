#include "frackpz/poisson.hpp"
#include "frackpz/errors.hpp"
#include "frackpz/exponents.hpp"
#include "frackpz/norms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace frackpz {

GreenOperator::GreenOperator(std::shared_ptr<const Grid> grid, double s)
    : matrix_(std::move(grid), s) {
    llt_.compute(matrix_.entries());
    if (llt_.info() != Eigen::Success) {
        const Eigen::VectorXd d = matrix_.entries().diagonal();
        std::ostringstream os;
        os << "GreenOperator: factorization failed (matrix not SPD); diagonal condition estimate "
           << d.maxCoeff() / std::max(d.minCoeff(), 1e-300);
        throw numerical_error(os.str());
    }
}

Eigen::VectorXd GreenOperator::solve(const Eigen::VectorXd& h) const {
    if (!h.allFinite()) throw numerical_error("GreenOperator::solve: non-finite right-hand side");
    Eigen::VectorXd u = llt_.solve(h);
    const double hnorm = h.cwiseAbs().maxCoeff();
    double res = (matrix_.entries() * u - h).cwiseAbs().maxCoeff();
    if (res > 1e-10 * std::max(hnorm, 1e-300)) {
        u += llt_.solve(h - matrix_.entries() * u); // one refinement pass
        res = (matrix_.entries() * u - h).cwiseAbs().maxCoeff();
        if (res > 1e-10 * std::max(hnorm, 1e-300))
            throw numerical_error("GreenOperator::solve: residual above 1e-10 relative");
    }
    return u;
}

Field GreenOperator::solve(const Field& h) const {
    Field u;
    u.grid = h.grid;
    u.values = solve(h.values);
    return u;
}

Field solve_poisson(std::shared_ptr<const Grid> grid, double s, const Field& h) {
    GreenOperator green(std::move(grid), s);
    return green.solve(h);
}

namespace {

// Random non-negative datum for the CZ sampler.  Kind cycles through rough
// uniform noise, smooth oscillations, and bumps hugging the boundary (the
// worst cases for the estimate).
Eigen::VectorXd draw_datum(const Grid& g, int kind, CounterRng& rng) {
    const int n = g.node_count();
    Eigen::VectorXd h(n);
    switch (kind % 3) {
    case 0:
        for (int i = 0; i < n; ++i) h[i] = rng.next_unit();
        break;
    case 1: {
        const double k1 = rng.uniform(0.5, 6.0);
        const double k2 = rng.uniform(0.5, 6.0);
        const double ph = rng.uniform(0.0, 6.28);
        for (int i = 0; i < n; ++i) {
            const Point& x = g.nodes()[static_cast<std::size_t>(i)];
            h[i] = std::abs(std::cos(k1 * x[0] + ph) * std::cos(k2 * x[1]));
        }
        break;
    }
    default: {
        // center on a random near-boundary node
        std::vector<int> band;
        const double cut = 3.0 * g.spacing();
        for (int i = 0; i < n; ++i)
            if (g.delta()[static_cast<std::size_t>(i)] < cut) band.push_back(i);
        if (band.empty()) band.push_back(0);
        const int c = band[static_cast<std::size_t>(rng.next_u64() % band.size())];
        const Point xc = g.nodes()[static_cast<std::size_t>(c)];
        const double w = 2.0 * g.spacing();
        for (int i = 0; i < n; ++i) {
            const Point& x = g.nodes()[static_cast<std::size_t>(i)];
            const double dx = x[0] - xc[0], dy = x[1] - xc[1];
            h[i] = std::exp(-(dx * dx + dy * dy) / (2.0 * w * w));
        }
        break;
    }
    }
    return h;
}

} // namespace

CZEstimate estimate_cz_constant(const GreenOperator& green, double t, double p, double m,
                                int nsamples, CounterRng& rng) {
    const double s = green.order();
    const int N = green.grid().dimension();
    if (!(s <= t && t < std::min(1.0, s * (1.0 + 1.0 / N)))) {
        std::ostringstream os;
        os << "estimate_cz_constant: requires s <= t < min{1, s(1+1/N)}, got s=" << s
           << " t=" << t;
        throw validation_error(os.str());
    }
    const double pt = ptilde(m, s, t, N);
    if (!(p > 1.0 && p < pt)) {
        std::ostringstream os;
        os << "estimate_cz_constant: requires 1 < p < p_tilde(m,s,t) = " << pt << ", got p=" << p;
        throw validation_error(os.str());
    }
    if (!(p > 2.0 * N / (N + 2.0 * t)))
        throw validation_error("estimate_cz_constant: Stein proxy needs p > 2N/(N+2t)");
    if (nsamples < 1) throw validation_error("estimate_cz_constant: nsamples >= 1");

    const Grid& g = green.grid();
    double best = 0.0;
    for (int k = 0; k < nsamples; ++k) {
        Field h;
        h.grid = green.grid_ptr();
        h.values = (k == 0) ? Eigen::VectorXd::Ones(g.node_count()) : draw_datum(g, k - 1, rng);
        const double denom = lebesgue_norm(h, m);
        if (denom == 0.0) continue;
        const Field u = green.solve(h);
        best = std::max(best, stein_norm(u, t, p) / denom);
    }
    CZEstimate est;
    est.s = s;
    est.t = t;
    est.p = p;
    est.m = m;
    est.c_tilde = best;
    est.sample_count = nsamples;
    est.grid_h = g.spacing();
    return est;
}

CZEstimate estimate_cz_constant(std::shared_ptr<const Grid> grid, double s, double t, double p,
                                double m, int nsamples, CounterRng& rng) {
    GreenOperator green(std::move(grid), s);
    return estimate_cz_constant(green, t, p, m, nsamples, rng);
}

CZEstimate estimate_cz_constant_domain_proxy(const GreenOperator& green, double t, double p,
                                             double m, int nsamples, CounterRng& rng) {
    if (!(p >= 1.0 && m >= 1.0))
        throw validation_error("estimate_cz_constant_domain_proxy: p,m >= 1");
    if (nsamples < 1) throw validation_error("estimate_cz_constant_domain_proxy: nsamples >= 1");
    const Grid& g = green.grid();
    double best = 0.0;
    for (int k = 0; k < nsamples; ++k) {
        Field h;
        h.grid = green.grid_ptr();
        h.values = (k == 0) ? Eigen::VectorXd::Ones(g.node_count()) : draw_datum(g, k - 1, rng);
        const double denom = lebesgue_norm(h, m);
        if (denom == 0.0) continue;
        const Field u = green.solve(h);
        best = std::max(best, stein_norm_domain(u, t, p) / denom);
    }
    CZEstimate est;
    est.s = green.order();
    est.t = t;
    est.p = p;
    est.m = m;
    est.c_tilde = best;
    est.sample_count = nsamples;
    est.grid_h = g.spacing();
    return est;
}

namespace {

constexpr double kPiLocal = 3.141592653589793238462643383279502884;

// rays from the incenter used to place exterior sample points
std::vector<Point> ray_directions(int N, int count) {
    std::vector<Point> dirs;
    if (N == 1) {
        dirs.push_back({1.0, 0.0});
        dirs.push_back({-1.0, 0.0});
        return dirs;
    }
    for (int k = 0; k < count; ++k) {
        const double th = 2.0 * kPiLocal * (k + 0.37) / count;
        dirs.push_back({std::cos(th), std::sin(th)});
    }
    return dirs;
}

} // namespace

DecompositionReport decomposition_diagnostics(const GreenOperator& green, double t, const Field& h,
                                              double lambda_shift) {
    const double s = green.order();
    const int N = green.grid().dimension();
    if (!(s <= t && t < std::min(1.0, 2.0 * s)))
        throw validation_error("decomposition_diagnostics: requires s <= t < min{1,2s}");
    if (lambda_shift < 0.0) lambda_shift = 0.5 * (2.0 * s - t);
    if (!(lambda_shift > 0.0 && lambda_shift < 2.0 * s - t))
        throw validation_error("decomposition_diagnostics: shift must lie in (0, 2s-t)");

    const Grid& g = green.grid();
    DecompositionReport rep;
    rep.s = s;
    rep.t = t;
    rep.lambda_shift = lambda_shift;

    const Field u = green.solve(h);
    Field habs;
    habs.grid = h.grid;
    habs.values = h.values.cwiseAbs();

    rep.lhs = apply_frac_laplacian(u, 0.5 * t).cwiseAbs();
    rep.g1 = riesz_potential(habs, 2.0 * s - t - lambda_shift).values;
    rep.g2 = riesz_potential(habs, 2.0 * s - t).values;
    rep.g3 = (t - s) * riesz_potential(habs, s).values;

    const double cut = 2.0 * g.spacing();
    rep.fitted_C = 0.0;
    for (int i = 0; i < g.node_count(); ++i) {
        const double d = g.delta()[static_cast<std::size_t>(i)];
        if (d <= cut) continue;
        ++rep.interior_count;
        const double denom =
            rep.g1[i] + std::abs(std::log(d)) * rep.g2[i] + std::pow(d, s - t) * rep.g3[i];
        if (denom == 0.0) {
            if (rep.lhs[i] > 0.0) rep.fitted_C = std::numeric_limits<double>::infinity();
            continue;
        }
        rep.fitted_C = std::max(rep.fitted_C, rep.lhs[i] / denom);
    }

    // exterior checks; both sides evaluated with the bare kernel bound on the
    // right (the normalization a_{N,t/2} < 1 only strengthens them)
    const double R = g.tail_radius();
    const Point c = g.domain().incenter();
    const double hgrid = g.spacing();
    const double margin = std::max(2.0 * hgrid, 0.02 * g.domain().diameter());
    std::vector<Point> med_pts, far_pts;
    for (const Point& d : ray_directions(N, 10)) {
        double rho = 0.0; // exit radius of the ray from Omega
        double step = g.domain().inradius();
        while (step > 1e-9) {
            while (g.domain().contains({c[0] + (rho + step) * d[0], c[1] + (rho + step) * d[1]}))
                rho += step;
            step *= 0.5;
        }
        for (double f : {1.0, 2.0, 4.0}) {
            const Point x{c[0] + (rho + f * margin) * d[0], c[1] + (rho + f * margin) * d[1]};
            const double r = std::sqrt(x[0] * x[0] + x[1] * x[1]);
            if (r < R && static_cast<int>(med_pts.size()) < 20) med_pts.push_back(x);
        }
    }
    const std::vector<double> far_factors =
        N == 1 ? std::vector<double>{1.05, 1.3, 1.6, 2.0, 2.5, 3.2, 4.0, 5.0, 6.5, 8.0}
               : std::vector<double>{1.05, 1.5, 2.5, 4.0};
    for (const Point& d : ray_directions(N, 5)) {
        for (double f : far_factors)
            if (static_cast<int>(far_pts.size()) < 20)
                far_pts.push_back({R * f * d[0], R * f * d[1]});
    }

    const auto med_lhs = apply_half_laplacian_at(u, t, med_pts);
    for (std::size_t k = 0; k < med_pts.size(); ++k) {
        ExteriorCheckSample smp;
        smp.x = med_pts[k];
        smp.lhs = std::abs(med_lhs[k]);
        double rhs = 0.0;
        for (int j = 0; j < g.node_count(); ++j) {
            const Point& y = g.nodes()[static_cast<std::size_t>(j)];
            const Point delta{smp.x[0] - y[0], smp.x[1] - y[1]};
            rhs += std::abs(u.values[j]) / std::pow(g.delta()[static_cast<std::size_t>(j)], s) *
                   cell_integral(N, t - s, hgrid, delta);
        }
        smp.rhs = rhs;
        if (smp.lhs > smp.rhs * (1.0 + 1e-8) + 1e-12) rep.med_ok = false;
        rep.med_samples.push_back(smp);
    }

    const double umass = u.values.cwiseAbs().sum() * g.cell_measure();
    const auto far_lhs = apply_half_laplacian_at(u, t, far_pts);
    for (std::size_t k = 0; k < far_pts.size(); ++k) {
        ExteriorCheckSample smp;
        smp.x = far_pts[k];
        smp.lhs = std::abs(far_lhs[k]);
        const double r = std::sqrt(smp.x[0] * smp.x[0] + smp.x[1] * smp.x[1]);
        smp.rhs = std::pow(4.0, N + t) * std::pow(1.0 + r, -(N + t)) * umass;
        if (smp.lhs > smp.rhs * (1.0 + 1e-8) + 1e-12) rep.far_ok = false;
        rep.far_samples.push_back(smp);
    }
    return rep;
}

} // namespace frackpz
