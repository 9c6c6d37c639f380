#include "frackpz/kpz.hpp"
#include "frackpz/errors.hpp"
#include "frackpz/norms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace frackpz {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
} // namespace

std::string variant_name(GradientVariant v) {
    switch (v) {
    case GradientVariant::half_laplacian: return "half_laplacian";
    case GradientVariant::riesz_gradient: return "riesz_gradient";
    case GradientVariant::stein: return "stein";
    }
    return "?";
}

GradientVariant variant_from_name(const std::string& name) {
    if (name == "half_laplacian") return GradientVariant::half_laplacian;
    if (name == "riesz_gradient") return GradientVariant::riesz_gradient;
    if (name == "stein") return GradientVariant::stein;
    throw validation_error("unknown gradient variant '" + name + "'");
}

ProblemSpec ProblemSpec::make(std::shared_ptr<const Grid> grid, double s, double t, double q,
                              double lambda, Field mu, Field f, double m,
                              GradientVariant variant) {
    if (!grid) throw validation_error("ProblemSpec: null grid");
    const int N = grid->dimension();
    if (!(s > 0.0 && s < 1.0 && t > 0.0 && t < 1.0))
        throw validation_error("ProblemSpec: s,t must lie in (0,1)");
    if (!(q > 1.0)) throw validation_error("ProblemSpec: q must exceed 1");
    if (!(lambda >= 0.0)) throw validation_error("ProblemSpec: lambda must be >= 0");
    if (!(m >= 1.0)) throw validation_error("ProblemSpec: m must be >= 1");
    if (!(t < std::min(1.0, s * (1.0 + 1.0 / N)))) {
        std::ostringstream os;
        os << "ProblemSpec: t=" << t << " violates t < min{1, s(1+1/N)} = "
           << std::min(1.0, s * (1.0 + 1.0 / N));
        throw validation_error(os.str());
    }
    if (mu.values.size() != grid->node_count() || f.values.size() != grid->node_count())
        throw validation_error("ProblemSpec: mu and f must live on the grid");
    if (!mu.values.allFinite() || !f.values.allFinite())
        throw validation_error("ProblemSpec: mu and f must be finite");
    ProblemSpec spec;
    spec.grid = std::move(grid);
    spec.s = s;
    spec.t = t;
    spec.q = q;
    spec.lambda = lambda;
    spec.m = m;
    spec.mu = std::move(mu);
    spec.f = std::move(f);
    spec.variant = variant;
    spec.a1_strict = t < std::min(1.0, s * (1.0 + 1.0 / (q * N)));
    spec.mu_min = spec.mu.values.minCoeff();
    spec.mu_max = spec.mu.values.maxCoeff();
    return spec;
}

RInterval admissible_r_interval(const ProblemSpec& spec) {
    const int N = spec.dimension();
    const double s = spec.s, t = spec.t, q = spec.q;
    const double gamma = std::max(t, s);
    const double qb = qbar(spec.m, s, t, N);
    RInterval iv;
    iv.case1 = spec.m > N / s;
    iv.m_eff = spec.m;
    if (spec.variant == GradientVariant::stein) {
        const double mb = mbar(s, t, N);
        if (!(spec.m > mb)) {
            std::ostringstream os;
            os << "pick_r: stein variant requires m > mbar(s,t) = " << mb << ", got m=" << spec.m;
            throw validation_error(os.str());
        }
    }
    if (!(q < qb)) {
        std::ostringstream os;
        os << "pick_r: q=" << q << " violates q < qbar(m,s,t) = " << qb;
        throw validation_error(os.str());
    }
    if (iv.case1) {
        if (t > s) {
            // the data exponent may be lowered without loss; keep it inside
            // (N/s, 1/(q(t-s))) so the interval below is exactly non-empty
            const double cap = 1.0 / (q * (t - s));
            if (!(N / s < cap)) {
                std::ostringstream os;
                os << "pick_r: q=" << q << " violates q < qbar = " << s / (N * (t - s));
                throw validation_error(os.str());
            }
            if (spec.m >= cap) iv.m_eff = std::sqrt((N / s) * cap);
            iv.hi = 1.0 / (t - s);
        } else {
            iv.hi = kInf;
        }
        iv.lo = q * iv.m_eff;
    } else {
        const double denom = N - spec.m * s + spec.m * N * (gamma - s);
        iv.hi = denom > 0.0 ? spec.m * N / denom : kInf;
        iv.lo = q * spec.m;
    }
    if (spec.variant == GradientVariant::stein) iv.lo = std::max(iv.lo, 2.0);
    if (!(iv.lo < iv.hi)) {
        std::ostringstream os;
        os << "pick_r: admissible interval (" << iv.lo << ", " << iv.hi
           << ") is empty (q too close to qbar, or the stein floor max{qm,2})";
        throw validation_error(os.str());
    }
    return iv;
}

double pick_r(const ProblemSpec& spec) {
    const RInterval iv = admissible_r_interval(spec);
    return iv.hi == kInf ? 2.0 * iv.lo : std::sqrt(iv.lo * iv.hi);
}

ThresholdBundle thresholds(const ProblemSpec& spec, double c_tilde, double k_tilde,
                           std::optional<double> c_tilde_m1) {
    if (!(c_tilde > 0.0 && k_tilde > 0.0))
        throw validation_error("thresholds: measured constants must be positive");
    const RInterval iv = admissible_r_interval(spec);
    const double r = iv.hi == kInf ? 2.0 * iv.lo : std::sqrt(iv.lo * iv.hi);
    const int N = spec.dimension();
    const double q = spec.q;
    const double gamma = std::max(spec.t, spec.s);

    ThresholdBundle b;
    b.q_ = q;
    b.r = r;
    b.gamma = gamma;
    b.case1 = iv.case1;
    b.m_eff = iv.m_eff;
    b.c_tilde = c_tilde;
    b.k_tilde = k_tilde;

    const double eta_cap =
        std::min(q - 1.0, (spec.s - N * (gamma - spec.s)) / (N * (1.0 + (gamma - spec.s)) - spec.s));
    if (!(eta_cap > 0.0)) throw validation_error("thresholds: empty eta range");
    b.eta = 0.5 * eta_cap;
    b.theta = (1.0 / q - 1.0 / r) / (1.0 / (1.0 + b.eta) - 1.0 / r);

    Field fm;
    fm.grid = spec.grid;
    fm.values = spec.f.values;
    b.norm_f_m = lebesgue_norm(fm, iv.m_eff);
    b.norm_f_1 = lebesgue_norm(fm, 1.0);
    b.norm_mu_inf = spec.mu.values.cwiseAbs().maxCoeff();
    if (!(b.norm_f_m > 0.0)) throw validation_error("thresholds: f must not vanish identically");
    b.omega_power =
        std::pow(spec.grid->domain().measure(), (r - q * iv.m_eff) / (iv.m_eff * r));

    b.lambda_star = (q - 1.0) / (q * b.norm_f_m) *
                    std::pow(q * std::pow(c_tilde * k_tilde, q) * b.norm_mu_inf * b.omega_power,
                             -1.0 / (q - 1.0));

    // tangency root of a*ell + bcoef = ell^{1/q}: bisection on the derivative
    // a = (1/q) ell^{1/q-1}, then Newton polish, then the identity check
    const double a = c_tilde * b.norm_mu_inf * b.omega_power * std::pow(k_tilde, q);
    const double bcoef = c_tilde * b.lambda_star * b.norm_f_m;
    double lo = 1e-300, hi = 1e300;
    auto dF = [&](double ell) { return a - (1.0 / q) * std::pow(ell, 1.0 / q - 1.0); };
    // expand/shrink the bracket to a sign change
    while (dF(hi) < 0.0) hi *= 10.0;
    while (dF(lo) > 0.0) lo *= 0.1;
    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(lo * hi); // geometric: the scale is unknown a priori
        (dF(mid) < 0.0 ? lo : hi) = mid;
    }
    double ell = std::sqrt(lo * hi);
    for (int it = 0; it < 8; ++it) {
        const double g1 = dF(ell);
        const double g2 = -(1.0 / q) * (1.0 / q - 1.0) * std::pow(ell, 1.0 / q - 2.0);
        const double step = g1 / g2;
        if (!std::isfinite(step)) break;
        ell -= step;
        if (!(ell > 0.0)) {
            ell = std::sqrt(lo * hi);
            break;
        }
    }
    b.ell = ell;
    const double lhs = a * ell + bcoef;
    const double rhs = std::pow(ell, 1.0 / q);
    b.identity_gap = std::abs(lhs - rhs) / std::max(rhs, 1e-300);
    if (!(b.identity_gap < 1e-9)) {
        std::ostringstream os;
        os << "thresholds: tangency root failed the defining identity, gap=" << b.identity_gap
           << " bracket=[" << lo << "," << hi << "]";
        throw numerical_error(os.str());
    }

    if (!iv.case1) {
        if (!c_tilde_m1)
            throw validation_error("thresholds: the 1 <= m <= N/s case needs the m=1 CZ constant");
        b.M = *c_tilde_m1 *
              (b.norm_mu_inf * std::pow(spec.grid->domain().measure(), (r - q) / r) *
                   std::pow(k_tilde, q) * ell +
               b.lambda_star * b.norm_f_1);
    }
    return b;
}

MeasuredConstants measure_constants(const ProblemSpec& spec, const GreenOperator& green,
                                    int cz_samples, int embed_samples, CounterRng& rng) {
    const RInterval iv = admissible_r_interval(spec);
    const double r = iv.hi == kInf ? 2.0 * iv.lo : std::sqrt(iv.lo * iv.hi);
    const double gamma = std::max(spec.t, spec.s);
    const int N = spec.dimension();
    MeasuredConstants mc;
    mc.cz = estimate_cz_constant(green, gamma, r, iv.m_eff, cz_samples, rng);
    mc.k_tilde = spec.t < gamma
                     ? measure_embedding_constant(spec.grid, spec.t, gamma, r, embed_samples, rng)
                     : 1.0;
    const double eta_cap = std::min(
        spec.q - 1.0,
        (spec.s - N * (gamma - spec.s)) / (N * (1.0 + (gamma - spec.s)) - spec.s));
    mc.eta = 0.5 * eta_cap;
    if (!iv.case1)
        mc.cz_m1 =
            estimate_cz_constant_domain_proxy(green, gamma, 1.0 + mc.eta, 1.0, cz_samples, rng);
    return mc;
}

ThresholdBundle thresholds(const ProblemSpec& spec, const MeasuredConstants& mc) {
    std::optional<double> c1;
    if (mc.cz_m1) c1 = mc.cz_m1->c_tilde;
    return thresholds(spec, mc.cz.c_tilde, mc.k_tilde, c1);
}

Field gradient_term(const ProblemSpec& spec, const Field& phi) {
    switch (spec.variant) {
    case GradientVariant::half_laplacian: {
        Field g = apply_half_laplacian(phi, spec.t);
        g.values = g.values.cwiseAbs();
        return g;
    }
    case GradientVariant::riesz_gradient: return riesz_gradient_magnitude(phi, spec.t);
    case GradientVariant::stein: return stein_functional(phi, spec.t);
    }
    throw validation_error("gradient_term: unknown variant");
}

Field picard_step(const ProblemSpec& spec, const Field& phi, const GreenOperator& green) {
    const Field g = gradient_term(spec, phi);
    Eigen::VectorXd rhs(g.values.size());
    for (Eigen::Index i = 0; i < g.values.size(); ++i)
        rhs[i] = spec.mu.values[i] * std::pow(g.values[i], spec.q) + spec.lambda * spec.f.values[i];
    if (!rhs.allFinite())
        throw numerical_error("picard_step: non-finite nonlinearity (blow-up)");
    Field u;
    u.grid = phi.grid;
    u.values = green.solve(rhs);
    return u;
}

double ball_proxy_norm(const ProblemSpec& spec, const Field& u, double gamma, double r) {
    const int N = spec.dimension();
    if (!(r > 2.0 * N / (N + 2.0 * gamma))) return kNaN; // proxy not defined this far down
    const double d = stein_lp_norm(u, gamma, r);
    if (spec.variant == GradientVariant::stein) return d;
    return d + lebesgue_norm(u, r);
}

std::pair<Field, IterationReport> iterate(const ProblemSpec& spec, const GreenOperator& green,
                                          const Field& u0, int max_iter, double tol,
                                          std::optional<double> ball_radius) {
    if (max_iter < 1) throw validation_error("iterate: max_iter >= 1");
    if (!(tol > 0.0)) throw validation_error("iterate: tol > 0");
    const double gamma = std::max(spec.t, spec.s);
    double r = kNaN;
    try {
        r = pick_r(spec);
    } catch (const validation_error&) {
        // no admissible r: traces carry NaN proxies, iteration itself still runs
    }

    IterationReport rep;
    rep.proxy_kind = spec.variant == GradientVariant::stein
                         ? "||D_gamma u||_{L^r}"
                         : "||D_gamma u||_{L^r} + ||u||_{L^r}";
    if (ball_radius) rep.ball_radius = *ball_radius;

    Field u = u0;
    for (int k = 1; k <= max_iter; ++k) {
        rep.iterations = k;
        Field unew;
        try {
            unew = picard_step(spec, u, green);
        } catch (const numerical_error&) {
            rep.linf_trace.push_back(kInf);
            rep.proxy_trace.push_back(kNaN);
            if (ball_radius) rep.in_ball.push_back(false);
            rep.diverged = true;
            rep.blowup_index = k;
            break;
        }
        const double linf = unew.values.cwiseAbs().maxCoeff();
        const double proxy = std::isfinite(r) && unew.values.allFinite()
                                 ? ball_proxy_norm(spec, unew, gamma, r)
                                 : kNaN;
        rep.linf_trace.push_back(linf);
        rep.proxy_trace.push_back(proxy);
        if (ball_radius) rep.in_ball.push_back(std::isfinite(proxy) && proxy <= *ball_radius);
        if (!unew.values.allFinite() || linf > 1e8) {
            rep.diverged = true;
            rep.blowup_index = k;
            u = unew;
            break;
        }
        const double incr = (unew.values - u.values).cwiseAbs().maxCoeff();
        const double base = u.values.size() ? u.values.cwiseAbs().maxCoeff() : 0.0;
        u = unew;
        if (incr <= tol * (1.0 + base)) {
            rep.converged = true;
            break;
        }
    }
    if (rep.converged) rep.residual = weak_residual(u, spec, green);
    return {std::move(u), std::move(rep)};
}

std::vector<Field> test_field_battery(const GreenOperator& green) {
    const auto grid = green.grid_ptr();
    const Grid& g = *grid;
    const Point c = g.domain().incenter();
    const double rin = g.domain().inradius();
    const double s = green.order();

    std::vector<Field> battery;
    battery.push_back(green.solve(make_field(grid, 1.0))); // torsion profile

    for (double e : {s, 0.5 * (1.0 + s), 1.0}) {
        battery.push_back(make_field(grid, [&](const Point& x) {
            const double dx = x[0] - c[0], dy = x[1] - c[1];
            const double rho2 = (dx * dx + dy * dy) / (rin * rin);
            return rho2 < 1.0 ? std::pow(1.0 - rho2, e) : 0.0;
        }));
    }
    for (double w : {0.3, 0.55, 0.8}) {
        battery.push_back(make_field(grid, [&](const Point& x) {
            const double dx = x[0] - c[0], dy = x[1] - c[1];
            const double rho = std::sqrt(dx * dx + dy * dy) / (w * rin);
            return rho < 1.0 ? std::pow(std::cos(0.5 * kPi * rho), 2) : 0.0;
        }));
    }
    const std::array<Point, 3> offsets =
        g.dimension() == 2
            ? std::array<Point, 3>{Point{0.4, 0.0}, Point{-0.4, 0.0}, Point{0.2, 0.3}}
            : std::array<Point, 3>{Point{0.4, 0.0}, Point{-0.4, 0.0}, Point{-0.2, 0.0}};
    for (const Point& off : offsets) {
        const Point ctr{c[0] + rin * off[0], c[1] + rin * off[1]};
        const double w = 0.35 * rin;
        battery.push_back(make_field(grid, [&](const Point& x) {
            const double dx = x[0] - ctr[0], dy = x[1] - ctr[1];
            const double rho = std::sqrt(dx * dx + dy * dy) / w;
            return rho < 1.0 ? std::pow(std::cos(0.5 * kPi * rho), 2) : 0.0;
        }));
    }
    return battery;
}

double weak_residual(const Field& u, const ProblemSpec& spec, const GreenOperator& green) {
    const Grid& g = *spec.grid;
    const double cell = g.cell_measure();
    const Field grad = gradient_term(spec, u);
    Eigen::VectorXd rhs(grad.values.size());
    for (Eigen::Index i = 0; i < grad.values.size(); ++i)
        rhs[i] =
            spec.mu.values[i] * std::pow(grad.values[i], spec.q) + spec.lambda * spec.f.values[i];

    double worst = 0.0;
    for (const Field& phi : test_field_battery(green)) {
        const double sup = phi.values.cwiseAbs().maxCoeff();
        if (sup == 0.0) continue;
        const double lhs = u.values.dot(green.apply(phi.values)) * cell;
        const double pairing = rhs.dot(phi.values) * cell;
        worst = std::max(worst, std::abs(lhs - pairing) / sup);
    }
    return worst;
}

double stein_power_gap(const Field& phi1, const Field& phi2, double t, double alpha) {
    if (!(alpha > 1.0)) throw validation_error("stein_power_gap: alpha > 1");
    const Field d1 = stein_functional(phi1, t);
    const Field d2 = stein_functional(phi2, t);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < d1.values.size(); ++i)
        acc += std::abs(std::pow(d1.values[i], alpha) - std::pow(d2.values[i], alpha));
    return acc * phi1.grid->cell_measure();
}

SweepReport lambda_sweep(const ProblemSpec& spec_template, const std::vector<double>& lambdas,
                         const GreenOperator& green, int max_iter, double tol,
                         std::optional<double> lambda_star, std::optional<double> lambda_ss) {
    if (lambdas.empty()) throw validation_error("lambda_sweep: empty lambda list");
    if (!std::is_sorted(lambdas.begin(), lambdas.end()))
        throw validation_error("lambda_sweep: lambdas must be sorted ascending");
    SweepReport rep;
    if (lambda_star) rep.lambda_star = *lambda_star;
    if (lambda_ss) rep.lambda_ss = *lambda_ss;
    const Field zero = make_field(spec_template.grid, 0.0);
    for (double lam : lambdas) {
        const ProblemSpec spec = spec_template.with_lambda(lam);
        auto [u, it] = iterate(spec, green, zero, max_iter, tol);
        SweepRow row;
        row.lambda = lam;
        row.converged = it.converged;
        row.diverged = it.diverged;
        row.iterations = it.iterations;
        row.final_linf = it.linf_trace.empty() ? 0.0 : it.linf_trace.back();
        row.residual = it.residual;
        rep.rows.push_back(row);
        if (it.converged && !(rep.largest_converged >= lam)) rep.largest_converged = lam;
        if (it.diverged && !(rep.smallest_diverged <= lam)) rep.smallest_diverged = lam;
    }
    return rep;
}

} // namespace frackpz
