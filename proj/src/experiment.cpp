#include "frackpz/experiment.hpp"
#include "frackpz/errors.hpp"
#include "frackpz/exponents.hpp"
#include "frackpz/kpz.hpp"
#include "frackpz/nonexist.hpp"
#include "frackpz/norms.hpp"
#include "frackpz/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace frackpz {

using nlohmann::json;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& ctx) {
    if (!obj.is_object()) throw validation_error("config: " + ctx + " must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok) throw validation_error("config: unknown key '" + it.key() + "' in " + ctx);
    }
}

double need_number(const json& obj, const char* key, const std::string& ctx) {
    if (!obj.contains(key))
        throw validation_error("config: missing key '" + std::string(key) + "' in " + ctx);
    if (!obj[key].is_number())
        throw validation_error("config: key '" + std::string(key) + "' in " + ctx +
                               " must be a number");
    return obj[key].get<double>();
}

double opt_number(const json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number())
        throw validation_error("config: key '" + std::string(key) + "' must be a number");
    return obj[key].get<double>();
}

Point parse_point(const json& j, const std::string& ctx) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw validation_error("config: " + ctx + " must be a [x,y] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

Domain parse_domain(const json& j) {
    check_keys(j, {"shape", "a", "b", "center", "radius", "corner", "side"}, "domain");
    if (!j.contains("shape") || !j["shape"].is_string())
        throw validation_error("config: domain.shape must be a string");
    const std::string shape = j["shape"].get<std::string>();
    if (shape == "interval") {
        check_keys(j, {"shape", "a", "b"}, "domain(interval)");
        return Domain::interval(need_number(j, "a", "domain"), need_number(j, "b", "domain"));
    }
    if (shape == "disk") {
        check_keys(j, {"shape", "center", "radius"}, "domain(disk)");
        if (!j.contains("center")) throw validation_error("config: domain.center missing");
        return Domain::disk(parse_point(j["center"], "domain.center"),
                            need_number(j, "radius", "domain"));
    }
    if (shape == "square") {
        check_keys(j, {"shape", "corner", "side"}, "domain(square)");
        if (!j.contains("corner")) throw validation_error("config: domain.corner missing");
        return Domain::square(parse_point(j["corner"], "domain.corner"),
                              need_number(j, "side", "domain"));
    }
    throw validation_error("config: domain.shape must be interval|disk|square");
}

Field parse_field(const json& j, const std::shared_ptr<const Grid>& grid,
                  const std::string& ctx) {
    if (j.is_number()) return make_field(grid, j.get<double>());
    check_keys(j, {"kind", "value", "center", "width", "amplitude"}, ctx);
    if (!j.contains("kind") || !j["kind"].is_string())
        throw validation_error("config: " + ctx + ".kind must be a string");
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "constant") {
        check_keys(j, {"kind", "value"}, ctx);
        return make_field(grid, need_number(j, "value", ctx));
    }
    if (kind == "bump") {
        check_keys(j, {"kind", "center", "width", "amplitude"}, ctx);
        Point c = grid->domain().incenter();
        if (j.contains("center")) c = parse_point(j["center"], ctx + ".center");
        const double w = need_number(j, "width", ctx);
        const double amp = opt_number(j, "amplitude", 1.0);
        if (!(w > 0.0)) throw validation_error("config: " + ctx + ".width must be positive");
        return make_field(grid, [&](const Point& x) {
            const double dx = x[0] - c[0], dy = x[1] - c[1];
            const double rho = std::sqrt(dx * dx + dy * dy) / w;
            return rho < 1.0 ? amp * std::pow(std::cos(0.5 * kPi * rho), 2) : 0.0;
        });
    }
    throw validation_error("config: " + ctx + ".kind must be constant|bump");
}

struct ParsedProblem {
    ProblemSpec spec;
    json echo;
};

ParsedProblem parse_problem(const json& j, const std::shared_ptr<const Grid>& grid) {
    check_keys(j, {"s", "t", "q", "lambda", "m", "mu", "f", "variant"}, "problem");
    const double s = need_number(j, "s", "problem");
    const double t = need_number(j, "t", "problem");
    const double q = need_number(j, "q", "problem");
    const double lambda = opt_number(j, "lambda", 0.0);
    const double m = need_number(j, "m", "problem");
    if (!j.contains("mu") || !j.contains("f"))
        throw validation_error("config: problem.mu and problem.f are required");
    Field mu = parse_field(j["mu"], grid, "problem.mu");
    Field f = parse_field(j["f"], grid, "problem.f");
    GradientVariant variant = GradientVariant::half_laplacian;
    if (j.contains("variant")) {
        if (!j["variant"].is_string())
            throw validation_error("config: problem.variant must be a string");
        variant = variant_from_name(j["variant"].get<std::string>());
    }
    ParsedProblem out{ProblemSpec::make(grid, s, t, q, lambda, std::move(mu), std::move(f), m,
                                        variant),
                      j};
    return out;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json finite_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

std::string iso_timestamp() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// one experiment's in-memory products, written only after compute succeeds
struct Products {
    json report;
    std::vector<std::pair<std::string, Field>> fields; // name (no .csv) -> field
    std::vector<std::pair<std::string, std::string>> raw; // filename -> content
    std::vector<ConstantRecord> constants;
};

json cz_to_json(const CZEstimate& e) {
    return json{{"s", e.s},           {"t", e.t},
                {"p", e.p},           {"m", e.m},
                {"c_tilde", e.c_tilde}, {"samples", e.sample_count},
                {"grid_h", e.grid_h}};
}

std::string cz_provenance(const CZEstimate& e, std::uint64_t seed) {
    std::ostringstream os;
    os << "max sampled ratio over " << e.sample_count << " non-negative data (incl. h=1 and "
       << "boundary bumps), p=" << e.p << ", m=" << e.m << ", t=" << e.t << ", h=" << e.grid_h
       << ", seed=" << seed;
    return os.str();
}

json bundle_to_json(const ThresholdBundle& b) {
    return json{{"r", b.r},
                {"gamma", b.gamma},
                {"eta", b.eta},
                {"theta", b.theta},
                {"c_tilde", b.c_tilde},
                {"k_tilde", b.k_tilde},
                {"lambda_star", b.lambda_star},
                {"ell", b.ell},
                {"ball_radius", b.ball_radius()},
                {"m_eff", b.m_eff},
                {"case", b.case1 ? 1 : 2},
                {"M", finite_or_null(b.M)},
                {"norm_f_m", b.norm_f_m},
                {"norm_mu_inf", b.norm_mu_inf},
                {"omega_power", b.omega_power},
                {"identity_gap", b.identity_gap}};
}

// closed-form torsion profile on balls (intervals and disks): the profile
// (rho^2 - |x-c|^2)^sigma / kappa with kappa = 2^{2s}Gamma(1+s)Gamma(N/2+s)/Gamma(N/2)
double torsion_kappa(int N, double sigma) {
    return std::pow(2.0, 2.0 * sigma) * std::tgamma(sigma + 1.0) *
           std::tgamma(0.5 * N + sigma) / std::tgamma(0.5 * N);
}

bool has_ball_closed_form(const Domain& d) {
    return d.shape() == Shape::interval || d.shape() == Shape::disk;
}

double torsion_profile(const Domain& d, double sigma, const Point& x) {
    const Point c = d.incenter();
    const double rho = d.inradius();
    const double dx = x[0] - c[0], dy = x[1] - c[1];
    const double r2 = dx * dx + dy * dy;
    const double val = std::max(0.0, rho * rho - r2);
    return std::pow(val, sigma) / torsion_kappa(d.dimension(), sigma);
}

Products run_solve_poisson(const json& cfg, const std::shared_ptr<const Grid>& grid,
                           CounterRng& rng) {
    (void)rng;
    check_keys(cfg, {"experiment", "domain", "h", "seed", "output_dir", "s", "f"}, "config");
    const double s = need_number(cfg, "s", "config");
    if (!(s > 0.0 && s < 1.0)) throw validation_error("config: s must lie in (0,1)");
    if (!cfg.contains("f")) throw validation_error("config: solve_poisson needs f");
    Field f = parse_field(cfg["f"], grid, "f");

    GreenOperator green(grid, s);
    Field u = green.solve(f);
    const double residual = (green.apply(u.values) - f.values).cwiseAbs().maxCoeff();

    Products out;
    out.report["s"] = s;
    out.report["h"] = grid->spacing();
    out.report["nodes"] = grid->node_count();
    out.report["residual_inf"] = residual;
    // with constant data on a ball the scaled profile is exact
    if (has_ball_closed_form(grid->domain()) && cfg["f"].is_number()) {
        const double amp = cfg["f"].get<double>();
        double err = 0.0;
        int count = 0;
        for (int i = 0; i < grid->node_count(); ++i) {
            if (grid->delta()[static_cast<std::size_t>(i)] <= 0.05) continue;
            const double exact = amp * torsion_profile(grid->domain(), s, grid->nodes()[i]);
            err = std::max(err, std::abs(u.values[i] - exact));
            ++count;
        }
        out.report["interior_max_error_vs_profile"] = err;
        out.report["interior_nodes"] = count;
    }
    out.fields.emplace_back("solution", std::move(u));
    return out;
}

Products run_operator_validate(const json& cfg, const std::shared_ptr<const Grid>& grid,
                               CounterRng& rng) {
    check_keys(cfg, {"experiment", "domain", "h", "seed", "output_dir", "sigma", "samples"},
               "config");
    const double sigma = need_number(cfg, "sigma", "config");
    if (!(sigma > 0.0 && sigma < 1.0)) throw validation_error("config: sigma must lie in (0,1)");
    const int samples = static_cast<int>(opt_number(cfg, "samples", 60));
    if (samples < 1) throw validation_error("config: samples must be >= 1");

    OperatorMatrix M = assemble_frac_laplacian(grid, sigma);
    const int n = grid->node_count();
    double sym = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            sym = std::max(sym, std::abs(M.entries()(i, j) - M.entries()(j, i)));

    GreenOperator green(grid, sigma);
    double quad_min = std::numeric_limits<double>::infinity();
    double green_min = std::numeric_limits<double>::infinity();
    double stein_hom = 0.0;
    double interp_max = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < samples; ++k) {
        Field u;
        u.grid = grid;
        u.values.resize(n);
        for (int i = 0; i < n; ++i) u.values[i] = rng.uniform(-1.0, 1.0);
        const double qf = u.values.dot(M.apply(u.values)) * grid->cell_measure();
        quad_min = std::min(quad_min, qf / std::max(u.values.squaredNorm(), 1e-300));
        Field hpos;
        hpos.grid = grid;
        hpos.values = u.values.cwiseAbs();
        green_min = std::min(green_min, green.solve(hpos).values.minCoeff());
        Field d1 = stein_functional(u, sigma);
        Field u3;
        u3.grid = grid;
        u3.values = -3.0 * u.values;
        Field d3 = stein_functional(u3, sigma);
        stein_hom = std::max(stein_hom, (d3.values - 3.0 * d1.values).cwiseAbs().maxCoeff());
        interp_max = std::max(interp_max, interpolation_defect(u, 2.0, 0.5, 4.0));
    }

    Products out;
    out.report["sigma"] = sigma;
    out.report["h"] = grid->spacing();
    out.report["nodes"] = n;
    out.report["samples"] = samples;
    out.report["matrix_symmetry_error"] = sym;
    out.report["quadratic_form_min"] = quad_min;
    out.report["green_positivity_min"] = green_min;
    out.report["stein_homogeneity_error"] = stein_hom;
    out.report["interpolation_max_defect"] = interp_max;
    if (has_ball_closed_form(grid->domain())) {
        Field u = make_field(grid, [&](const Point& x) {
            return torsion_kappa(grid->dimension(), sigma) *
                   torsion_profile(grid->domain(), sigma, x);
        });
        const Eigen::VectorXd v = apply_frac_laplacian(u, sigma);
        double err = 0.0;
        for (int i = 0; i < n; ++i)
            if (grid->delta()[static_cast<std::size_t>(i)] > 0.05)
                err = std::max(err, std::abs(v[i] - 1.0));
        out.report["getoor_interior_error"] = err;

        json rows = json::array();
        auto push_row = [&](NormKind kind, const char* label, double sg, double p) {
            const NormReport r = norm_report(u, kind, sg, p);
            rows.push_back(json{{"kind", label},
                                {"sigma", sg},
                                {"p", p},
                                {"value", r.value},
                                {"grid_h", r.grid_h}});
        };
        push_row(NormKind::lebesgue, "lebesgue", 0.0, 2.0);
        push_row(NormKind::gagliardo, "gagliardo", sigma, 2.0);
        push_row(NormKind::stein, "stein", sigma, 2.0);
        push_row(NormKind::holder, "holder", sigma, 0.0);
        out.report["norms"] = rows;
    }
    return out;
}

Products run_cz_probe(const json& cfg, const std::shared_ptr<const Grid>& grid, CounterRng& rng,
                      std::uint64_t seed) {
    check_keys(cfg, {"experiment", "domain", "h", "seed", "output_dir", "s", "t", "p", "m",
                     "samples"},
               "config");
    const double s = need_number(cfg, "s", "config");
    const double t = need_number(cfg, "t", "config");
    const double p = need_number(cfg, "p", "config");
    const double m = need_number(cfg, "m", "config");
    const int samples = static_cast<int>(opt_number(cfg, "samples", 50));
    CZEstimate est = estimate_cz_constant(grid, s, t, p, m, samples, rng);
    Products out;
    out.report = cz_to_json(est);
    out.constants.push_back({"C_tilde", est.c_tilde, cz_provenance(est, seed)});
    return out;
}

struct ThresholdRun {
    ProblemSpec spec;
    MeasuredConstants mc;
    ThresholdBundle bundle;
    std::shared_ptr<GreenOperator> green;
};

ThresholdRun make_threshold_run(const json& cfg, const std::shared_ptr<const Grid>& grid,
                                CounterRng& rng) {
    if (!cfg.contains("problem")) throw validation_error("config: problem block required");
    ParsedProblem pp = parse_problem(cfg["problem"], grid);
    const int cz_samples = static_cast<int>(opt_number(cfg, "cz_samples", 50));
    const int embed_samples = static_cast<int>(opt_number(cfg, "embed_samples", 12));
    if (cz_samples < 1 || embed_samples < 1)
        throw validation_error("config: sample counts must be >= 1");
    ThresholdRun run{std::move(pp.spec), {}, {}, nullptr};
    run.green = std::make_shared<GreenOperator>(grid, run.spec.s);
    run.mc = measure_constants(run.spec, *run.green, cz_samples, embed_samples, rng);
    run.bundle = thresholds(run.spec, run.mc);
    return run;
}

void push_threshold_constants(Products& out, const ThresholdRun& run, std::uint64_t seed) {
    out.constants.push_back({"C_tilde", run.mc.cz.c_tilde, cz_provenance(run.mc.cz, seed)});
    std::ostringstream ks;
    ks << "max sampled W-norm ratio sigma=" << run.spec.t << " -> sigma'=" << run.bundle.gamma
       << " at p=" << run.bundle.r << ", h=" << run.spec.grid->spacing() << ", seed=" << seed;
    out.constants.push_back({"k_tilde", run.mc.k_tilde, ks.str()});
    if (run.mc.cz_m1)
        out.constants.push_back({"C_tilde_m1", run.mc.cz_m1->c_tilde,
                                 cz_provenance(*run.mc.cz_m1, seed) + " (Omega-restricted proxy)"});
    out.constants.push_back(
        {"lambda_star", run.bundle.lambda_star, "closed smallness-threshold formula at measured C_tilde, k_tilde"});
}

Products run_thresholds(const json& cfg, const std::shared_ptr<const Grid>& grid, CounterRng& rng,
                        std::uint64_t seed) {
    check_keys(cfg, {"experiment", "domain", "h", "seed", "output_dir", "problem", "cz_samples",
                     "embed_samples"},
               "config");
    ThresholdRun run = make_threshold_run(cfg, grid, rng);
    Products out;
    out.report["problem"] = run.bundle.case1 ? "case 1 (m > N/s)" : "case 2 (1 <= m <= N/s)";
    out.report["bundle"] = bundle_to_json(run.bundle);
    out.report["cz"] = cz_to_json(run.mc.cz);
    if (run.mc.cz_m1) out.report["cz_m1"] = cz_to_json(*run.mc.cz_m1);
    out.report["variant"] = variant_name(run.spec.variant);
    out.report["a1_strict"] = run.spec.a1_strict;
    push_threshold_constants(out, run, seed);
    return out;
}

Products run_iterate(const json& cfg, const std::shared_ptr<const Grid>& grid, CounterRng& rng,
                     std::uint64_t seed) {
    check_keys(cfg, {"experiment", "domain", "h", "seed", "output_dir", "problem", "cz_samples",
                     "embed_samples", "max_iter", "tol", "lambda_frac_of_star"},
               "config");
    ThresholdRun run = make_threshold_run(cfg, grid, rng);
    const int max_iter = static_cast<int>(opt_number(cfg, "max_iter", 200));
    const double tol = opt_number(cfg, "tol", 1e-10);
    if (max_iter < 1 || !(tol > 0.0)) throw validation_error("config: bad max_iter/tol");
    if (cfg.contains("lambda_frac_of_star")) {
        const double frac = need_number(cfg, "lambda_frac_of_star", "config");
        if (!(frac >= 0.0)) throw validation_error("config: lambda_frac_of_star must be >= 0");
        run.spec.lambda = frac * run.bundle.lambda_star;
    }

    const Field zero = make_field(grid, 0.0);
    auto [u, rep] = iterate(run.spec, *run.green, zero, max_iter, tol, run.bundle.ball_radius());

    Products out;
    out.report["bundle"] = bundle_to_json(run.bundle);
    out.report["lambda"] = run.spec.lambda;
    out.report["variant"] = variant_name(run.spec.variant);
    out.report["converged"] = rep.converged;
    out.report["diverged"] = rep.diverged;
    out.report["iterations"] = rep.iterations;
    out.report["residual"] = finite_or_null(rep.residual);
    out.report["ball_radius"] = finite_or_null(rep.ball_radius);
    out.report["proxy_kind"] = rep.proxy_kind;
    out.report["linf_trace"] = rep.linf_trace;
    json proxies = json::array();
    for (double v : rep.proxy_trace) proxies.push_back(finite_or_null(v));
    out.report["proxy_trace"] = proxies;
    out.report["in_ball"] = rep.in_ball;
    push_threshold_constants(out, run, seed);
    out.fields.emplace_back("solution", std::move(u));
    return out;
}

Products run_sweep(const json& cfg, const std::shared_ptr<const Grid>& grid, CounterRng& rng,
                   std::uint64_t seed) {
    check_keys(cfg, {"experiment", "domain", "h", "seed", "output_dir", "problem", "lambdas",
                     "cz_samples", "embed_samples", "max_iter", "tol"},
               "config");
    if (!cfg.contains("lambdas") || !cfg["lambdas"].is_array() || cfg["lambdas"].empty())
        throw validation_error("config: sweep needs a non-empty lambdas array");
    std::vector<double> lambdas;
    for (const auto& v : cfg["lambdas"]) {
        if (!v.is_number()) throw validation_error("config: lambdas must be numbers");
        lambdas.push_back(v.get<double>());
    }
    if (!std::is_sorted(lambdas.begin(), lambdas.end()))
        throw validation_error("config: lambdas must be sorted ascending");
    const int max_iter = static_cast<int>(opt_number(cfg, "max_iter", 200));
    const double tol = opt_number(cfg, "tol", 1e-10);

    ThresholdRun run = make_threshold_run(cfg, grid, rng);

    std::optional<double> lambda_ss;
    if (run.spec.variant == GradientVariant::half_laplacian) {
        try {
            lambda_ss = lambda_starstar_kpz1(grid, run.spec.s, run.spec.t, run.spec.q,
                                             std::max(run.spec.mu_min, 0.0), run.spec.f)
                            .lambda_ss;
        } catch (const validation_error&) {
            // hypotheses of the explicit threshold not met; overlay omitted
        }
    } else if (run.spec.variant == GradientVariant::stein) {
        try {
            lambda_ss = lambda_starstar_kpz3(grid, run.spec.s, run.spec.t, run.spec.q,
                                             std::max(run.spec.mu_min, 0.0), run.spec.f,
                                             default_bump_family(grid))
                            .lambda_ss;
        } catch (const validation_error&) {
        }
    }

    SweepReport rep = lambda_sweep(run.spec, lambdas, *run.green, max_iter, tol,
                                   run.bundle.lambda_star, lambda_ss);

    std::ostringstream csv;
    csv << "lambda,converged,iterations,final_linf,residual\n";
    for (const auto& row : rep.rows)
        csv << fmt17(row.lambda) << "," << (row.converged ? 1 : 0) << "," << row.iterations << ","
            << fmt17(row.final_linf) << "," << fmt17(row.residual) << "\n";

    Products out;
    out.report["bundle"] = bundle_to_json(run.bundle);
    out.report["lambda_star_hat"] = run.bundle.lambda_star;
    out.report["lambda_ss_hat"] = lambda_ss ? json(*lambda_ss) : json(nullptr);
    out.report["largest_converged"] = finite_or_null(rep.largest_converged);
    out.report["smallest_diverged"] = finite_or_null(rep.smallest_diverged);
    json rows = json::array();
    for (const auto& row : rep.rows)
        rows.push_back(json{{"lambda", row.lambda},
                            {"converged", row.converged},
                            {"diverged", row.diverged},
                            {"iterations", row.iterations},
                            {"final_linf", finite_or_null(row.final_linf)},
                            {"residual", finite_or_null(row.residual)}});
    out.report["rows"] = rows;
    out.report["grid"] = {{"h", grid->spacing()}, {"nodes", grid->node_count()}};
    push_threshold_constants(out, run, seed);
    if (lambda_ss)
        out.constants.push_back(
            {"lambda_starstar", *lambda_ss, "explicit non-existence threshold on this grid"});
    out.raw.emplace_back("sweep.csv", csv.str());
    return out;
}

Products run_nonexist_kpz1(const json& cfg, const std::shared_ptr<const Grid>& grid) {
    check_keys(cfg, {"experiment", "domain", "h", "seed", "output_dir", "s", "t", "q", "mu1", "f"},
               "config");
    const double s = need_number(cfg, "s", "config");
    const double t = need_number(cfg, "t", "config");
    const double q = need_number(cfg, "q", "config");
    const double mu1 = need_number(cfg, "mu1", "config");
    if (!cfg.contains("f")) throw validation_error("config: nonexist_kpz1 needs f");
    Field f = parse_field(cfg["f"], grid, "f");
    NonexistenceBundle b = lambda_starstar_kpz1(grid, s, t, q, mu1, f);

    Products out;
    out.report["s"] = s;
    out.report["t"] = t;
    out.report["q"] = q;
    out.report["mu1"] = mu1;
    out.report["c_q"] = b.c_q;
    out.report["c0_phi"] = b.c0_phi;
    out.report["c0_psi"] = b.c0_psi;
    out.report["integral_ratio"] = b.integral_ratio;
    out.report["integral_fphi"] = b.integral_fphi;
    out.report["lambda_starstar"] = b.lambda_ss;
    out.constants.push_back(
        {"C_q", b.c_q, "sharp Young constant (q-1) q^{-q/(q-1)} of the pairing split"});
    out.constants.push_back({"lambda_starstar", b.lambda_ss,
                             "node quadrature of the torsion integrals on this grid"});
    out.fields.emplace_back("phi", b.phi);
    out.fields.emplace_back("psi", b.psi);
    return out;
}

Products run_nonexist_kpz3(const json& cfg, const std::shared_ptr<const Grid>& grid) {
    check_keys(cfg, {"experiment", "domain", "h", "seed", "output_dir", "s", "t", "q", "mu1", "f",
                     "bumps"},
               "config");
    const double s = need_number(cfg, "s", "config");
    const double t = need_number(cfg, "t", "config");
    const double q = need_number(cfg, "q", "config");
    const double mu1 = need_number(cfg, "mu1", "config");
    const int nbumps = static_cast<int>(opt_number(cfg, "bumps", 8));
    if (nbumps < 1) throw validation_error("config: bumps must be >= 1");
    if (!cfg.contains("f")) throw validation_error("config: nonexist_kpz3 needs f");
    Field f = parse_field(cfg["f"], grid, "f");

    const auto widths = default_bump_widths(grid->domain(), nbumps);
    Kpz3Threshold res = lambda_starstar_kpz3(grid, s, t, q, mu1, f, default_bump_family(grid, nbumps));

    Products out;
    out.report["s"] = s;
    out.report["t"] = t;
    out.report["q"] = q;
    out.report["mu1"] = mu1;
    out.report["lambda_starstar_upper"] = res.lambda_ss;
    out.report["note"] = "upper estimate of the infimum over the mollified-bump family";
    out.report["chain_constant"] = {{"young_c_q", res.c_q_young},
                                    {"mvt_c_q", res.c_q_mvt},
                                    {"kernel_split", res.kernel_split},
                                    {"mu1_power", -1.0 / (q - 1.0)},
                                    {"value", res.chain_constant}};
    json rows = json::array();
    for (const auto& r : res.bumps)
        rows.push_back(json{{"index", r.index},
                            {"width", r.index < static_cast<int>(widths.size())
                                          ? json(widths[static_cast<std::size_t>(r.index)])
                                          : json(nullptr)},
                            {"numerator", r.numerator},
                            {"denominator", r.denominator},
                            {"ratio", finite_or_null(r.ratio)},
                            {"admissible", r.admissible}});
    out.report["bumps"] = rows;
    out.constants.push_back({"C_q_mu1_chain", res.chain_constant,
                             "Young(eps=mu1) x (2 q/(q-1) x kernel split)^{q/(q-1)}, assembled "
                             "from the proof chain"});
    out.constants.push_back({"lambda_starstar_upper", res.lambda_ss,
                             "minimum bump quotient; upper estimate of the infimum"});
    return out;
}

Products run_decomposition(const json& cfg, const std::shared_ptr<const Grid>& grid) {
    check_keys(cfg, {"experiment", "domain", "h", "seed", "output_dir", "s", "t", "f",
                     "lambda_shift"},
               "config");
    const double s = need_number(cfg, "s", "config");
    const double t = need_number(cfg, "t", "config");
    if (!cfg.contains("f")) throw validation_error("config: decomposition needs f");
    Field f = parse_field(cfg["f"], grid, "f");
    const double shift = opt_number(cfg, "lambda_shift", -1.0);

    GreenOperator green(grid, s);
    DecompositionReport rep = decomposition_diagnostics(green, t, f, shift);

    Products out;
    out.report["s"] = s;
    out.report["t"] = t;
    out.report["lambda_shift"] = rep.lambda_shift;
    out.report["fitted_C"] = finite_or_null(rep.fitted_C);
    out.report["interior_nodes"] = rep.interior_count;
    out.report["med_ok"] = rep.med_ok;
    out.report["far_ok"] = rep.far_ok;
    auto samples_json = [](const std::vector<ExteriorCheckSample>& v) {
        json arr = json::array();
        for (const auto& s2 : v)
            arr.push_back(json{{"x", {s2.x[0], s2.x[1]}}, {"lhs", s2.lhs}, {"rhs", s2.rhs}});
        return arr;
    };
    out.report["med_samples"] = samples_json(rep.med_samples);
    out.report["far_samples"] = samples_json(rep.far_samples);
    out.constants.push_back({"fitted_C", rep.fitted_C,
                             "smallest interior constant closing the decomposition bound on "
                             "nodes with delta > 2h"});

    Field u = green.solve(f);
    auto wrap = [&](const Eigen::VectorXd& v) {
        Field w;
        w.grid = grid;
        w.values = v;
        return w;
    };
    out.fields.emplace_back("solution", std::move(u));
    out.fields.emplace_back("g1", wrap(rep.g1));
    out.fields.emplace_back("g2", wrap(rep.g2));
    out.fields.emplace_back("g3", wrap(rep.g3));
    out.fields.emplace_back("half_laplacian_abs", wrap(rep.lhs));
    return out;
}

} // namespace

std::string config_hash_hex(const std::string& canonical_config) {
    std::uint64_t hash = 14695981039346656037ull;
    for (unsigned char c : canonical_config) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

void emit_field_csv(const Field& field, const std::string& path) {
    const Grid& g = *field.grid;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("emit_field_csv: cannot open " + path);
    os << (g.dimension() == 1 ? "x1,value\n" : "x1,x2,value\n");
    for (int i = 0; i < g.node_count(); ++i) {
        if (g.dimension() == 1)
            os << fmt17(g.nodes()[i][0]) << "," << fmt17(field.values[i]) << "\n";
        else
            os << fmt17(g.nodes()[i][0]) << "," << fmt17(g.nodes()[i][1]) << ","
               << fmt17(field.values[i]) << "\n";
    }
    if (!os.good()) throw io_error("emit_field_csv: write failure on " + path);
}

RunManifest run_experiment(const std::string& config_json, const std::string& out_dir,
                           std::optional<std::uint64_t> seed_override) {
    json cfg;
    try {
        cfg = json::parse(config_json);
    } catch (const std::exception& e) {
        throw validation_error(std::string("config: JSON parse failure: ") + e.what());
    }
    if (!cfg.is_object()) throw validation_error("config: top level must be a single object");
    if (!cfg.contains("experiment") || !cfg["experiment"].is_string())
        throw validation_error("config: experiment kind required");
    const std::string kind = cfg["experiment"].get<std::string>();
    if (!cfg.contains("domain")) throw validation_error("config: domain required");
    const Domain domain = parse_domain(cfg["domain"]);
    const double h = need_number(cfg, "h", "config");
    std::uint64_t seed = 0;
    if (cfg.contains("seed")) {
        if (!cfg["seed"].is_number_integer() || cfg["seed"].get<long long>() < 0)
            throw validation_error("config: seed must be a non-negative integer");
        seed = cfg["seed"].get<std::uint64_t>();
    }
    if (seed_override) seed = *seed_override;

    std::string dir = out_dir;
    if (dir.empty() && cfg.contains("output_dir")) {
        if (!cfg["output_dir"].is_string())
            throw validation_error("config: output_dir must be a string");
        dir = cfg["output_dir"].get<std::string>();
    }
    if (dir.empty()) throw validation_error("config: no output directory given");

    const auto grid = make_grid(domain, h);
    CounterRng rng(seed);

    Products products;
    if (kind == "solve_poisson")
        products = run_solve_poisson(cfg, grid, rng);
    else if (kind == "operator_validate")
        products = run_operator_validate(cfg, grid, rng);
    else if (kind == "cz_probe")
        products = run_cz_probe(cfg, grid, rng, seed);
    else if (kind == "thresholds")
        products = run_thresholds(cfg, grid, rng, seed);
    else if (kind == "iterate")
        products = run_iterate(cfg, grid, rng, seed);
    else if (kind == "sweep")
        products = run_sweep(cfg, grid, rng, seed);
    else if (kind == "nonexist_kpz1")
        products = run_nonexist_kpz1(cfg, grid);
    else if (kind == "nonexist_kpz3")
        products = run_nonexist_kpz3(cfg, grid);
    else if (kind == "decomposition")
        products = run_decomposition(cfg, grid);
    else
        throw validation_error("config: unknown experiment kind '" + kind + "'");

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(fs::path(dir) / "fields", ec);
    if (ec) throw io_error("run_experiment: cannot create output directory " + dir);

    RunManifest manifest;
    manifest.config_hash = config_hash_hex(cfg.dump());
    manifest.code_version = kCodeVersion;
    manifest.timestamp = iso_timestamp();
    manifest.experiment = kind;
    manifest.seed = seed;
    manifest.constants = products.constants;

    products.report["experiment"] = kind;
    products.report["seed"] = seed;
    products.report["domain"] = domain.describe();

    for (const auto& [name, field] : products.fields) {
        const std::string rel = "fields/" + name + ".csv";
        emit_field_csv(field, (fs::path(dir) / rel).string());
        manifest.outputs.push_back(rel);
    }
    for (const auto& [name, content] : products.raw) {
        std::ofstream os(fs::path(dir) / name, std::ios::binary);
        if (!os) throw io_error("run_experiment: cannot open " + name);
        os << content;
        manifest.outputs.push_back(name);
    }
    {
        std::ofstream os(fs::path(dir) / "report.json", std::ios::binary);
        if (!os) throw io_error("run_experiment: cannot open report.json");
        os << products.report.dump(2) << "\n";
        manifest.outputs.push_back("report.json");
    }
    manifest.outputs.push_back("manifest.json");
    {
        json mj;
        mj["config_hash"] = manifest.config_hash;
        mj["code_version"] = manifest.code_version;
        mj["timestamp"] = manifest.timestamp;
        mj["experiment"] = manifest.experiment;
        mj["seed"] = manifest.seed;
        mj["outputs"] = manifest.outputs;
        json consts = json::array();
        for (const auto& c : manifest.constants)
            consts.push_back(
                json{{"name", c.name}, {"value", finite_or_null(c.value)}, {"provenance", c.provenance}});
        mj["constants"] = consts;
        std::ofstream os(fs::path(dir) / "manifest.json", std::ios::binary);
        if (!os) throw io_error("run_experiment: cannot open manifest.json");
        os << mj.dump(2) << "\n";
    }
    return manifest;
}

RunManifest run_experiment_file(const std::string& config_path, const std::string& out_dir,
                                std::optional<std::uint64_t> seed_override) {
    std::ifstream is(config_path, std::ios::binary);
    if (!is) throw io_error("run_experiment_file: cannot read " + config_path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return run_experiment(ss.str(), out_dir, seed_override);
}

} // namespace frackpz
