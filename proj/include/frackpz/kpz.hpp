#ifndef FRACKPZ_KPZ_HPP
#define FRACKPZ_KPZ_HPP

#include "frackpz/exponents.hpp"
#include "frackpz/poisson.hpp"

#include <optional>
#include <string>
#include <vector>

namespace frackpz {

enum class GradientVariant { half_laplacian, riesz_gradient, stein };

std::string variant_name(GradientVariant v);
GradientVariant variant_from_name(const std::string& name);

// The problem tuple (-Delta)^s u = mu |D_t u|^q + lambda f with exterior zero
// condition.  Construction checks the structural assumptions: q > 1 and
// t < min{1, s(1+1/N)} at least; the sharper t < min{1, s(1+1/(qN))} is
// recorded in `a1_strict`.
struct ProblemSpec {
    std::shared_ptr<const Grid> grid;
    double s = 0.0, t = 0.0, q = 0.0, lambda = 0.0, m = 1.0;
    Field mu, f;
    GradientVariant variant = GradientVariant::half_laplacian;
    bool a1_strict = false;
    double mu_min = 0.0, mu_max = 0.0; // mu_1, mu_2 of the non-existence section

    static ProblemSpec make(std::shared_ptr<const Grid> grid, double s, double t, double q,
                            double lambda, Field mu, Field f, double m, GradientVariant variant);

    ProblemSpec with_lambda(double lam) const {
        ProblemSpec c = *this;
        c.lambda = lam;
        return c;
    }
    int dimension() const { return grid->dimension(); }
};

struct RInterval {
    double lo = 0.0;
    double hi = 0.0;   // +inf allowed
    double m_eff = 0.0; // data exponent actually used (lowered when it costs nothing)
    bool case1 = false; // m > N/s
};

// Open interval the exponent r must come from, per variant; empty intervals
// throw and name the violated constraint (q >= qbar, m <= mbar for stein).
RInterval admissible_r_interval(const ProblemSpec& spec);

// geometric midpoint of the admissible interval (2x the lower endpoint when
// the upper one is infinite)
double pick_r(const ProblemSpec& spec);

struct ThresholdBundle {
    double r = 0.0, gamma = 0.0, eta = 0.0, theta = 0.0;
    double c_tilde = 0.0, k_tilde = 0.0;
    double lambda_star = 0.0;
    double ell = 0.0;
    double m_eff = 0.0;
    bool case1 = true;
    double M = std::numeric_limits<double>::quiet_NaN(); // case-2 L^{gamma,1+eta} cap
    double norm_f_m = 0.0, norm_f_1 = 0.0, norm_mu_inf = 0.0;
    double omega_power = 0.0;   // |Omega|^{(r-q m)/(m r)}
    double identity_gap = 0.0;  // relative defect of the defining identity at (lambda*, ell)
    double ball_radius() const { return std::pow(ell, 1.0 / q_); }
    double q_ = 0.0;
};

// Smallness threshold lambda* and ball parameter ell: lambda* by the closed
// formula, ell as the tangency root of
//   C (|mu| |Omega|^{(r-qm)/(mr)} k^q ell + lambda* |f|_m) = ell^{1/q},
// located by bisection on the derivative plus Newton polish.  c_tilde_m1 is
// the m=1 CZ constant, required only in the 1 <= m <= N/s case for M.
ThresholdBundle thresholds(const ProblemSpec& spec, double c_tilde, double k_tilde,
                           std::optional<double> c_tilde_m1 = std::nullopt);

// |D_t u| per variant: |(-Delta)^{t/2} u|, |grad^t u|, or D_t u.
Field gradient_term(const ProblemSpec& spec, const Field& phi);

// One application of the fixed-point map: solve
// (-Delta)^s u = mu |D_t phi|^q + lambda f.
Field picard_step(const ProblemSpec& spec, const Field& phi, const GreenOperator& green);

// Stein-based stand-in for the L^{gamma,r}_0 ball norm of the existence sets.
double ball_proxy_norm(const ProblemSpec& spec, const Field& u, double gamma, double r);

struct IterationReport {
    std::vector<double> linf_trace;
    std::vector<double> proxy_trace;
    std::vector<bool> in_ball;
    bool converged = false;
    bool diverged = false;
    int blowup_index = -1;
    int iterations = 0;
    double residual = std::numeric_limits<double>::quiet_NaN();
    double ball_radius = std::numeric_limits<double>::quiet_NaN();
    std::string proxy_kind;
};

// Picard iteration of the fixed-point map from u0 (conventionally zero).
// Divergence is declared on non-finite values or sup norm beyond 1e8; all
// outcomes are encoded in the report.
std::pair<Field, IterationReport> iterate(const ProblemSpec& spec, const GreenOperator& green,
                                          const Field& u0, int max_iter, double tol,
                                          std::optional<double> ball_radius = std::nullopt);

// Max over a fixed battery of ten admissible test fields phi (torsion,
// polynomial profiles, bumps; all vanishing outside Omega) of
// |<u, M_s phi> - <mu |D_t u|^q + lambda f, phi>| / |phi|_inf.
double weak_residual(const Field& u, const ProblemSpec& spec, const GreenOperator& green);

// int_Omega | (D_t phi1)^alpha - (D_t phi2)^alpha |.
double stein_power_gap(const Field& phi1, const Field& phi2, double t, double alpha);

struct SweepRow {
    double lambda = 0.0;
    bool converged = false;
    bool diverged = false;
    int iterations = 0;
    double final_linf = 0.0;
    double residual = std::numeric_limits<double>::quiet_NaN();
};

struct SweepReport {
    std::vector<SweepRow> rows;
    double largest_converged = std::numeric_limits<double>::quiet_NaN();
    double smallest_diverged = std::numeric_limits<double>::quiet_NaN();
    double lambda_star = std::numeric_limits<double>::quiet_NaN();  // overlay
    double lambda_ss = std::numeric_limits<double>::quiet_NaN();    // overlay
};

SweepReport lambda_sweep(const ProblemSpec& spec_template, const std::vector<double>& lambdas,
                         const GreenOperator& green, int max_iter, double tol,
                         std::optional<double> lambda_star = std::nullopt,
                         std::optional<double> lambda_ss = std::nullopt);

// the ten-field battery used by weak_residual (exposed for tests)
std::vector<Field> test_field_battery(const GreenOperator& green);

struct MeasuredConstants {
    CZEstimate cz;                      // at p = r, order gamma, data exponent m_eff
    std::optional<CZEstimate> cz_m1;    // m = 1, p = 1+eta (Omega-restricted proxy); case 2 only
    double k_tilde = 1.0;               // embedding t -> gamma at exponent r (1 when t >= s)
    double eta = 0.0;
};

// the full measured-constant workflow feeding thresholds(): CZ constant at the
// exponents the existence proof uses, plus the embedding constant
MeasuredConstants measure_constants(const ProblemSpec& spec, const GreenOperator& green,
                                    int cz_samples, int embed_samples, CounterRng& rng);

ThresholdBundle thresholds(const ProblemSpec& spec, const MeasuredConstants& mc);

} // namespace frackpz

#endif
