#include "frackpz/nonexist.hpp"
#include "frackpz/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace frackpz {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

double young_cq(double q) { return (q - 1.0) * std::pow(q, -q / (q - 1.0)); }
} // namespace

Field torsion_function(std::shared_ptr<const Grid> grid, double sigma) {
    Field ones = make_field(grid, 1.0);
    Field phi = solve_poisson(std::move(grid), sigma, ones);
    if (phi.values.minCoeff() <= 0.0)
        throw numerical_error("torsion_function: positivity lost (maximum principle violated)");
    return phi;
}

EnvelopePair boundary_envelope(const Field& phi, double sigma) {
    if (!(sigma > 0.0 && sigma < 1.0)) throw validation_error("boundary_envelope: sigma in (0,1)");
    const Grid& g = *phi.grid;
    const double cut = 2.0 * g.spacing();
    EnvelopePair env;
    env.lo = std::numeric_limits<double>::infinity();
    env.hi = 0.0;
    int count = 0;
    for (int i = 0; i < g.node_count(); ++i) {
        const double d = g.delta()[static_cast<std::size_t>(i)];
        if (d <= cut) continue;
        const double ratio = phi.values[i] / std::pow(d, sigma);
        env.lo = std::min(env.lo, ratio);
        env.hi = std::max(env.hi, ratio);
        ++count;
    }
    if (count < 10)
        throw validation_error("boundary_envelope: fewer than 10 nodes with delta > 2h");
    if (!(env.lo > 0.0)) throw numerical_error("boundary_envelope: non-positive profile");
    return env;
}

NonexistenceBundle lambda_starstar_kpz1(std::shared_ptr<const Grid> grid, double s, double t,
                                        double q, double mu1, const Field& f) {
    if (!(s > 0.0 && s < 1.0)) throw validation_error("lambda_starstar_kpz1: s in (0,1)");
    if (!(t > 0.0 && t < std::min(1.0, 2.0 * s)))
        throw validation_error("lambda_starstar_kpz1: requires 0 < t < min{1,2s}");
    if (!(q > 2.0 * (s + 1.0) / (t + 2.0))) {
        std::ostringstream os;
        os << "lambda_starstar_kpz1: hypothesis q > 2(s+1)/(t+2) = " << 2.0 * (s + 1.0) / (t + 2.0)
           << " violated (q=" << q << ")";
        throw validation_error(os.str());
    }
    if (!(mu1 > 0.0)) throw validation_error("lambda_starstar_kpz1: mu1 must be positive");

    NonexistenceBundle b;
    b.s = s;
    b.t = t;
    b.q = q;
    b.mu1 = mu1;
    b.phi = torsion_function(grid, s);
    b.psi = torsion_function(grid, 0.5 * t);
    b.c0_phi = boundary_envelope(b.phi, s).certified();
    b.c0_psi = boundary_envelope(b.psi, 0.5 * t).certified();
    b.c_q = young_cq(q);

    const double cell = grid->cell_measure();
    const double qp = q / (q - 1.0);
    double i1 = 0.0, i2 = 0.0;
    for (int i = 0; i < grid->node_count(); ++i) {
        i1 += std::pow(b.psi.values[i], qp) * std::pow(b.phi.values[i], -1.0 / (q - 1.0)) * cell;
        i2 += f.values[i] * b.phi.values[i] * cell;
    }
    b.integral_ratio = i1;
    b.integral_fphi = i2;
    if (!(i2 > 0.0))
        throw validation_error("lambda_starstar_kpz1: int f phi must be positive (f >= 0, f != 0)");
    b.lambda_ss = b.c_q * i1 / (std::pow(mu1, 1.0 / (q - 1.0)) * i2);
    return b;
}

std::vector<double> default_bump_widths(const Domain& domain, int count) {
    std::vector<double> widths;
    const double w0 = 0.9 * domain.inradius();
    for (int j = 0; j < count; ++j) widths.push_back(w0 * std::pow(2.0, -j));
    return widths;
}

std::vector<Field> default_bump_family(std::shared_ptr<const Grid> grid, int count) {
    const Point c = grid->domain().incenter();
    std::vector<Field> bumps;
    for (double w : default_bump_widths(grid->domain(), count)) {
        bumps.push_back(make_field(grid, [&](const Point& x) {
            const double dx = x[0] - c[0], dy = x[1] - c[1];
            const double rho = std::sqrt(dx * dx + dy * dy) / w;
            return rho < 1.0 ? std::pow(std::cos(0.5 * kPi * rho), 2) : 0.0;
        }));
    }
    return bumps;
}

Kpz3Threshold lambda_starstar_kpz3(std::shared_ptr<const Grid> grid, double s, double t, double q,
                                   double mu1, const Field& f, const std::vector<Field>& bumps) {
    if (!(t > 0.0 && t < std::min(1.0, 2.0 * s)))
        throw validation_error("lambda_starstar_kpz3: requires 0 < t < min{1,2s}");
    if (!(q > 1.0)) throw validation_error("lambda_starstar_kpz3: q > 1");
    if (!(mu1 > 0.0)) throw validation_error("lambda_starstar_kpz3: mu1 must be positive");
    const double conj = 2.0 * s - t;
    if (!(conj > 0.0 && conj < 1.0))
        throw validation_error("lambda_starstar_kpz3: conjugate order 2s-t must lie in (0,1)");
    if (bumps.empty()) throw validation_error("lambda_starstar_kpz3: empty bump family");

    const int N = grid->dimension();
    Kpz3Threshold out;
    out.c_q_young = young_cq(q);
    out.c_q_mvt = q / (q - 1.0);
    out.kernel_split = kernel_constants(N, s).a /
                       std::sqrt(kernel_constants(N, t).a * kernel_constants(N, conj).a);
    // chain: MVT + symmetrization give 2*C_mvt, Cauchy-Schwarz splits the
    // kernel, Young with epsilon = mu1 pays mu1^{-1/(q-1)} and raises the
    // remaining factor to q/(q-1)
    const double qp = q / (q - 1.0);
    out.chain_constant = out.c_q_young * std::pow(mu1, -1.0 / (q - 1.0)) *
                         std::pow(2.0 * out.c_q_mvt * out.kernel_split, qp);

    const double cell = grid->cell_measure();
    double best = std::numeric_limits<double>::infinity();
    int idx = 0;
    for (const Field& bump : bumps) {
        BumpRatio row;
        row.index = idx++;
        row.width = 0.0;
        double num = 0.0, den = 0.0;
        const Field d = stein_functional(bump, conj);
        for (int i = 0; i < grid->node_count(); ++i) {
            num += std::pow(d.values[i], qp) * cell;
            den += f.values[i] * std::pow(std::max(bump.values[i], 0.0), qp) * cell;
        }
        row.numerator = out.chain_constant * num;
        row.denominator = den;
        if (!(den > 0.0)) {
            row.admissible = false; // violates the admissibility pairing, skipped
            out.bumps.push_back(row);
            continue;
        }
        row.ratio = row.numerator / den;
        best = std::min(best, row.ratio);
        out.bumps.push_back(row);
    }
    if (!std::isfinite(best))
        throw validation_error("lambda_starstar_kpz3: every bump violated the admissibility pairing");
    out.lambda_ss = best;
    return out;
}

ChainCheckReport nonexistence_chain_check(const Field& u, const NonexistenceBundle& bundle,
                                          const ProblemSpec& spec) {
    if (!(spec.t < 2.0 * spec.s))
        throw validation_error("nonexistence_chain_check: requires t < 2s");
    const Grid& g = *spec.grid;
    const double cell = g.cell_measure();
    const double q = spec.q;
    const double qp = q / (q - 1.0);

    const Eigen::VectorXd du = apply_frac_laplacian(u, 0.5 * spec.t); // signed half t-Laplacian

    ChainCheckReport rep;
    double lhs41 = 0.0, rhs41 = 0.0, lhs43 = 0.0;
    double young_lhs = 0.0, young_rhs = 0.0;
    for (int i = 0; i < g.node_count(); ++i) {
        lhs41 += u.values[i] * cell;
        rhs41 += (spec.mu.values[i] * std::pow(std::abs(du[i]), q) * bundle.phi.values[i] +
                  spec.lambda * spec.f.values[i] * bundle.phi.values[i]) *
                 cell;
        lhs43 += bundle.psi.values[i] * du[i] * cell;
        young_lhs += bundle.psi.values[i] * du[i] * cell;
        young_rhs += (bundle.mu1 * std::pow(std::abs(du[i]), q) * bundle.phi.values[i] +
                      bundle.c_q * std::pow(bundle.mu1, -1.0 / (q - 1.0)) *
                          std::pow(bundle.psi.values[i], qp) *
                          std::pow(bundle.phi.values[i], -1.0 / (q - 1.0))) *
                     cell;
    }
    rep.gap41 = std::abs(lhs41 - rhs41);
    rep.gap43 = std::abs(lhs43 - lhs41);
    rep.young44_slack = young_rhs - young_lhs;
    rep.young_ok = rep.young44_slack >= -1e-10 * std::max(1.0, std::abs(young_rhs));
    return rep;
}

} // namespace frackpz
