// Independent oracle implementations used by the test suites.  Everything in
// this header is written directly from the defining formulas (closed-form
// antiderivatives, adaptive quadrature, gamma identities) and deliberately
// shares no code with the library's kernel machinery.
#ifndef FRACKPZ_TESTS_ORACLE_HELPERS_HPP
#define FRACKPZ_TESTS_ORACLE_HELPERS_HPP

#include "frackpz/grid.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// (-Delta)^sigma (1-|x|^2)^sigma on the unit ball
inline double getoor_constant(int N, double sigma) {
    return std::pow(2.0, 2.0 * sigma) * std::tgamma(sigma + 1.0) *
           std::tgamma(0.5 * N + sigma) / std::tgamma(0.5 * N);
}

// closed-form lambda** for s = t = 1/2, q = 2, f = 1, mu1 = 1 on (-1,1):
// C_2 * int psi^2/phi / int phi with phi = (1-x^2)^{1/2}, psi = (2/sqrt(pi)) (1-x^2)^{1/4}
inline double lambda_ss_closed_form() { return 4.0 / (kPi * kPi); }

// kernel mass of the 1D cell [c-h/2, c+h/2] seen from x, kernel |x-y|^{-(1+beta)}
inline double cell_weight_1d(double beta, double x, double c, double h) {
    const double d = std::abs(x - c);
    const double r0 = d - 0.5 * h, r1 = d + 0.5 * h;
    if (beta == 0.0) return std::log(r1 / r0);
    return (std::pow(r0, -beta) - std::pow(r1, -beta)) / beta;
}

// kernel mass of (-inf,A) u (B,inf) seen from x inside (A,B)
inline double tail_weight_1d(double beta, double x, double A, double B) {
    return (std::pow(x - A, -beta) + std::pow(B - x, -beta)) / beta;
}

struct Grid1d {
    std::vector<double> x;
    double h = 0.0;
    double A = 0.0, B = 0.0; // union of the kept cells (contiguous in 1D)
};

inline Grid1d wrap(const frackpz::Grid& g) {
    Grid1d out;
    out.h = g.spacing();
    out.A = g.lattice().rect_lo()[0];
    out.B = out.A + g.node_count() * g.spacing();
    for (const auto& p : g.nodes()) out.x.push_back(p[0]);
    return out;
}

// direct-summation (-Delta)^{t/2} u at node i (1D)
inline double half_laplacian_1d(const Grid1d& g, const std::vector<double>& u, double t, int i,
                                double a_const) {
    double acc = u[static_cast<std::size_t>(i)] * tail_weight_1d(t, g.x[i], g.A, g.B);
    for (std::size_t j = 0; j < g.x.size(); ++j) {
        if (static_cast<int>(j) == i) continue;
        acc += (u[i] - u[j]) * cell_weight_1d(t, g.x[i], g.x[j], g.h);
    }
    return a_const * acc;
}

// direct-summation Riesz t-gradient at node i (1D)
inline double riesz_gradient_1d(const Grid1d& g, const std::vector<double>& u, double t, int i,
                                double mu_const) {
    double acc = u[static_cast<std::size_t>(i)] *
                 (std::pow(g.x[i] - g.A, -t) - std::pow(g.B - g.x[i], -t)) / t;
    for (std::size_t j = 0; j < g.x.size(); ++j) {
        if (static_cast<int>(j) == i) continue;
        const double sgn = g.x[i] > g.x[j] ? 1.0 : -1.0;
        acc += sgn * (u[i] - u[j]) * cell_weight_1d(t, g.x[i], g.x[j], g.h);
    }
    return mu_const * acc;
}

// direct-summation Stein t-functional at node i (1D)
inline double stein_1d(const Grid1d& g, const std::vector<double>& u, double t, int i,
                       double a_const) {
    double acc = u[static_cast<std::size_t>(i)] * u[i] * tail_weight_1d(2.0 * t, g.x[i], g.A, g.B);
    for (std::size_t j = 0; j < g.x.size(); ++j) {
        if (static_cast<int>(j) == i) continue;
        const double du = u[i] - u[j];
        acc += du * du * cell_weight_1d(2.0 * t, g.x[i], g.x[j], g.h);
    }
    return std::sqrt(0.5 * a_const * acc);
}

// direct-summation Gagliardo seminorm (1D)
inline double gagliardo_1d(const Grid1d& g, const std::vector<double>& u, double sigma, double p) {
    const double beta = sigma * p;
    double acc = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i) {
        for (std::size_t j = 0; j < g.x.size(); ++j) {
            if (i == j) continue;
            acc += std::pow(std::abs(u[i] - u[j]), p) *
                   cell_weight_1d(beta, g.x[i], g.x[j], g.h) * g.h;
        }
        acc += 2.0 * std::pow(std::abs(u[i]), p) * tail_weight_1d(beta, g.x[i], g.A, g.B) * g.h;
    }
    return std::pow(acc, 1.0 / p);
}

// adaptive Simpson on [a,b]
inline double simpson(const std::function<double(double)>& f, double a, double b, double fa,
                      double fb, double fm, double eps, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * eps)
        return left + right + (left + right - whole) / 15.0;
    return simpson(f, a, m, fa, fm, flm, 0.5 * eps, depth - 1) +
           simpson(f, m, b, fm, fb, frm, 0.5 * eps, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double eps = 1e-12) {
    const double m = 0.5 * (a + b);
    return simpson(f, a, b, f(a), f(b), f(m), eps, 48);
}

} // namespace oracle

#endif
