#ifndef FRACKPZ_POISSON_HPP
#define FRACKPZ_POISSON_HPP

#include "frackpz/fracops.hpp"
#include "frackpz/rng.hpp"

#include <Eigen/Cholesky>

#include <memory>
#include <vector>

namespace frackpz {

// Discrete Green operator of (-Delta)^s with exterior zero condition: a dense
// Cholesky factorization of the assembled operator, reusable across solves.
class GreenOperator {
public:
    GreenOperator(std::shared_ptr<const Grid> grid, double s);

    const Grid& grid() const { return matrix_.grid(); }
    const std::shared_ptr<const Grid>& grid_ptr() const { return matrix_.grid_ptr(); }
    double order() const { return matrix_.order(); }
    const OperatorMatrix& matrix() const { return matrix_; }

    // solves M u = h; checks the residual to 1e-10 relative
    Field solve(const Field& h) const;
    Eigen::VectorXd solve(const Eigen::VectorXd& h) const;
    Eigen::VectorXd apply(const Eigen::VectorXd& u) const { return matrix_.apply(u); }

private:
    OperatorMatrix matrix_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
};

Field solve_poisson(std::shared_ptr<const Grid> grid, double s, const Field& h);

struct CZEstimate {
    double s = 0.0, t = 0.0, p = 0.0, m = 0.0;
    double c_tilde = 0.0;
    int sample_count = 0;
    double grid_h = 0.0;
};

// Sampled Calderon-Zygmund constant: the largest observed ratio
// (|u|_Lp + |D_t u|_Lp) / |h|_Lm over random non-negative data h (including
// bumps concentrated near the boundary and h = 1), u the Green solve of h.
CZEstimate estimate_cz_constant(const GreenOperator& green, double t, double p, double m,
                                int nsamples, CounterRng& rng);
CZEstimate estimate_cz_constant(std::shared_ptr<const Grid> grid, double s, double t, double p,
                                double m, int nsamples, CounterRng& rng);

// Same sampling with the Omega-restricted Stein norm in the numerator; valid
// for any p >= 1 (used at the small exponents where the full triple-bar norm
// is not defined).
CZEstimate estimate_cz_constant_domain_proxy(const GreenOperator& green, double t, double p,
                                             double m, int nsamples, CounterRng& rng);

struct ExteriorCheckSample {
    Point x;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct DecompositionReport {
    double s = 0.0, t = 0.0;
    double lambda_shift = 0.0;       // the free shift in the g1 kernel
    Eigen::VectorXd g1, g2, g3;      // per-node decomposition pieces
    Eigen::VectorXd lhs;             // |(-Delta)^{t/2} u| at nodes
    double fitted_C = 0.0;           // smallest C closing the interior bound
    int interior_count = 0;          // nodes with delta > 2h entering the fit
    std::vector<ExteriorCheckSample> med_samples; // B_R \ Omega, bare-kernel bound
    std::vector<ExteriorCheckSample> far_samples; // beyond B_R, explicit 4^{N+t} bound
    bool med_ok = true;
    bool far_ok = true;
};

// Interior decomposition bound |D^{t/2} u| <= C (g1 + |log d| g2 + d^{s-t} g3)
// with the g_i Riesz potentials of |h|, plus the exterior kernel bounds on
// B_R \ Omega and beyond B_R.  Report-only.
DecompositionReport decomposition_diagnostics(const GreenOperator& green, double t, const Field& h,
                                              double lambda_shift = -1.0);

} // namespace frackpz

#endif
