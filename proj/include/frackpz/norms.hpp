#ifndef FRACKPZ_NORMS_HPP
#define FRACKPZ_NORMS_HPP

#include "frackpz/fracops.hpp"
#include "frackpz/rng.hpp"

namespace frackpz {

enum class NormKind { lebesgue, gagliardo, stein, holder };

// one row of a norm table: which functional, at which exponents, on which grid
struct NormReport {
    NormKind kind = NormKind::lebesgue;
    double sigma = 0.0; // unused for lebesgue
    double p = 0.0;     // unused for holder
    double value = 0.0;
    double grid_h = 0.0;
};

NormReport norm_report(const Field& u, NormKind kind, double sigma, double p);

// (sum_i |u_i|^p cell)^{1/p}; p = infinity gives the max norm.
double lebesgue_norm(const Field& u, double p);

// Gagliardo seminorm over D_Omega = (Omega x R^N) u ((R^N \ Omega) x Omega):
// cell-integrated pair weights at kernel exponent N + sigma*p plus the exact
// radial exterior part 2 sum_i |u_i|^p tail_i.
double gagliardo_seminorm(const Field& u, double sigma, double p);

// full W^{sigma,p} norm (L^p part plus Gagliardo part)
double w_norm(const Field& u, double sigma, double p);

// ||D_sigma u||_{L^p(R^N)}: node part over Omega, shell quadrature over the
// near exterior, and a power-law estimate of the remainder beyond the tail
// radius (convergent exactly when p > 2N/(N+2 sigma)).
double stein_lp_norm(const Field& u, double sigma, double p);

// Stein-equivalent norm ||u||_Lp + ||D_sigma u||_Lp; enforces the
// p > 2N/(N+2 sigma) equivalence range.
double stein_norm(const Field& u, double sigma, double p);

// Omega-restricted variant (no exterior shells), finite for every p >= 1;
// used where the full triple-bar norm is not defined.
double stein_norm_domain(const Field& u, double sigma, double p);

// max over node pairs of |u_i - u_j| / |x_i - x_j|^sigma, sigma in (0,1].
double holder_seminorm(const Field& u, double sigma);

// ||g||_{L^q} - ||g||_{L^{1+eta}}^theta ||g||_{L^r}^{1-theta} with
// 1/q = theta/(1+eta) + (1-theta)/r; non-positive up to roundoff.
double interpolation_defect(const Field& g, double q, double eta, double r);

// Measured embedding constant k for sigma <= sigma': the largest observed
// ratio ||u||_{W^{sigma,p}} / ||u||_{W^{sigma',p}} over a deterministic
// battery of bump, profile and random fields.
double measure_embedding_constant(std::shared_ptr<const Grid> grid, double sigma,
                                  double sigma_prime, double p, int nsamples, CounterRng& rng);

} // namespace frackpz

#endif
