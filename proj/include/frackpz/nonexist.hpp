#ifndef FRACKPZ_NONEXIST_HPP
#define FRACKPZ_NONEXIST_HPP

#include "frackpz/kpz.hpp"

#include <vector>

namespace frackpz {

// Solution of (-Delta)^sigma phi = 1 in Omega, zero outside; positive at
// every node by the discrete maximum principle.
Field torsion_function(std::shared_ptr<const Grid> grid, double sigma);

struct EnvelopePair {
    double lo = 0.0;       // min of phi/delta^sigma over safely interior nodes
    double hi = 0.0;       // max of the same ratio
    double certified() const { return std::max(1.0 / lo, hi); }
};

// Two-sided boundary envelope C0^{-1} delta^sigma <= phi <= C0 delta^sigma,
// fitted over nodes with delta > 2h (at least ten required).
EnvelopePair boundary_envelope(const Field& phi, double sigma);

struct NonexistenceBundle {
    double s = 0.0, t = 0.0, q = 0.0, mu1 = 0.0;
    Field phi; // s-torsion
    Field psi; // (t/2)-torsion
    double c0_phi = 0.0;       // certified envelope constant of phi
    double c0_psi = 0.0;       // and of psi
    double c_q = 0.0;          // sharp Young constant (q-1) q^{-q/(q-1)}
    double integral_ratio = 0.0; // int psi^{q'} phi^{-1/(q-1)}
    double integral_fphi = 0.0;  // int f phi
    double lambda_ss = 0.0;
};

// Explicit non-existence threshold for the half-Laplacian variant:
// lambda** = C_q int psi^{q/(q-1)} phi^{-1/(q-1)} / (mu1^{1/(q-1)} int f phi).
// Requires 0 < t < min{1,2s}, q > 2(s+1)/(t+2), mu1 > 0 and int f phi > 0.
NonexistenceBundle lambda_starstar_kpz1(std::shared_ptr<const Grid> grid, double s, double t,
                                        double q, double mu1, const Field& f);

struct BumpRatio {
    int index = -1;
    double width = 0.0;
    double numerator = 0.0;   // C_{q,mu1} int (D_{2s-t} b)^{q'}
    double denominator = 0.0; // int f b^{q'}
    double ratio = 0.0;
    bool admissible = true;
};

struct Kpz3Threshold {
    double lambda_ss = 0.0; // upper estimate of the infimum over C_c^infty
    double c_q_young = 0.0;
    double c_q_mvt = 0.0;         // q/(q-1), mean-value constant of the chain
    double kernel_split = 0.0;    // a_{N,s}/sqrt(a_{N,t} a_{N,2s-t})
    double chain_constant = 0.0;  // full C_{q,mu1}
    std::vector<BumpRatio> bumps;
};

// Stein-variant threshold as the minimum of the test-bump quotients; the
// constant is assembled from the proof chain (mean value + Cauchy-Schwarz
// kernel split + Young with epsilon = mu1) and recorded factor by factor.
Kpz3Threshold lambda_starstar_kpz3(std::shared_ptr<const Grid> grid, double s, double t, double q,
                                   double mu1, const Field& f, const std::vector<Field>& bumps);

// eight mollified cosine bumps at dyadically shrinking widths centered at the
// incenter, all compactly supported strictly inside Omega
std::vector<Field> default_bump_family(std::shared_ptr<const Grid> grid, int count = 8);
std::vector<double> default_bump_widths(const Domain& domain, int count = 8);

struct ChainCheckReport {
    double gap41 = 0.0;      // duality identity against the s-torsion
    double gap43 = 0.0;      // psi pairing identity
    double young44_slack = 0.0; // rhs - lhs of the Young inequality (>= 0 expected)
    bool young_ok = true;
};

// Evaluates the discrete analogues of the non-existence chain for a candidate
// solution u of the half-Laplacian variant.
ChainCheckReport nonexistence_chain_check(const Field& u, const NonexistenceBundle& bundle,
                                          const ProblemSpec& spec);

} // namespace frackpz

#endif
