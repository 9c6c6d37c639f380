#ifndef FRACKPZ_FRACOPS_HPP
#define FRACKPZ_FRACOPS_HPP

#include "frackpz/grid.hpp"

#include <Eigen/Dense>

#include <memory>
#include <vector>

namespace frackpz {

struct KernelConstants {
    double a;  // fractional-Laplacian normalization a_{N,sigma}
    double mu; // Riesz-gradient normalization mu_{N,sigma}
};

// a(N,sigma) = -2^{2s} Gamma(N/2+s) / (pi^{N/2} Gamma(-s)), evaluated through
// the reflection formula so only positive gamma arguments are used;
// mu(N,sigma) = 2^s Gamma((N+s+1)/2) / (pi^{N/2} Gamma((1-s)/2)).
KernelConstants kernel_constants(int N, double sigma);

// Dense discrete (-Delta)^sigma with exterior zero condition:
//   (M u)_i = a_{N,sigma} [ sum_j w_ij (u_i - u_j) + tail_i u_i ],
// w_ij the kernel mass of cell j seen from node i, tail_i the kernel mass of
// R^N minus the covered cells.  Symmetric with non-positive off-diagonal and
// positive row sums (discrete maximum principle structure).
class OperatorMatrix {
public:
    OperatorMatrix(std::shared_ptr<const Grid> grid, double sigma);

    const Grid& grid() const { return *grid_; }
    const std::shared_ptr<const Grid>& grid_ptr() const { return grid_; }
    double order() const { return sigma_; }
    const Eigen::MatrixXd& entries() const { return entries_; }
    const Eigen::VectorXd& tail() const { return tail_; }

    Eigen::VectorXd apply(const Eigen::VectorXd& u) const { return entries_ * u; }

private:
    std::shared_ptr<const Grid> grid_;
    double sigma_;
    Eigen::MatrixXd entries_;
    Eigen::VectorXd tail_;
};

OperatorMatrix assemble_frac_laplacian(std::shared_ptr<const Grid> grid, double sigma);

// Matrix-free row evaluation of the same discrete operator (identical weights,
// no dense storage).
Eigen::VectorXd apply_frac_laplacian(const Field& u, double sigma);

// Half t-Laplacian (-Delta)^{t/2} at the nodes.
Field apply_half_laplacian(const Field& u, double t);

// Evaluation at explicit points, inside (node-resolved) or outside Omega.
// Points within h/2 of the boundary are rejected as boundary-layer points.
std::vector<double> apply_half_laplacian_at(const Field& u, double t,
                                            const std::vector<Point>& eval_points);

struct VectorField {
    std::shared_ptr<const Grid> grid;
    Eigen::MatrixXd values; // node_count x dimension
};

// Riesz t-gradient, kernel (x-y)/|x-y|^{N+t+1} normalized by mu_{N,t}.
VectorField riesz_gradient(const Field& u, double t);
Field riesz_gradient_magnitude(const Field& u, double t);

// Stein t-functional sqrt( a_{N,t}/2 * int (u(x)-u(y))^2 / |x-y|^{N+2t} dy ).
Field stein_functional(const Field& u, double t);
// same functional at the grid's exterior shell points
Eigen::VectorXd stein_at_shells(const Field& u, double t);
// and at an arbitrary point outside the covered cells
double stein_at_point(const Field& u, double t, const Point& x);

// Riesz potential J_alpha g(x) = int_Omega g(y)/|x-y|^{N-alpha} dy.
Field riesz_potential(const Field& g, double alpha);

} // namespace frackpz

#endif
