#ifndef FRACKPZ_KERNELS_HPP
#define FRACKPZ_KERNELS_HPP

#include "frackpz/lattice.hpp"

#include <array>
#include <vector>

namespace frackpz {

// All radial kernels are parameterized as |z|^{-(N+beta)}.  beta = 2*sigma for
// the fractional Laplacian of order sigma, beta = sigma*p for Gagliardo
// weights, beta = -alpha for the Riesz potential J_alpha.

// integral of r^{-1-beta} over (r0, r1); r1 may be +inf when beta > 0,
// r0 may be 0 when beta < 0.
double radial_segment(double beta, double r0, double r1);

// integral of |x-y|^{-(dim+beta)} over the cell of side h centered at c,
// where delta = x - c.  x must be outside the closed cell unless delta = 0 and
// beta < 0 (weakly singular same-cell integral, computed in closed form plus
// corner arcs).  Exact in 1D; exact-in-radius polar quadrature in 2D.
double cell_integral(int dim, double beta, double h, const Point& delta);

// integral of (x-y)|x-y|^{-(dim+t+1)} over the same cell (Riesz gradient
// weights); delta = 0 gives exactly zero by symmetry.
std::array<double, 2> cell_integral_vec(int dim, double t, double h, const Point& delta);

// integral of |x-y|^{-(dim+beta)} over the complement of the rectangle
// [lo,hi]; x strictly inside, beta > 0.
double rect_complement(int dim, double beta, const Point& x, const Point& lo, const Point& hi);

// vector analogue for the Riesz gradient tail.
std::array<double, 2> rect_complement_vec(int dim, double t, const Point& x, const Point& lo,
                                          const Point& hi);

// Translation-structured weight table over doubled lattice offsets.  Entry
// d2 = c2(eval) - c2(cell) with c2 the doubled coordinate; even offsets pair
// lattice nodes, odd ones pair nodes with points of the doubled-spacing shell
// lattice.  Entries are filled once per canonical octant and mirrored, so
// symmetry w(d2) = w(-d2) holds exactly.
class KernelTable {
public:
    KernelTable(const Lattice& lat, double beta, std::array<int, 2> extent);

    double beta() const { return beta_; }

    double at(int d2x, int d2y) const {
        return data_[index(d2x, d2y)];
    }

private:
    std::size_t index(int d2x, int d2y) const;

    double beta_;
    int dim_;
    std::array<int, 2> ext_;
    std::array<int, 2> stride_;
    std::vector<double> data_;
};

// Vector weights for the Riesz gradient, odd under d2 -> -d2.
class VectorKernelTable {
public:
    VectorKernelTable(const Lattice& lat, double t, std::array<int, 2> extent);

    double order() const { return t_; }

    std::array<double, 2> at(int d2x, int d2y) const {
        const std::size_t k = index(d2x, d2y);
        return {data_x_[k], data_y_[k]};
    }

private:
    std::size_t index(int d2x, int d2y) const;

    double t_;
    int dim_;
    std::array<int, 2> ext_;
    std::array<int, 2> stride_;
    std::vector<double> data_x_;
    std::vector<double> data_y_;
};

} // namespace frackpz

#endif
