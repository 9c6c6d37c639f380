#ifndef FRACKPZ_GRID_HPP
#define FRACKPZ_GRID_HPP

#include "frackpz/domain.hpp"
#include "frackpz/kernels.hpp"
#include "frackpz/lattice.hpp"

#include <Eigen/Dense>

#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace frackpz {

// Quadrature point outside the covered region, used for integrals over
// R^N \ Omega: the dropped lattice cells inside the covered rectangle at full
// resolution, plus a doubled-spacing ring out to the tail radius.
struct ShellPoint {
    Point x;
    double weight;           // cell measure of the shell cell
    std::array<int, 2> c2;   // doubled lattice coordinate of x
};

// Cell-center grid over a Domain.  A lattice cell of side h is kept iff its
// center lies strictly inside Omega; kept centers are the nodes.  Immutable
// after construction (the kernel-weight cache is memoization only).
class Grid {
public:
    static std::shared_ptr<const Grid> make(const Domain& domain, double h);

    const Domain& domain() const { return domain_; }
    double spacing() const { return lattice_.h; }
    int dimension() const { return lattice_.dim; }
    int node_count() const { return static_cast<int>(nodes_.size()); }
    const std::vector<Point>& nodes() const { return nodes_; }
    const std::vector<double>& delta() const { return delta_; }
    double cell_measure() const { return cell_measure_; }
    double tail_radius() const { return tail_radius_; }

    const Lattice& lattice() const { return lattice_; }
    // node id at lattice cell (i,j), or -1 when dropped
    int node_at(int i, int j) const;
    const std::vector<std::array<int, 2>>& node_cells() const { return node_cells_; }
    const std::vector<std::array<int, 2>>& dropped_cells() const { return dropped_; }
    // doubled coordinate of node i (odd components by construction)
    std::array<int, 2> node_c2(int i) const;

    const std::vector<ShellPoint>& exterior_shells() const;

    // lazily built translation tables for |z|^{-(N+beta)} weights
    const KernelTable& scalar_table(double beta) const;
    const VectorKernelTable& vector_table(double t) const;

    // exterior kernel mass at node i: integral of |x_i - y|^{-(N+beta)} over
    // the complement of the covered cells
    double exterior_tail(int i, double beta) const;
    std::array<double, 2> exterior_tail_vec(int i, double t) const;

private:
    Grid() = default;
    std::array<int, 2> table_extent() const;

    Domain domain_ = Domain::interval(0.0, 1.0);
    Lattice lattice_;
    double cell_measure_ = 0.0;
    double tail_radius_ = 0.0;
    std::vector<Point> nodes_;
    std::vector<double> delta_;
    std::vector<int> cell_node_; // lattice-major, -1 for dropped
    std::vector<std::array<int, 2>> node_cells_;
    std::vector<std::array<int, 2>> dropped_;

    mutable std::mutex cache_mutex_;
    mutable std::vector<ShellPoint> shells_;
    mutable bool shells_built_ = false;
    mutable std::map<double, std::shared_ptr<const KernelTable>> scalar_tables_;
    mutable std::map<double, std::shared_ptr<const VectorKernelTable>> vector_tables_;
};

std::shared_ptr<const Grid> make_grid(const Domain& domain, double h);

// Real values on grid nodes; identically zero on R^N \ Omega by convention
// (no exterior storage).
struct Field {
    std::shared_ptr<const Grid> grid;
    Eigen::VectorXd values;
};

Field make_field(std::shared_ptr<const Grid> grid, double constant);

template <class Fn>
Field make_field(std::shared_ptr<const Grid> grid, Fn&& fn) {
    Field f;
    f.grid = grid;
    f.values.resize(grid->node_count());
    for (int i = 0; i < grid->node_count(); ++i) f.values[i] = fn(grid->nodes()[i]);
    return f;
}

} // namespace frackpz

#endif
