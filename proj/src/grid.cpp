#include "frackpz/grid.hpp"
#include "frackpz/errors.hpp"

#include <algorithm>
#include <cmath>

namespace frackpz {

std::shared_ptr<const Grid> Grid::make(const Domain& domain, double h) {
    if (!(h > 0.0)) throw validation_error("make_grid: h must be positive");
    auto g = std::shared_ptr<Grid>(new Grid());
    g->domain_ = domain;

    Lattice& lat = g->lattice_;
    lat.dim = domain.dimension();
    lat.h = h;
    const Point lo = domain.bbox_lo();
    const Point hi = domain.bbox_hi();
    lat.lo = lo;
    lat.count = {0, 1};
    for (int d = 0; d < lat.dim; ++d) {
        int k = static_cast<int>(std::ceil((hi[d] - lo[d]) / h - 1e-12));
        if (k < 1) k = 1;
        if (k % 2 == 1) ++k; // even counts align the doubled shell lattice with the rectangle
        lat.count[d] = k;
    }

    g->cell_measure_ = lat.dim == 1 ? h : h * h;
    g->tail_radius_ = 1.0 / 3.0 + (4.0 / 3.0) * (domain.diameter() + domain.dist_origin());

    const int nx = lat.count[0], ny = lat.count[1];
    g->cell_node_.assign(static_cast<std::size_t>(nx) * ny, -1);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const Point c = lat.cell_center(i, j);
            if (domain.contains(c)) {
                const int id = static_cast<int>(g->nodes_.size());
                g->cell_node_[static_cast<std::size_t>(j) * nx + i] = id;
                g->nodes_.push_back(c);
                g->node_cells_.push_back({i, j});
                g->delta_.push_back(domain.boundary_distance(c));
            } else {
                g->dropped_.push_back({i, j});
            }
        }
    }
    if (g->node_count() < 3)
        throw validation_error("make_grid: h too coarse, fewer than 3 nodes fit in " +
                               domain.describe());
    return g;
}

std::shared_ptr<const Grid> make_grid(const Domain& domain, double h) { return Grid::make(domain, h); }

int Grid::node_at(int i, int j) const {
    if (i < 0 || i >= lattice_.count[0] || j < 0 || j >= lattice_.count[1]) return -1;
    return cell_node_[static_cast<std::size_t>(j) * lattice_.count[0] + i];
}

std::array<int, 2> Grid::node_c2(int i) const {
    const auto& c = node_cells_[static_cast<std::size_t>(i)];
    return {2 * c[0] + 1, lattice_.dim == 2 ? 2 * c[1] + 1 : 0};
}

const std::vector<ShellPoint>& Grid::exterior_shells() const {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    if (shells_built_) return shells_;
    const double h = lattice_.h;
    const double R = tail_radius_;
    // zone 1: dropped cells of the covered rectangle at full resolution
    for (const auto& c : dropped_) {
        ShellPoint p;
        p.x = lattice_.cell_center(c[0], c[1]);
        p.weight = cell_measure_;
        p.c2 = {2 * c[0] + 1, lattice_.dim == 2 ? 2 * c[1] + 1 : 0};
        shells_.push_back(p);
    }
    // zone 2: doubled-spacing cells outside the rectangle, centers within B_R(0)
    const Point rlo = lattice_.rect_lo();
    const Point rhi = lattice_.rect_hi();
    const double w2 = lattice_.dim == 1 ? 2.0 * h : 4.0 * h * h;
    std::array<int, 2> i0{0, 0}, i1{0, 0};
    for (int d = 0; d < lattice_.dim; ++d) {
        i0[d] = static_cast<int>(std::floor((-R - lattice_.lo[d]) / (2.0 * h))) - 1;
        i1[d] = static_cast<int>(std::ceil((R - lattice_.lo[d]) / (2.0 * h))) + 1;
    }
    for (int J = i0[1]; J <= (lattice_.dim == 2 ? i1[1] : i0[1]); ++J) {
        for (int I = i0[0]; I <= i1[0]; ++I) {
            Point c{lattice_.lo[0] + (2 * I + 1) * h,
                    lattice_.dim == 2 ? lattice_.lo[1] + (2 * J + 1) * h : 0.0};
            const double r2 = c[0] * c[0] + (lattice_.dim == 2 ? c[1] * c[1] : 0.0);
            if (r2 > R * R) continue;
            const bool inside_rect = c[0] > rlo[0] && c[0] < rhi[0] &&
                                     (lattice_.dim == 1 || (c[1] > rlo[1] && c[1] < rhi[1]));
            if (inside_rect) continue;
            ShellPoint p;
            p.x = c;
            p.weight = w2;
            p.c2 = {2 * (2 * I + 1), lattice_.dim == 2 ? 2 * (2 * J + 1) : 0};
            shells_.push_back(p);
        }
    }
    shells_built_ = true;
    return shells_;
}

std::array<int, 2> Grid::table_extent() const {
    // covers every (evaluation point, source cell) pair among nodes and shells
    std::array<int, 2> lo_ev{1, 1}, hi_ev{1, 1};
    for (int d = 0; d < lattice_.dim; ++d) {
        lo_ev[d] = 1;
        hi_ev[d] = 2 * lattice_.count[d] - 1;
    }
    for (const auto& s : shells_) {
        for (int d = 0; d < lattice_.dim; ++d) {
            lo_ev[d] = std::min(lo_ev[d], s.c2[d]);
            hi_ev[d] = std::max(hi_ev[d], s.c2[d]);
        }
    }
    std::array<int, 2> ext{0, 0};
    for (int d = 0; d < lattice_.dim; ++d) {
        const int c_lo = 1, c_hi = 2 * lattice_.count[d] - 1;
        ext[d] = std::max(hi_ev[d] - c_lo, c_hi - lo_ev[d]);
    }
    return ext;
}

const KernelTable& Grid::scalar_table(double beta) const {
    exterior_shells(); // shells fix the required extent
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = scalar_tables_.find(beta);
    if (it == scalar_tables_.end()) {
        auto tab = std::make_shared<const KernelTable>(lattice_, beta, table_extent());
        it = scalar_tables_.emplace(beta, std::move(tab)).first;
    }
    return *it->second;
}

const VectorKernelTable& Grid::vector_table(double t) const {
    exterior_shells();
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = vector_tables_.find(t);
    if (it == vector_tables_.end()) {
        auto tab = std::make_shared<const VectorKernelTable>(lattice_, t, table_extent());
        it = vector_tables_.emplace(t, std::move(tab)).first;
    }
    return *it->second;
}

double Grid::exterior_tail(int i, double beta) const {
    const KernelTable& tab = scalar_table(beta);
    const auto c2 = node_c2(i);
    double tail = rect_complement(lattice_.dim, beta, nodes_[static_cast<std::size_t>(i)],
                                  lattice_.rect_lo(), lattice_.rect_hi());
    for (const auto& c : dropped_) {
        const int d2x = c2[0] - (2 * c[0] + 1);
        const int d2y = lattice_.dim == 2 ? c2[1] - (2 * c[1] + 1) : 0;
        tail += tab.at(d2x, d2y);
    }
    return tail;
}

std::array<double, 2> Grid::exterior_tail_vec(int i, double t) const {
    const VectorKernelTable& tab = vector_table(t);
    const auto c2 = node_c2(i);
    auto tail = rect_complement_vec(lattice_.dim, t, nodes_[static_cast<std::size_t>(i)],
                                    lattice_.rect_lo(), lattice_.rect_hi());
    for (const auto& c : dropped_) {
        const int d2x = c2[0] - (2 * c[0] + 1);
        const int d2y = lattice_.dim == 2 ? c2[1] - (2 * c[1] + 1) : 0;
        const auto v = tab.at(d2x, d2y);
        tail[0] += v[0];
        tail[1] += v[1];
    }
    return tail;
}

Field make_field(std::shared_ptr<const Grid> grid, double constant) {
    Field f;
    f.values = Eigen::VectorXd::Constant(grid->node_count(), constant);
    f.grid = std::move(grid);
    return f;
}

} // namespace frackpz
