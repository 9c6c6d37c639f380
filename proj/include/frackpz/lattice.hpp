#ifndef FRACKPZ_LATTICE_HPP
#define FRACKPZ_LATTICE_HPP

#include "frackpz/domain.hpp"

#include <array>

namespace frackpz {

// Uniform Cartesian cell lattice covering the domain's bounding box.  Cells
// are closed squares/segments of side h; cell (i,j) has center
// lo + ((i+1/2)h, (j+1/2)h).  Counts are kept even so that an aligned lattice
// of doubled spacing tiles the covered rectangle exactly.
struct Lattice {
    int dim = 1;
    double h = 0.0;
    Point lo{0.0, 0.0};
    std::array<int, 2> count{0, 1};

    Point cell_center(int i, int j) const {
        return {lo[0] + (i + 0.5) * h, dim == 2 ? lo[1] + (j + 0.5) * h : 0.0};
    }
    Point rect_lo() const { return lo; }
    Point rect_hi() const {
        return {lo[0] + count[0] * h, dim == 2 ? lo[1] + count[1] * h : 0.0};
    }
    // doubled lattice coordinate of an on-lattice point: 2*(x - lo)/h, rounded
    std::array<int, 2> doubled_coord(const Point& x) const;
};

} // namespace frackpz

#endif
