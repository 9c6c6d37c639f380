#ifndef FRACKPZ_DOMAIN_HPP
#define FRACKPZ_DOMAIN_HPP

#include <array>
#include <string>

namespace frackpz {

using Point = std::array<double, 2>; // [0] used in 1D, both in 2D

enum class Shape { interval, disk, square };

// Bounded domain with closed-form geometry: an interval (a,b) in 1D, a disk or
// an axis-aligned square in 2D.  Immutable after construction.
class Domain {
public:
    static Domain interval(double a, double b);
    static Domain disk(Point center, double radius);
    static Domain square(Point corner, double side);

    int dimension() const { return dim_; }
    Shape shape() const { return shape_; }

    double measure() const;       // |Omega|
    double diameter() const;      // diam(Omega)
    double dist_origin() const;   // dist(0, Omega)
    double inradius() const;      // radius of largest inscribed ball
    Point incenter() const;       // its center

    bool contains(const Point& x) const; // strict interior test

    // Distance to the boundary; non-negative for interior and exterior points
    // alike.  `exterior`, when given, reports which side x is on.
    double boundary_distance(const Point& x, bool* exterior = nullptr) const;

    // Axis-aligned bounding box of the closure.
    Point bbox_lo() const;
    Point bbox_hi() const;

    std::string describe() const;

    // shape parameters (valid subset depends on shape())
    double a() const { return p0_[0]; }
    double b() const { return p1_[0]; }
    Point center() const { return p0_; }
    double radius() const { return scalar_; }
    Point corner() const { return p0_; }
    double side() const { return scalar_; }

private:
    Domain(Shape s, int dim, Point p0, Point p1, double scalar)
        : shape_(s), dim_(dim), p0_(p0), p1_(p1), scalar_(scalar) {}

    Shape shape_;
    int dim_;
    Point p0_;     // interval: (a,.), disk: center, square: corner
    Point p1_;     // interval: (b,.)
    double scalar_; // disk: radius, square: side
};

} // namespace frackpz

#endif
