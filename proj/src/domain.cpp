#include "frackpz/domain.hpp"
#include "frackpz/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace frackpz {

namespace {
double hypot2(double x, double y) { return std::sqrt(x * x + y * y); }
} // namespace

Domain Domain::interval(double a, double b) {
    if (!(a < b)) throw validation_error("interval requires a < b");
    return Domain(Shape::interval, 1, {a, 0.0}, {b, 0.0}, 0.0);
}

Domain Domain::disk(Point center, double radius) {
    if (!(radius > 0.0)) throw validation_error("disk requires radius > 0");
    return Domain(Shape::disk, 2, center, {0.0, 0.0}, radius);
}

Domain Domain::square(Point corner, double side) {
    if (!(side > 0.0)) throw validation_error("square requires side > 0");
    return Domain(Shape::square, 2, corner, {0.0, 0.0}, side);
}

double Domain::measure() const {
    switch (shape_) {
    case Shape::interval: return b() - a();
    case Shape::disk: return M_PI * scalar_ * scalar_;
    case Shape::square: return scalar_ * scalar_;
    }
    return 0.0;
}

double Domain::diameter() const {
    switch (shape_) {
    case Shape::interval: return b() - a();
    case Shape::disk: return 2.0 * scalar_;
    case Shape::square: return scalar_ * std::sqrt(2.0);
    }
    return 0.0;
}

double Domain::dist_origin() const {
    switch (shape_) {
    case Shape::interval: {
        if (a() <= 0.0 && 0.0 <= b()) return 0.0;
        return std::min(std::abs(a()), std::abs(b()));
    }
    case Shape::disk:
        return std::max(0.0, hypot2(p0_[0], p0_[1]) - scalar_);
    case Shape::square: {
        const double dx = std::max({p0_[0], -(p0_[0] + scalar_), 0.0});
        const double dy = std::max({p0_[1], -(p0_[1] + scalar_), 0.0});
        return hypot2(dx, dy);
    }
    }
    return 0.0;
}

double Domain::inradius() const {
    switch (shape_) {
    case Shape::interval: return 0.5 * (b() - a());
    case Shape::disk: return scalar_;
    case Shape::square: return 0.5 * scalar_;
    }
    return 0.0;
}

Point Domain::incenter() const {
    switch (shape_) {
    case Shape::interval: return {0.5 * (a() + b()), 0.0};
    case Shape::disk: return p0_;
    case Shape::square: return {p0_[0] + 0.5 * scalar_, p0_[1] + 0.5 * scalar_};
    }
    return {0.0, 0.0};
}

bool Domain::contains(const Point& x) const {
    switch (shape_) {
    case Shape::interval: return x[0] > a() && x[0] < b();
    case Shape::disk: return hypot2(x[0] - p0_[0], x[1] - p0_[1]) < scalar_;
    case Shape::square:
        return x[0] > p0_[0] && x[0] < p0_[0] + scalar_ && x[1] > p0_[1] && x[1] < p0_[1] + scalar_;
    }
    return false;
}

double Domain::boundary_distance(const Point& x, bool* exterior) const {
    if (exterior) *exterior = !contains(x);
    switch (shape_) {
    case Shape::interval:
        return std::min(std::abs(x[0] - a()), std::abs(x[0] - b()));
    case Shape::disk:
        return std::abs(hypot2(x[0] - p0_[0], x[1] - p0_[1]) - scalar_);
    case Shape::square: {
        const double lx = x[0] - p0_[0], ly = x[1] - p0_[1];
        if (contains(x))
            return std::min({lx, scalar_ - lx, ly, scalar_ - ly});
        const double dx = std::max({-lx, lx - scalar_, 0.0});
        const double dy = std::max({-ly, ly - scalar_, 0.0});
        return hypot2(dx, dy);
    }
    }
    return 0.0;
}

Point Domain::bbox_lo() const {
    switch (shape_) {
    case Shape::interval: return {a(), 0.0};
    case Shape::disk: return {p0_[0] - scalar_, p0_[1] - scalar_};
    case Shape::square: return p0_;
    }
    return {0.0, 0.0};
}

Point Domain::bbox_hi() const {
    switch (shape_) {
    case Shape::interval: return {b(), 0.0};
    case Shape::disk: return {p0_[0] + scalar_, p0_[1] + scalar_};
    case Shape::square: return {p0_[0] + scalar_, p0_[1] + scalar_};
    }
    return {0.0, 0.0};
}

std::string Domain::describe() const {
    std::ostringstream os;
    switch (shape_) {
    case Shape::interval: os << "interval(" << a() << "," << b() << ")"; break;
    case Shape::disk: os << "disk((" << p0_[0] << "," << p0_[1] << ")," << scalar_ << ")"; break;
    case Shape::square: os << "square((" << p0_[0] << "," << p0_[1] << ")," << scalar_ << ")"; break;
    }
    return os.str();
}

} // namespace frackpz
