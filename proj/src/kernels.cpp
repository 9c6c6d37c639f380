#include "frackpz/kernels.hpp"
#include "frackpz/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace frackpz {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kInf = std::numeric_limits<double>::infinity();

// 16-point Gauss-Legendre on [-1,1], positive half
constexpr int kHalf = 8;
constexpr double kGx[kHalf] = {
    0.0950125098376374401853193, 0.2816035507792589132304605,
    0.4580167776572273863424194, 0.6178762444026437484466718,
    0.7554044083550030338951012, 0.8656312023878317438804679,
    0.9445750230732325760779884, 0.9894009349916499325961542};
constexpr double kGw[kHalf] = {
    0.1894506104550684962853967, 0.1826034150449235888667637,
    0.1691565193950025381893121, 0.1495959888165767320815017,
    0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806};

template <class F>
double gauss16(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double rad = 0.5 * (b - a);
    double sum = 0.0;
    for (int k = 0; k < kHalf; ++k)
        sum += kGw[k] * (f(mid + rad * kGx[k]) + f(mid - rad * kGx[k]));
    return rad * sum;
}

// [tin,tout] of the ray x + t*(wx,wy) through rect [lo,hi]; false if empty
bool ray_rect(const Point& x, double wx, double wy, const Point& lo, const Point& hi, int dim,
              double& tin, double& tout) {
    tin = -kInf;
    tout = kInf;
    const double w[2] = {wx, wy};
    for (int d = 0; d < dim; ++d) {
        if (std::abs(w[d]) < 1e-14) {
            if (x[d] < lo[d] || x[d] > hi[d]) return false;
            continue;
        }
        double t1 = (lo[d] - x[d]) / w[d];
        double t2 = (hi[d] - x[d]) / w[d];
        if (t1 > t2) std::swap(t1, t2);
        tin = std::max(tin, t1);
        tout = std::min(tout, t2);
    }
    return tin < tout;
}

// corner angles of rect seen from x, unwrapped around the first one
std::array<double, 4> corner_angles(const Point& x, const Point& lo, const Point& hi) {
    const double cx[4] = {lo[0], hi[0], lo[0], hi[0]};
    const double cy[4] = {lo[1], lo[1], hi[1], hi[1]};
    std::array<double, 4> phi{};
    for (int k = 0; k < 4; ++k) phi[k] = std::atan2(cy[k] - x[1], cx[k] - x[0]);
    for (int k = 1; k < 4; ++k) {
        while (phi[k] < phi[0] - kPi) phi[k] += 2.0 * kPi;
        while (phi[k] >= phi[0] + kPi) phi[k] -= 2.0 * kPi;
    }
    std::sort(phi.begin(), phi.end());
    return phi;
}

// exact-in-radius polar quadrature of |x-y|^{-(2+beta)} over rect, x outside
double polar_rect(double beta, const Point& x, const Point& lo, const Point& hi) {
    const auto phi = corner_angles(x, lo, hi);
    double total = 0.0;
    for (int k = 0; k < 3; ++k) {
        if (phi[k + 1] - phi[k] < 1e-14) continue;
        total += gauss16(
            [&](double th) {
                double tin, tout;
                if (!ray_rect(x, std::cos(th), std::sin(th), lo, hi, 2, tin, tout)) return 0.0;
                if (!(tin > 0.0) || !(tout > tin)) return 0.0;
                return radial_segment(beta, tin, tout);
            },
            phi[k], phi[k + 1]);
    }
    return total;
}

std::array<double, 2> polar_rect_vec(double t, const Point& x, const Point& lo, const Point& hi) {
    const auto phi = corner_angles(x, lo, hi);
    std::array<double, 2> out{0.0, 0.0};
    for (int k = 0; k < 3; ++k) {
        if (phi[k + 1] - phi[k] < 1e-14) continue;
        for (int c = 0; c < 2; ++c) {
            out[c] += gauss16(
                [&](double th) {
                    double tin, tout;
                    if (!ray_rect(x, std::cos(th), std::sin(th), lo, hi, 2, tin, tout)) return 0.0;
                    if (!(tin > 0.0) || !(tout > tin)) return 0.0;
                    const double omega = (c == 0) ? std::cos(th) : std::sin(th);
                    return -omega * radial_segment(t, tin, tout);
                },
                phi[k], phi[k + 1]);
        }
    }
    return out;
}

double exit_distance(const Point& x, double wx, double wy, const Point& lo, const Point& hi,
                     int dim) {
    double t = kInf;
    const double w[2] = {wx, wy};
    for (int d = 0; d < dim; ++d) {
        if (std::abs(w[d]) < 1e-14) continue;
        const double cand = ((w[d] > 0.0 ? hi[d] : lo[d]) - x[d]) / w[d];
        t = std::min(t, cand);
    }
    return t;
}

} // namespace

double radial_segment(double beta, double r0, double r1) {
    if (beta == 0.0) {
        if (!(r0 > 0.0) || !(r1 > r0) || r1 == kInf)
            throw numerical_error("radial_segment: log kernel needs 0 < r0 < r1 < inf");
        return std::log(r1 / r0);
    }
    if (r1 == kInf) {
        if (!(beta > 0.0)) throw numerical_error("radial_segment: divergent tail for beta <= 0");
        return std::pow(r0, -beta) / beta;
    }
    if (r0 == 0.0) {
        if (!(beta < 0.0)) throw numerical_error("radial_segment: divergent origin for beta >= 0");
        return -std::pow(r1, -beta) / beta;
    }
    return (std::pow(r0, -beta) - std::pow(r1, -beta)) / beta;
}

double cell_integral(int dim, double beta, double h, const Point& delta) {
    if (dim == 1) {
        const double d = std::abs(delta[0]);
        if (d == 0.0) {
            if (!(beta < 0.0)) throw numerical_error("cell_integral: singular same-cell, beta >= 0");
            return 2.0 * radial_segment(beta, 0.0, 0.5 * h);
        }
        if (d <= 0.5 * h * (1.0 + 1e-12))
            throw numerical_error("cell_integral: evaluation point inside cell");
        return radial_segment(beta, d - 0.5 * h, d + 0.5 * h);
    }
    const double ax = std::abs(delta[0]);
    const double ay = std::abs(delta[1]);
    if (ax == 0.0 && ay == 0.0) {
        if (!(beta < 0.0)) throw numerical_error("cell_integral: singular same-cell, beta >= 0");
        // inscribed disk exactly, the four corner regions exact in radius
        const double r = 0.5 * h;
        double corners = gauss16(
            [&](double th) { return radial_segment(beta, r, r / std::cos(th)); }, 0.0, 0.25 * kPi);
        return 2.0 * kPi * radial_segment(beta, 0.0, r) + 8.0 * corners;
    }
    if (std::max(ax, ay) <= 0.5 * h * (1.0 + 1e-12))
        throw numerical_error("cell_integral: evaluation point inside or on cell");
    const Point lo{-0.5 * h, -0.5 * h};
    const Point hi{0.5 * h, 0.5 * h};
    return polar_rect(beta, delta, lo, hi);
}

std::array<double, 2> cell_integral_vec(int dim, double t, double h, const Point& delta) {
    if (dim == 1) {
        const double d = std::abs(delta[0]);
        if (d == 0.0) return {0.0, 0.0}; // odd kernel over centered cell
        if (d <= 0.5 * h * (1.0 + 1e-12))
            throw numerical_error("cell_integral_vec: evaluation point inside cell");
        const double s = delta[0] > 0.0 ? 1.0 : -1.0;
        return {s * radial_segment(t, d - 0.5 * h, d + 0.5 * h), 0.0};
    }
    const double ax = std::abs(delta[0]);
    const double ay = std::abs(delta[1]);
    if (ax == 0.0 && ay == 0.0) return {0.0, 0.0};
    if (std::max(ax, ay) <= 0.5 * h * (1.0 + 1e-12))
        throw numerical_error("cell_integral_vec: evaluation point inside or on cell");
    const Point lo{-0.5 * h, -0.5 * h};
    const Point hi{0.5 * h, 0.5 * h};
    return polar_rect_vec(t, delta, lo, hi);
}

double rect_complement(int dim, double beta, const Point& x, const Point& lo, const Point& hi) {
    if (!(beta > 0.0)) throw numerical_error("rect_complement: needs beta > 0");
    if (dim == 1) {
        if (!(x[0] > lo[0] && x[0] < hi[0]))
            throw numerical_error("rect_complement: point outside rectangle");
        return radial_segment(beta, x[0] - lo[0], kInf) + radial_segment(beta, hi[0] - x[0], kInf);
    }
    if (!(x[0] > lo[0] && x[0] < hi[0] && x[1] > lo[1] && x[1] < hi[1]))
        throw numerical_error("rect_complement: point outside rectangle");
    std::array<double, 5> phi{};
    {
        const auto p = corner_angles(x, lo, hi);
        for (int k = 0; k < 4; ++k) phi[k] = p[k];
        phi[4] = p[0] + 2.0 * kPi;
    }
    double total = 0.0;
    for (int k = 0; k < 4; ++k) {
        if (phi[k + 1] - phi[k] < 1e-14) continue;
        total += gauss16(
            [&](double th) {
                const double t = exit_distance(x, std::cos(th), std::sin(th), lo, hi, 2);
                return radial_segment(beta, t, kInf);
            },
            phi[k], phi[k + 1]);
    }
    return total;
}

std::array<double, 2> rect_complement_vec(int dim, double t, const Point& x, const Point& lo,
                                          const Point& hi) {
    if (!(t > 0.0)) throw numerical_error("rect_complement_vec: needs t > 0");
    if (dim == 1) {
        if (!(x[0] > lo[0] && x[0] < hi[0]))
            throw numerical_error("rect_complement_vec: point outside rectangle");
        return {radial_segment(t, x[0] - lo[0], kInf) - radial_segment(t, hi[0] - x[0], kInf), 0.0};
    }
    if (!(x[0] > lo[0] && x[0] < hi[0] && x[1] > lo[1] && x[1] < hi[1]))
        throw numerical_error("rect_complement_vec: point outside rectangle");
    std::array<double, 5> phi{};
    {
        const auto p = corner_angles(x, lo, hi);
        for (int k = 0; k < 4; ++k) phi[k] = p[k];
        phi[4] = p[0] + 2.0 * kPi;
    }
    std::array<double, 2> out{0.0, 0.0};
    for (int k = 0; k < 4; ++k) {
        if (phi[k + 1] - phi[k] < 1e-14) continue;
        for (int c = 0; c < 2; ++c) {
            out[c] += gauss16(
                [&](double th) {
                    const double tx = exit_distance(x, std::cos(th), std::sin(th), lo, hi, 2);
                    const double omega = (c == 0) ? std::cos(th) : std::sin(th);
                    return -omega * radial_segment(t, tx, kInf);
                },
                phi[k], phi[k + 1]);
        }
    }
    return out;
}

std::array<int, 2> Lattice::doubled_coord(const Point& x) const {
    std::array<int, 2> c2{0, 0};
    for (int d = 0; d < dim; ++d)
        c2[d] = static_cast<int>(std::llround(2.0 * (x[d] - lo[d]) / h));
    return c2;
}

std::size_t KernelTable::index(int d2x, int d2y) const {
    if (std::abs(d2x) > ext_[0] || std::abs(d2y) > ext_[1])
        throw numerical_error("KernelTable: offset out of range");
    return static_cast<std::size_t>(d2x + ext_[0]) +
           static_cast<std::size_t>(stride_[1]) * static_cast<std::size_t>(d2y + ext_[1]);
}

KernelTable::KernelTable(const Lattice& lat, double beta, std::array<int, 2> extent)
    : beta_(beta), dim_(lat.dim) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double h = lat.h;
    if (dim_ == 1) {
        ext_ = {extent[0], 0};
        stride_ = {1, 2 * ext_[0] + 1};
        data_.assign(static_cast<std::size_t>(2 * ext_[0] + 1), nan);
        for (int a = 0; a <= ext_[0]; ++a) {
            double v;
            if (a == 0)
                v = beta < 0.0 ? cell_integral(1, beta, h, {0.0, 0.0}) : 0.0;
            else if (a == 1)
                v = nan; // on-edge offset, never a valid query
            else
                v = cell_integral(1, beta, h, {0.5 * a * h, 0.0});
            data_[index(a, 0)] = v;
            data_[index(-a, 0)] = v;
        }
        return;
    }
    const int e = std::max(extent[0], extent[1]);
    ext_ = {e, e};
    stride_ = {1, 2 * e + 1};
    data_.assign(static_cast<std::size_t>(2 * e + 1) * static_cast<std::size_t>(2 * e + 1), nan);
    for (int a = 0; a <= e; ++a) {
        for (int b = 0; b <= a; ++b) {
            double v;
            if (a == 0 && b == 0)
                v = beta < 0.0 ? cell_integral(2, beta, h, {0.0, 0.0}) : 0.0;
            else if (a <= 1 && b <= 1)
                v = nan; // inside or on the source cell, never a valid query
            else
                v = cell_integral(2, beta, h, {0.5 * a * h, 0.5 * b * h});
            const int xs[2] = {a, -a};
            const int ys[2] = {b, -b};
            for (int sx : xs)
                for (int sy : ys) {
                    data_[index(sx, sy)] = v;
                    data_[index(sy, sx)] = v;
                }
        }
    }
}

std::size_t VectorKernelTable::index(int d2x, int d2y) const {
    if (std::abs(d2x) > ext_[0] || std::abs(d2y) > ext_[1])
        throw numerical_error("VectorKernelTable: offset out of range");
    return static_cast<std::size_t>(d2x + ext_[0]) +
           static_cast<std::size_t>(stride_[1]) * static_cast<std::size_t>(d2y + ext_[1]);
}

VectorKernelTable::VectorKernelTable(const Lattice& lat, double t, std::array<int, 2> extent)
    : t_(t), dim_(lat.dim) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double h = lat.h;
    if (dim_ == 1) {
        ext_ = {extent[0], 0};
        stride_ = {1, 2 * ext_[0] + 1};
        const std::size_t n = static_cast<std::size_t>(2 * ext_[0] + 1);
        data_x_.assign(n, nan);
        data_y_.assign(n, 0.0);
        for (int a = 0; a <= ext_[0]; ++a) {
            double v;
            if (a == 0)
                v = 0.0;
            else if (a == 1)
                v = nan;
            else
                v = cell_integral_vec(1, t, h, {0.5 * a * h, 0.0})[0];
            data_x_[index(a, 0)] = v;
            data_x_[index(-a, 0)] = -v;
        }
        return;
    }
    const int e = std::max(extent[0], extent[1]);
    ext_ = {e, e};
    stride_ = {1, 2 * e + 1};
    const std::size_t n =
        static_cast<std::size_t>(2 * e + 1) * static_cast<std::size_t>(2 * e + 1);
    data_x_.assign(n, nan);
    data_y_.assign(n, nan);
    for (int a = 0; a <= e; ++a) {
        for (int b = 0; b <= a; ++b) {
            std::array<double, 2> v{0.0, 0.0};
            if (a == 0 && b == 0)
                v = {0.0, 0.0};
            else if (a <= 1 && b <= 1)
                v = {nan, nan};
            else {
                v = cell_integral_vec(2, t, h, {0.5 * a * h, 0.5 * b * h});
                if (b == 0) v[1] = 0.0;      // odd component on the axis
                if (a == b) v[1] = v[0];     // diagonal swap symmetry
            }
            const int xs[2] = {1, -1};
            for (int sx : xs)
                for (int sy : xs) {
                    // component parity: x odd in d2x, even in d2y; swap maps components
                    const std::size_t k1 = index(sx * a, sy * b);
                    data_x_[k1] = sx * v[0];
                    data_y_[k1] = sy * v[1];
                    const std::size_t k2 = index(sx * b, sy * a);
                    data_x_[k2] = sx * v[1];
                    data_y_[k2] = sy * v[0];
                }
        }
    }
}

} // namespace frackpz
