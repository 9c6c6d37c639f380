#include "frackpz/fracops.hpp"
#include "frackpz/errors.hpp"

#include <cmath>

namespace frackpz {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

void check_order(double sigma, const char* who) {
    if (!(sigma > 0.0 && sigma < 1.0))
        throw validation_error(std::string(who) + ": order must lie in (0,1)");
}
} // namespace

KernelConstants kernel_constants(int N, double sigma) {
    check_order(sigma, "kernel_constants");
    // Gamma(-s) = -pi / (sin(pi s) Gamma(1+s)) keeps every gamma argument positive
    const double a = std::pow(2.0, 2.0 * sigma) * std::tgamma(0.5 * N + sigma) *
                     std::sin(kPi * sigma) * std::tgamma(1.0 + sigma) /
                     (std::pow(kPi, 0.5 * N) * kPi);
    const double mu = std::pow(2.0, sigma) * std::tgamma(0.5 * (N + sigma + 1.0)) /
                      (std::pow(kPi, 0.5 * N) * std::tgamma(0.5 * (1.0 - sigma)));
    return {a, mu};
}

OperatorMatrix::OperatorMatrix(std::shared_ptr<const Grid> grid, double sigma)
    : grid_(std::move(grid)), sigma_(sigma) {
    check_order(sigma, "assemble_frac_laplacian");
    const Grid& g = *grid_;
    const int n = g.node_count();
    const double beta = 2.0 * sigma;
    const double a = kernel_constants(g.dimension(), sigma).a;
    const KernelTable& tab = g.scalar_table(beta);

    tail_.resize(n);
    for (int i = 0; i < n; ++i) tail_[i] = g.exterior_tail(i, beta);

    entries_.resize(n, n);
    std::vector<std::array<int, 2>> c2(n);
    for (int i = 0; i < n; ++i) c2[i] = g.node_c2(i);
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double w = tab.at(c2[i][0] - c2[j][0], c2[i][1] - c2[j][1]);
            entries_(i, j) = -a * w;
            row += w;
        }
        entries_(i, i) = a * (row + tail_[i]);
    }
    // enforce exact symmetry of the quadrature (w depends on |offset| only,
    // so averaging removes nothing but floating-point noise)
    entries_ = 0.5 * (entries_ + entries_.transpose()).eval();
}

OperatorMatrix assemble_frac_laplacian(std::shared_ptr<const Grid> grid, double sigma) {
    return OperatorMatrix(std::move(grid), sigma);
}

Eigen::VectorXd apply_frac_laplacian(const Field& u, double sigma) {
    check_order(sigma, "apply_frac_laplacian");
    const Grid& g = *u.grid;
    const int n = g.node_count();
    const double beta = 2.0 * sigma;
    const double a = kernel_constants(g.dimension(), sigma).a;
    const KernelTable& tab = g.scalar_table(beta);
    std::vector<std::array<int, 2>> c2(n);
    for (int i = 0; i < n; ++i) c2[i] = g.node_c2(i);
    Eigen::VectorXd out(n);
    for (int i = 0; i < n; ++i) {
        double acc = g.exterior_tail(i, beta) * u.values[i];
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            acc += tab.at(c2[i][0] - c2[j][0], c2[i][1] - c2[j][1]) * (u.values[i] - u.values[j]);
        }
        out[i] = a * acc;
    }
    return out;
}

Field apply_half_laplacian(const Field& u, double t) {
    check_order(t, "apply_half_laplacian");
    Field out;
    out.grid = u.grid;
    out.values = apply_frac_laplacian(u, 0.5 * t);
    return out;
}

std::vector<double> apply_half_laplacian_at(const Field& u, double t,
                                            const std::vector<Point>& eval_points) {
    check_order(t, "apply_half_laplacian_at");
    const Grid& g = *u.grid;
    const Domain& dom = g.domain();
    const double h = g.spacing();
    const double a = kernel_constants(g.dimension(), 0.5 * t).a;
    Eigen::VectorXd at_nodes; // lazy: only needed for interior points
    std::vector<double> out;
    out.reserve(eval_points.size());
    for (const Point& x : eval_points) {
        bool exterior = false;
        const double d = dom.boundary_distance(x, &exterior);
        if (d < 0.5 * h)
            throw validation_error("apply_half_laplacian_at: boundary-layer point");
        if (!exterior) {
            const Lattice& lat = g.lattice();
            const int i = static_cast<int>(std::floor((x[0] - lat.lo[0]) / h));
            const int j =
                g.dimension() == 2 ? static_cast<int>(std::floor((x[1] - lat.lo[1]) / h)) : 0;
            const int node = g.node_at(i, j);
            if (node < 0)
                throw validation_error("apply_half_laplacian_at: boundary-layer point");
            if (at_nodes.size() == 0) at_nodes = apply_frac_laplacian(u, 0.5 * t);
            out.push_back(at_nodes[node]);
            continue;
        }
        // u vanishes at x, so the value is -a * int_Omega u(y)/|x-y|^{N+t} dy
        const Lattice& lat = g.lattice();
        const int ci = static_cast<int>(std::floor((x[0] - lat.lo[0]) / h));
        const int cj = g.dimension() == 2 ? static_cast<int>(std::floor((x[1] - lat.lo[1]) / h)) : 0;
        if (g.node_at(ci, cj) >= 0)
            throw validation_error("apply_half_laplacian_at: boundary-layer point");
        double acc = 0.0;
        for (int k = 0; k < g.node_count(); ++k) {
            const Point& y = g.nodes()[static_cast<std::size_t>(k)];
            const Point delta{x[0] - y[0], x[1] - y[1]};
            acc += u.values[k] * cell_integral(g.dimension(), t, h, delta);
        }
        out.push_back(-a * acc);
    }
    return out;
}

VectorField riesz_gradient(const Field& u, double t) {
    check_order(t, "riesz_gradient");
    const Grid& g = *u.grid;
    const int n = g.node_count();
    const int dim = g.dimension();
    const double mu = kernel_constants(dim, t).mu;
    const VectorKernelTable& tab = g.vector_table(t);
    std::vector<std::array<int, 2>> c2(n);
    for (int i = 0; i < n; ++i) c2[i] = g.node_c2(i);
    VectorField out;
    out.grid = u.grid;
    out.values.setZero(n, dim);
    for (int i = 0; i < n; ++i) {
        const auto tail = g.exterior_tail_vec(i, t);
        double accx = tail[0] * u.values[i];
        double accy = tail[1] * u.values[i];
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const auto v = tab.at(c2[i][0] - c2[j][0], c2[i][1] - c2[j][1]);
            const double du = u.values[i] - u.values[j];
            accx += v[0] * du;
            accy += v[1] * du;
        }
        out.values(i, 0) = mu * accx;
        if (dim == 2) out.values(i, 1) = mu * accy;
    }
    return out;
}

Field riesz_gradient_magnitude(const Field& u, double t) {
    const VectorField v = riesz_gradient(u, t);
    Field out;
    out.grid = u.grid;
    out.values = v.values.rowwise().norm();
    return out;
}

Field stein_functional(const Field& u, double t) {
    check_order(t, "stein_functional");
    const Grid& g = *u.grid;
    const int n = g.node_count();
    const double beta = 2.0 * t;
    const double half_a = 0.5 * kernel_constants(g.dimension(), t).a;
    const KernelTable& tab = g.scalar_table(beta);
    std::vector<std::array<int, 2>> c2(n);
    for (int i = 0; i < n; ++i) c2[i] = g.node_c2(i);
    Field out;
    out.grid = u.grid;
    out.values.resize(n);
    for (int i = 0; i < n; ++i) {
        double acc = g.exterior_tail(i, beta) * u.values[i] * u.values[i];
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double du = u.values[i] - u.values[j];
            acc += tab.at(c2[i][0] - c2[j][0], c2[i][1] - c2[j][1]) * du * du;
        }
        out.values[i] = std::sqrt(half_a * acc);
    }
    return out;
}

Eigen::VectorXd stein_at_shells(const Field& u, double t) {
    check_order(t, "stein_at_shells");
    const Grid& g = *u.grid;
    const auto& shells = g.exterior_shells();
    const int n = g.node_count();
    const double beta = 2.0 * t;
    const double half_a = 0.5 * kernel_constants(g.dimension(), t).a;
    const KernelTable& tab = g.scalar_table(beta);
    std::vector<std::array<int, 2>> c2(n);
    for (int i = 0; i < n; ++i) c2[i] = g.node_c2(i);
    Eigen::VectorXd out(static_cast<Eigen::Index>(shells.size()));
    for (std::size_t s = 0; s < shells.size(); ++s) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            const double w = tab.at(shells[s].c2[0] - c2[j][0], shells[s].c2[1] - c2[j][1]);
            acc += w * u.values[j] * u.values[j];
        }
        out[static_cast<Eigen::Index>(s)] = std::sqrt(half_a * acc);
    }
    return out;
}

double stein_at_point(const Field& u, double t, const Point& x) {
    check_order(t, "stein_at_point");
    const Grid& g = *u.grid;
    const double half_a = 0.5 * kernel_constants(g.dimension(), t).a;
    double acc = 0.0;
    for (int j = 0; j < g.node_count(); ++j) {
        const Point& y = g.nodes()[static_cast<std::size_t>(j)];
        const Point delta{x[0] - y[0], x[1] - y[1]};
        acc += u.values[j] * u.values[j] * cell_integral(g.dimension(), 2.0 * t, g.spacing(), delta);
    }
    return std::sqrt(half_a * acc);
}

Field riesz_potential(const Field& gfield, double alpha) {
    const Grid& g = *gfield.grid;
    if (!(alpha > 0.0 && alpha < g.dimension()))
        throw validation_error("riesz_potential: alpha must lie in (0,N)");
    const int n = g.node_count();
    const double beta = -alpha;
    const KernelTable& tab = g.scalar_table(beta);
    std::vector<std::array<int, 2>> c2(n);
    for (int i = 0; i < n; ++i) c2[i] = g.node_c2(i);
    Field out;
    out.grid = gfield.grid;
    out.values.resize(n);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j)
            acc += gfield.values[j] * tab.at(c2[i][0] - c2[j][0], c2[i][1] - c2[j][1]);
        out.values[i] = acc;
    }
    return out;
}

} // namespace frackpz
