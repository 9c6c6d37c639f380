#include "frackpz/norms.hpp"
#include "frackpz/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace frackpz {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kInf = std::numeric_limits<double>::infinity();
} // namespace

NormReport norm_report(const Field& u, NormKind kind, double sigma, double p) {
    NormReport rep;
    rep.kind = kind;
    rep.sigma = sigma;
    rep.p = p;
    rep.grid_h = u.grid->spacing();
    switch (kind) {
    case NormKind::lebesgue: rep.value = lebesgue_norm(u, p); break;
    case NormKind::gagliardo: rep.value = gagliardo_seminorm(u, sigma, p); break;
    case NormKind::stein: rep.value = stein_norm(u, sigma, p); break;
    case NormKind::holder: rep.value = holder_seminorm(u, sigma); break;
    }
    return rep;
}

double lebesgue_norm(const Field& u, double p) {
    if (!(p >= 1.0)) throw validation_error("lebesgue_norm: p must be >= 1");
    if (u.values.size() == 0) return 0.0;
    const double scale = u.values.cwiseAbs().maxCoeff();
    if (p == kInf || scale == 0.0) return scale;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < u.values.size(); ++i)
        acc += std::pow(std::abs(u.values[i]) / scale, p);
    return scale * std::pow(acc * u.grid->cell_measure(), 1.0 / p);
}

double gagliardo_seminorm(const Field& u, double sigma, double p) {
    if (!(sigma > 0.0 && sigma < 1.0)) throw validation_error("gagliardo_seminorm: sigma in (0,1)");
    if (!(p >= 1.0)) throw validation_error("gagliardo_seminorm: p must be >= 1");
    const Grid& g = *u.grid;
    const int n = g.node_count();
    const double beta = sigma * p;
    const KernelTable& tab = g.scalar_table(beta);
    const double cell = g.cell_measure();
    const double scale = u.values.size() ? u.values.cwiseAbs().maxCoeff() : 0.0;
    if (scale == 0.0) return 0.0;
    std::vector<std::array<int, 2>> c2(n);
    for (int i = 0; i < n; ++i) c2[i] = g.node_c2(i);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double du = std::abs(u.values[i] - u.values[j]) / scale;
            if (du == 0.0) continue;
            const double w = tab.at(c2[i][0] - c2[j][0], c2[i][1] - c2[j][1]);
            acc += 2.0 * std::pow(du, p) * w * cell; // both orderings of (i,j)
        }
        const double ui = std::abs(u.values[i]) / scale;
        if (ui > 0.0) acc += 2.0 * std::pow(ui, p) * g.exterior_tail(i, beta) * cell;
    }
    return scale * std::pow(acc, 1.0 / p);
}

double w_norm(const Field& u, double sigma, double p) {
    const double lp = lebesgue_norm(u, p);
    const double semi = gagliardo_seminorm(u, sigma, p);
    return std::pow(std::pow(lp, p) + std::pow(semi, p), 1.0 / p);
}

double stein_lp_norm(const Field& u, double sigma, double p) {
    if (!(sigma > 0.0 && sigma < 1.0)) throw validation_error("stein_lp_norm: sigma in (0,1)");
    const Grid& g = *u.grid;
    const int N = g.dimension();
    if (!(p > 2.0 * N / (N + 2.0 * sigma)))
        throw validation_error("stein_lp_norm: needs p > 2N/(N+2 sigma) for a convergent tail");
    const Field interior = stein_functional(u, sigma);
    const Eigen::VectorXd shells = stein_at_shells(u, sigma);
    const auto& sp = g.exterior_shells();

    double scale = interior.values.size() ? interior.values.maxCoeff() : 0.0;
    if (shells.size()) scale = std::max(scale, shells.maxCoeff());
    if (scale == 0.0) return 0.0;

    double acc = 0.0;
    const double cell = g.cell_measure();
    for (Eigen::Index i = 0; i < interior.values.size(); ++i)
        acc += std::pow(interior.values[i] / scale, p) * cell;
    for (Eigen::Index s = 0; s < shells.size(); ++s)
        acc += std::pow(shells[s] / scale, p) * sp[static_cast<std::size_t>(s)].weight;

    // power-law remainder beyond the tail radius: D_sigma u ~ c |x|^{-(N+2s)/2}
    const double Rs = g.tail_radius() + g.spacing();
    const double decay = 0.5 * (N + 2.0 * sigma) * p; // > N by the p precondition
    double mean_pow = 0.0;
    const int ndirs = N == 1 ? 2 : 16;
    for (int k = 0; k < ndirs; ++k) {
        Point x{0.0, 0.0};
        if (N == 1)
            x[0] = (k == 0 ? Rs : -Rs);
        else {
            const double th = 2.0 * kPi * (k + 0.5) / ndirs;
            x = {Rs * std::cos(th), Rs * std::sin(th)};
        }
        mean_pow += std::pow(stein_at_point(u, sigma, x) / scale, p);
    }
    mean_pow /= ndirs;
    const double surface = N == 1 ? 2.0 : 2.0 * kPi;
    acc += mean_pow * surface * std::pow(Rs, N) / (decay - N);

    return scale * std::pow(acc, 1.0 / p);
}

double stein_norm(const Field& u, double sigma, double p) {
    const int N = u.grid->dimension();
    if (!(p > 2.0 * N / (N + 2.0 * sigma)))
        throw validation_error("stein_norm: equivalence requires p > 2N/(N+2 sigma)");
    return lebesgue_norm(u, p) + stein_lp_norm(u, sigma, p);
}

double stein_norm_domain(const Field& u, double sigma, double p) {
    if (!(p >= 1.0)) throw validation_error("stein_norm_domain: p must be >= 1");
    Field d = stein_functional(u, sigma);
    return lebesgue_norm(u, p) + lebesgue_norm(d, p);
}

double holder_seminorm(const Field& u, double sigma) {
    if (!(sigma > 0.0 && sigma <= 1.0)) throw validation_error("holder_seminorm: sigma in (0,1]");
    const Grid& g = *u.grid;
    const int n = g.node_count();
    const double hs = std::pow(g.spacing(), sigma); // r >= h, so du <= best*hs cannot improve
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double du = std::abs(u.values[i] - u.values[j]);
            if (du <= best * hs) continue;
            const double dx0 = g.nodes()[i][0] - g.nodes()[j][0];
            const double dx1 = g.nodes()[i][1] - g.nodes()[j][1];
            const double r = std::sqrt(dx0 * dx0 + dx1 * dx1);
            best = std::max(best, du / std::pow(r, sigma));
        }
    }
    return best;
}

double interpolation_defect(const Field& g, double q, double eta, double r) {
    if (!(1.0 + eta < q && q < r))
        throw validation_error("interpolation_defect: needs 1+eta < q < r");
    const double theta = (1.0 / q - 1.0 / r) / (1.0 / (1.0 + eta) - 1.0 / r);
    const double nq = lebesgue_norm(g, q);
    const double nlow = lebesgue_norm(g, 1.0 + eta);
    const double nhigh = lebesgue_norm(g, r);
    return nq - std::pow(nlow, theta) * std::pow(nhigh, 1.0 - theta);
}

double measure_embedding_constant(std::shared_ptr<const Grid> grid, double sigma,
                                  double sigma_prime, double p, int nsamples, CounterRng& rng) {
    if (!(sigma > 0.0 && sigma <= sigma_prime && sigma_prime < 1.0))
        throw validation_error("measure_embedding_constant: needs 0 < sigma <= sigma' < 1");
    if (sigma == sigma_prime) return 1.0;
    const Grid& g = *grid;
    const int n = g.node_count();
    const Point c = g.domain().incenter();
    const double rin = g.domain().inradius();

    std::vector<Field> battery;
    for (double w : {1.0, 0.6, 0.3}) {
        battery.push_back(make_field(grid, [&](const Point& x) {
            const double dx = x[0] - c[0], dy = x[1] - c[1];
            const double rho = std::sqrt(dx * dx + dy * dy) / (w * rin);
            return rho < 1.0 ? std::cos(0.5 * kPi * rho) * std::cos(0.5 * kPi * rho) : 0.0;
        }));
    }
    for (double e : {sigma_prime, 0.5 * (sigma + sigma_prime), 1.0}) {
        battery.push_back(make_field(grid, [&](const Point& x) {
            const double dx = x[0] - c[0], dy = x[1] - c[1];
            const double rho2 = (dx * dx + dy * dy) / (rin * rin);
            return rho2 < 1.0 ? std::pow(1.0 - rho2, e) : 0.0;
        }));
    }
    while (static_cast<int>(battery.size()) < std::max(nsamples, 7)) {
        Field f;
        f.grid = grid;
        f.values.resize(n);
        for (int i = 0; i < n; ++i) f.values[i] = rng.uniform(-1.0, 1.0);
        battery.push_back(std::move(f));
    }

    double best = 0.0;
    for (const Field& f : battery) {
        const double denom = w_norm(f, sigma_prime, p);
        if (denom == 0.0) continue;
        best = std::max(best, w_norm(f, sigma, p) / denom);
    }
    return best;
}

} // namespace frackpz
