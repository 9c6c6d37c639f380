#include "frackpz/exponents.hpp"
#include "frackpz/errors.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace frackpz {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_orders(double s, double t, const char* who) {
    if (!(s > 0.0 && s < 1.0 && t > 0.0 && t < 1.0))
        throw validation_error(std::string(who) + ": s,t must lie in (0,1)");
}
} // namespace

double qbar(double m, double s, double t, int N) {
    check_orders(s, t, "qbar");
    if (!(m >= 1.0)) throw validation_error("qbar: m must be >= 1");
    const double Ns = static_cast<double>(N) / s;
    if (t <= s) {
        if (m >= Ns) return kInf;
        return N / (N - m * s);
    }
    if (m > Ns) return s / (N * (t - s));
    return N / (N - s * m + m * N * (t - s));
}

double ptilde(double m, double s, double t, int N) {
    check_orders(s, t, "ptilde");
    if (t < s) throw validation_error("ptilde: defined for s <= t only");
    if (!(t < std::min(1.0, s * (1.0 + 1.0 / N))))
        throw validation_error("ptilde: requires t < min(1, s(1+1/N))");
    if (!(m >= 1.0)) throw validation_error("ptilde: m must be >= 1");
    const double inv_tms = (t - s > 0.0) ? 1.0 / (t - s) : kInf;
    if (m > N / (2.0 * s - t)) return inv_tms;
    return std::min(m * N / (N - m * s + m * N * (t - s)), inv_tms);
}

double mbar(double s, double t, int N) {
    check_orders(s, t, "mbar");
    const double pos = std::max(t - s, 0.0);
    return 2.0 * N / (N + 2.0 * s - 2.0 * N * pos);
}

} // namespace frackpz
