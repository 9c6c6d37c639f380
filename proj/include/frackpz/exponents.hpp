#ifndef FRACKPZ_EXPONENTS_HPP
#define FRACKPZ_EXPONENTS_HPP

namespace frackpz {

// Admissible-exponent formulas.  All three return +infinity where the defining
// case does (the 1/a^+ convention: 1/a^+ = +infinity when a <= 0).

// growth cap q_bar(m,s,t): the largest nonlinearity power covered by the
// existence theorems for data in L^m.
double qbar(double m, double s, double t, int N);

// integrability cap p_tilde(m,s,t) of the Calderon-Zygmund estimate; defined
// for 0 < s <= t < min(1, s(1+1/N)).  At the case boundary m = N/(2s-t) the
// min-branch is used.
double ptilde(double m, double s, double t, int N);

// data-regularity floor m_bar(s,t) = 2N/(N+2s-2N(t-s)^+) of the Stein-variant
// theorem.
double mbar(double s, double t, int N);

} // namespace frackpz

#endif
