#pragma once

#include <algorithm>
#include <cmath>

#include "harmsurf/common.hpp"
#include "harmsurf/errors.hpp"

namespace harmsurf {

/// Complete elliptic integral of the first kind via the arithmetic-geometric
/// mean: K(k) = pi / (2 agm(1, sqrt(1-k^2))). Relative error well below 1e-13.
inline double complete_elliptic_K(double k) {
  if (!(k >= 0.0) || k >= 1.0 || !std::isfinite(k))
    throw OutOfRange("complete_elliptic_K: modulus must satisfy 0 <= k < 1");
  double a = 1.0;
  double b = std::sqrt((1.0 - k) * (1.0 + k));
  while (std::abs(a - b) > 0.5e-15 * (a + b)) {
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return kPi / (a + b);
}

struct JacobiTriple {
  double sn, cn, dn;
};

namespace detail {
inline void check_modulus(double k) {
  if (!(k >= 0.0) || k >= 1.0 || !std::isfinite(k))
    throw OutOfRange("jacobi: modulus must satisfy 0 <= k < 1");
}
inline constexpr double kModulusZeroCutoff = 1e-12;  // below this sn == sin to double precision
}  // namespace detail

/// Jacobi sn/cn/dn for real argument, by the descending Landen (AGM) chain
/// with backward amplitude recursion. The argument is reduced modulo the real
/// period 4K first so large inputs keep full accuracy.
inline JacobiTriple jacobi_real(double x, double k) {
  detail::check_modulus(k);
  if (k < detail::kModulusZeroCutoff) {
    const double s = std::sin(x);
    return {s, std::cos(x), std::sqrt(1.0 - k * k * s * s)};
  }
  double a[32], c[32];
  double an = 1.0;
  double bn = std::sqrt((1.0 - k) * (1.0 + k));
  a[0] = an;
  c[0] = k;
  int n_steps = 0;
  while (std::abs(c[n_steps]) > 1e-16 * an && n_steps < 31) {
    const double at = 0.5 * (an + bn);
    const double ct = 0.5 * (an - bn);
    bn = std::sqrt(an * bn);
    an = at;
    ++n_steps;
    a[n_steps] = an;
    c[n_steps] = ct;
  }
  const double quarter_period = kPi / (2.0 * an);
  const double xr = std::remainder(x, 4.0 * quarter_period);
  double phi = std::ldexp(an * xr, n_steps);
  for (int n = n_steps; n >= 1; --n) {
    const double s = std::clamp(c[n] / a[n] * std::sin(phi), -1.0, 1.0);
    phi = 0.5 * (phi + std::asin(s));
  }
  const double sn = std::sin(phi);
  const double cn = std::cos(phi);
  const double dn = std::sqrt(std::max(0.0, 1.0 - (k * sn) * (k * sn)));
  return {sn, cn, dn};
}

/// Quarter periods K(k), K'(k) = K(sqrt(1-k^2)). Requires 0 < k < 1 so that
/// both are finite; K is strictly increasing in k.
struct EllipticModulus {
  double k;
  double K;
  double Kprime;

  explicit EllipticModulus(double modulus) : k(modulus) {
    if (!(modulus > 0.0) || modulus >= 1.0 || !std::isfinite(modulus))
      throw OutOfRange("EllipticModulus: modulus must satisfy 0 < k < 1");
    K = complete_elliptic_K(modulus);
    Kprime = complete_elliptic_K(std::sqrt((1.0 - modulus) * (1.0 + modulus)));
  }
};

/// Distance from u to the pole lattice of sn(., k): iK' + 2mK + 2inK'.
inline double sn_pole_distance(Cplx u, double K, double Kprime) {
  const double dx = std::remainder(u.real(), 2.0 * K);
  const double dy = std::remainder(u.imag() - Kprime, 2.0 * Kprime);
  return std::hypot(dx, dy);
}

/// Distance from u to the zero lattice of sn(., k): 2mK + 2inK'.
inline double sn_zero_distance(Cplx u, double K, double Kprime) {
  const double dx = std::remainder(u.real(), 2.0 * K);
  const double dy = std::remainder(u.imag(), 2.0 * Kprime);
  return std::hypot(dx, dy);
}

struct JacobiComplexTriple {
  Cplx sn, cn, dn;
};

/// Jacobi functions of a complex argument u = x + iy, composed from the real
/// Landen evaluations at modulus k and complement k' via the addition-theorem
/// split. Both components are period-reduced, so the double periodicity
/// (4K, 2iK') holds to rounding. Throws SingularPoint within eps_sing of the
/// pole lattice.
inline JacobiComplexTriple jacobi_complex(Cplx u, double k,
                                          double eps_sing = default_tolerances().eps_sing) {
  detail::check_modulus(k);
  if (!is_finite(u)) throw DomainError("jacobi_complex: non-finite argument");
  if (k < detail::kModulusZeroCutoff) {
    // sn -> sin, cn -> cos, dn -> 1 (error O(k^2) below double rounding).
    return {std::sin(u), std::cos(u), Cplx(1.0, 0.0)};
  }
  const double kp = std::sqrt((1.0 - k) * (1.0 + k));
  const double K = complete_elliptic_K(k);
  const double Kp = complete_elliptic_K(kp);
  if (sn_pole_distance(u, K, Kp) < eps_sing)
    throw SingularPoint(u, "jacobi_complex: argument within eps_sing of an sn pole");

  const double x = std::remainder(u.real(), 4.0 * K);
  const double y = std::remainder(u.imag(), 4.0 * Kp);
  const auto [s, c, d] = jacobi_real(x, k);
  const auto [s1, c1, d1] = jacobi_real(y, kp);
  const double den = c1 * c1 + (k * s * s1) * (k * s * s1);
  if (den < 1e-300) throw SingularPoint(u, "jacobi_complex: argument at an sn pole");
  return {Cplx(s * d1, c * d * s1 * c1) / den,
          Cplx(c * c1, -s * d * s1 * d1) / den,
          Cplx(d * c1 * d1, -k * k * s * c * s1) / den};
}

/// sn(u, k) for complex u; 0 <= k < 1.
inline Cplx jacobi_sn(Cplx u, double k, double eps_sing = default_tolerances().eps_sing) {
  return jacobi_complex(u, k, eps_sing).sn;
}

}  // namespace harmsurf
