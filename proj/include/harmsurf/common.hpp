#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

namespace harmsurf {

using Cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;

inline constexpr double kPi = std::numbers::pi;

inline bool is_finite(double x) { return std::isfinite(x); }
inline bool is_finite(Cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }
inline bool is_finite(const Vec3& v) {
  return is_finite(v[0]) && is_finite(v[1]) && is_finite(v[2]);
}

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }

inline double norm_inf(const Vec3& v) {
  return std::max(std::abs(v[0]), std::max(std::abs(v[1]), std::abs(v[2])));
}

/// Numerical policy shared across modules. Every threshold is overridable at
/// the call site; these are the library-wide defaults.
struct Tolerances {
  double eps_sing = 1e-8;   // exclusion radius around poles / branch points
  double tau_imm = 1e-10;   // relative |L'|-vs-|P'| separation for the immersion test
  double tau_graph = 1e-12; // slack inside |nu| < 1
  double tau_nu = 1e-9;     // dilatation agreement across superposed parts
  double eps_zero = 1e-12;  // witness threshold for "planar sum not identically zero"
};

inline const Tolerances& default_tolerances() {
  static const Tolerances t{};
  return t;
}

}  // namespace harmsurf
