#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "harmsurf/common.hpp"
#include "harmsurf/errors.hpp"

namespace harmsurf {

namespace detail {

// Gauss-Kronrod 7-15 pair on [-1, 1] (QUADPACK constants).
inline constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct Gk15Result {
  Cplx value;
  double error;
};

template <typename F>
Gk15Result gk15(F&& f, Cplx a, Cplx b) {
  const Cplx mid = 0.5 * (a + b);
  const Cplx half = 0.5 * (b - a);
  Cplx kronrod = kWgk[7] * f(mid);
  Cplx gauss = kWg[3] * f(mid);
  for (int j = 0; j < 7; ++j) {
    const Cplx fl = f(mid - half * kXgk[j]);
    const Cplx fr = f(mid + half * kXgk[j]);
    kronrod += kWgk[j] * (fl + fr);
    if (j % 2 == 1) gauss += kWg[j / 2] * (fl + fr);
  }
  kronrod *= half;
  gauss *= half;
  return {kronrod, std::abs(kronrod - gauss)};
}

template <typename F>
Cplx integrate_segment_rec(F&& f, Cplx a, Cplx b, double tol, int depth) {
  const auto r = gk15(f, a, b);
  if (r.error <= tol || depth >= 24) return r.value;
  const Cplx mid = 0.5 * (a + b);
  return integrate_segment_rec(f, a, mid, 0.5 * tol, depth + 1) +
         integrate_segment_rec(f, mid, b, 0.5 * tol, depth + 1);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of a complex function along the straight
/// segment [a, b]. `tol` is the absolute tolerance for the whole segment.
template <typename F>
Cplx integrate_segment(F&& f, Cplx a, Cplx b, double tol = 1e-12) {
  if (!is_finite(a) || !is_finite(b)) throw DomainError("integrate_segment: non-finite endpoint");
  if (a == b) return Cplx(0.0, 0.0);
  return detail::integrate_segment_rec(f, a, b, tol, 0);
}

/// Contour integral along the polyline through `pts` (at least 2 points),
/// segment by segment.
template <typename F>
Cplx integrate_polyline(F&& f, std::span<const Cplx> pts, double tol = 1e-12) {
  if (pts.size() < 2) throw DomainError("integrate_polyline: need at least two points");
  Cplx total(0.0, 0.0);
  for (size_t i = 0; i + 1 < pts.size(); ++i)
    total += integrate_segment(f, pts[i], pts[i + 1], tol);
  return total;
}

/// Distance from point p to the segment [a, b].
inline double segment_distance(Cplx p, Cplx a, Cplx b) {
  const Cplx ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(p - a);
  double t = ((p - a).real() * ab.real() + (p - a).imag() * ab.imag()) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(p - (a + t * ab));
}

}  // namespace harmsurf
