#pragma once

#include <cmath>
#include <vector>

#include "harmsurf/domain.hpp"
#include "harmsurf/elliptic.hpp"
#include "harmsurf/errors.hpp"
#include "harmsurf/immersion.hpp"

namespace harmsurf {

/// Single twist grain boundary: a row of same-handed screw dislocations along
/// the x axis with spacing d. `lambda` is the layer spacing scale of the
/// phase field Phi = lambda*x3 - (b/2pi) Im ln sin(pi z / d); it doubles as
/// the Eq.-level tilt factor for level-set export (the two are never
/// distinguished numerically).
struct TgbParams {
  double b = 1.0;
  double lambda = 1.0;
  double d = 1.0;

  void validate() const {
    if (!(d > 0.0) || !std::isfinite(d)) throw OutOfRange("TgbParams: d must be > 0");
    if (lambda == 0.0 || !std::isfinite(lambda)) throw OutOfRange("TgbParams: lambda must be nonzero");
    if (!std::isfinite(b)) throw OutOfRange("TgbParams: b must be finite");
  }

  double pitch_per_dislocation() const { return b / (2.0 * kPi * lambda); }
};

/// pi/2 grain boundary parameters: h = (b/2pi lambda) Im ln sn(theta*x +
/// i*psi*y, k). The scale factors are independent inputs; the field is
/// harmonic exactly when theta == psi (the sn argument is then holomorphic
/// in z). equal_aspect_psi gives the psi that makes the dislocation cell
/// square, theta/psi = K/K'.
struct Pi2TgbParams {
  double b = 1.0;
  double lambda = 1.0;
  double theta_scale = 1.0;
  double psi_scale = 1.0;
  EllipticModulus modulus{0.5};

  void validate() const {
    if (!(theta_scale > 0.0) || !(psi_scale > 0.0))
      throw OutOfRange("Pi2TgbParams: scale factors must be > 0");
    if (lambda == 0.0 || !std::isfinite(lambda)) throw OutOfRange("Pi2TgbParams: lambda must be nonzero");
    if (!std::isfinite(b)) throw OutOfRange("Pi2TgbParams: b must be finite");
  }

  double equal_aspect_psi() const { return theta_scale * modulus.Kprime / modulus.K; }
  bool harmonic() const { return theta_scale == psi_scale; }
};

namespace detail {

inline void puncture_lattice(Domain& d, const SingularSet& s, double exclusion) {
  for (const auto& p : s.enumerate_in(d.x0, d.x1, d.y0, d.y1)) d.add_puncture(p.pos, exclusion);
}

}  // namespace detail

/// X = (z, (b / 2 pi lambda) Im ln sin(pi z / d)), punctured at the
/// dislocation lattice {n d}.
inline EnneperImmersion tgb_single(const TgbParams& p, Domain domain) {
  p.validate();
  EnneperImmersion X;
  X.L = AnalyticFn::z();
  X.P = AnalyticFn::constant(0.0);
  X.h = HarmonicScalar{};
  const AnalyticFn arg_fn = sin(AnalyticFn::affine(kPi / p.d, 0.0));
  X.h.add_im_log(p.pitch_per_dislocation(), arg_fn);
  X.domain = std::move(domain);
  detail::puncture_lattice(X.domain, arg_fn.zero_set(), 1e-3 * p.d);
  return X;
}

inline EnneperImmersion tgb_single(const TgbParams& p) {
  p.validate();
  return tgb_single(p, Domain::rectangle(-2.5 * p.d, 2.5 * p.d, -2.0 * p.d, 2.0 * p.d));
}

/// pi/2 grain boundary via Jacobi sn: X = (z, (b / 2 pi lambda) Im ln
/// sn(theta x + i psi y, k)), punctured at both the zero and the pole
/// lattices of sn. With theta == psi the sn argument is theta*z and the
/// height is harmonic; otherwise the anisotropic term is carried explicitly
/// and is_harmonic() on the height reports false.
inline EnneperImmersion tgb_pi2(const Pi2TgbParams& p, Domain domain) {
  p.validate();
  EnneperImmersion X;
  X.L = AnalyticFn::z();
  X.P = AnalyticFn::constant(0.0);
  X.h = HarmonicScalar{};
  const double w = p.b / (2.0 * kPi * p.lambda);
  const double k = p.modulus.k;
  if (p.harmonic()) {
    const AnalyticFn snf = sn(AnalyticFn::affine(p.theta_scale, 0.0), k);
    X.h.add_im_log(w, snf);
    X.domain = std::move(domain);
    detail::puncture_lattice(X.domain, snf.zero_set(), 2e-3 / p.theta_scale);
    detail::puncture_lattice(X.domain, snf.singularities(), 2e-3 / p.theta_scale);
    return X;
  }
  // Anisotropic scale factors: u(z) = sigma z + tau conj(z) with
  // sigma = (theta + psi)/2, tau = (theta - psi)/2.
  const Cplx sigma(0.5 * (p.theta_scale + p.psi_scale), 0.0);
  const Cplx tau(0.5 * (p.theta_scale - p.psi_scale), 0.0);
  const AnalyticFn snf = sn(AnalyticFn::z(), k);
  X.h.add_im_log_anisotropic(w, snf, sigma, tau);
  X.domain = std::move(domain);
  // Singularities live on the u lattices; map them back through the
  // axis-aligned scaling (x, y) -> (theta x, psi y).
  const EllipticModulus& em = p.modulus;
  const double excl = 2e-3 / std::min(p.theta_scale, p.psi_scale);
  for (int kind = 0; kind < 2; ++kind) {
    const double base_y = kind == 0 ? 0.0 : em.Kprime;
    const long mx = static_cast<long>(p.theta_scale * std::max(std::abs(X.domain.x0), std::abs(X.domain.x1)) / (2.0 * em.K)) + 1;
    const long my = static_cast<long>(p.psi_scale * std::max(std::abs(X.domain.y0), std::abs(X.domain.y1)) / (2.0 * em.Kprime)) + 1;
    for (long m = -mx; m <= mx; ++m)
      for (long n = -my; n <= my; ++n)
        X.domain.add_puncture(Cplx(2.0 * m * em.K / p.theta_scale,
                                   (base_y + 2.0 * n * em.Kprime) / p.psi_scale),
                              excl);
  }
  return X;
}

inline EnneperImmersion tgb_pi2(const Pi2TgbParams& p) {
  p.validate();
  const double cx = 2.0 * p.modulus.K / p.theta_scale;
  const double cy = 2.0 * p.modulus.Kprime / p.psi_scale;
  return tgb_pi2(p, Domain::rectangle(-1.25 * cx, 1.25 * cx, -1.25 * cy, 1.25 * cy));
}

/// Untwisted grain boundary: a chain of dipole pairs of pitches +p and -p,
/// h(z) = p Im ln sin(pi z / 2d) - p Im ln cos(pi z / 2d)
///      = p Im ln tan(pi z / 2d).
/// The formula places positive-winding singularities at {2 n d} (sin zeros)
/// and negative ones at {(2n+1) d} (cos zeros); adjacent singularities are a
/// distance d apart and each sublattice has spacing 2d.
inline EnneperImmersion utgb(double pitch, double d, Domain domain) {
  if (!(d > 0.0) || !std::isfinite(d)) throw OutOfRange("utgb: d must be > 0");
  if (pitch == 0.0 || !std::isfinite(pitch)) throw ZeroPitch("utgb: pitch must be nonzero");
  EnneperImmersion X;
  X.L = AnalyticFn::z();
  X.P = AnalyticFn::constant(0.0);
  X.h = HarmonicScalar{};
  const AnalyticFn s = sin(AnalyticFn::affine(kPi / (2.0 * d), 0.0));
  const AnalyticFn c = cos(AnalyticFn::affine(kPi / (2.0 * d), 0.0));
  X.h.add_im_log(pitch, s);
  X.h.add_im_log(-pitch, c);
  X.domain = std::move(domain);
  detail::puncture_lattice(X.domain, s.zero_set(), 1e-3 * d);
  detail::puncture_lattice(X.domain, c.zero_set(), 1e-3 * d);
  return X;
}

inline EnneperImmersion utgb(double pitch, double d) {
  if (!(d > 0.0) || !std::isfinite(d)) throw OutOfRange("utgb: d must be > 0");
  if (pitch == 0.0 || !std::isfinite(pitch)) throw ZeroPitch("utgb: pitch must be nonzero");
  return utgb(pitch, d, Domain::rectangle(-3.5 * d, 3.5 * d, -2.5 * d, 2.5 * d));
}

struct ScherkRowResult {
  double partial = 0.0;  // truncated-superposition height
  double closed = 0.0;   // closed-form height (b / 2 pi lambda) arg sin(pi z / d)
  double gap = 0.0;      // branch-gauged distance between the two
};

/// Compares the finite superposition of helicoid contributions against the
/// closed-form grain boundary through the product form
///   sin(pi z / d) = (pi z / d) * prod_{n>=1} (1 - z^2 / (n^2 d^2)).
/// Each factor tends to 1, so its Im-log needs no per-term gauge constant and
/// the series converges absolutely; the raw pairing arg(z - nd) + arg(z + nd)
/// would need an implicit +-pi per term. The gap is reported modulo the layer
/// period b / lambda.
inline ScherkRowResult scherk_row_check(const TgbParams& p, int N, Cplx z) {
  p.validate();
  if (N < 0) throw OutOfRange("scherk_row_check: N must be >= 0");
  if (!is_finite(z)) throw DomainError("scherk_row_check: non-finite point");
  const double scale = p.pitch_per_dislocation();
  const double near = std::abs(std::remainder(z.real(), p.d));
  if (std::hypot(near, z.imag()) < 1e-9 * p.d)
    throw SingularPoint(z, "scherk_row_check: point on the dislocation lattice");

  double acc = std::arg(kPi * z / p.d);
  const Cplx z2 = z * z;
  for (int n = 1; n <= N; ++n) {
    const double nd = static_cast<double>(n) * p.d;
    acc += std::arg(Cplx(1.0, 0.0) - z2 / (nd * nd));
  }
  ScherkRowResult r;
  r.partial = scale * acc;
  r.closed = scale * std::arg(std::sin(kPi * z / p.d));
  const double period = std::abs(p.b / p.lambda);
  const double diff = r.partial - r.closed;
  r.gap = period > 0.0 ? std::abs(std::remainder(diff, period)) : std::abs(diff);
  return r;
}

}  // namespace harmsurf
