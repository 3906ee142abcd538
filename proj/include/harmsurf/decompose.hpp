#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "harmsurf/analytic.hpp"
#include "harmsurf/domain.hpp"
#include "harmsurf/errors.hpp"
#include "harmsurf/immersion.hpp"
#include "harmsurf/quadrature.hpp"

namespace harmsurf {

/// Weierstrass data (F holomorphic, G meromorphic through negative-power
/// nodes) with the integration basepoint. Catalog entries also carry
/// closed-form primitives Phi = int F, V = int G F, W = int F G^2; otherwise
/// the primitives are evaluated by adaptive contour quadrature from the
/// basepoint.
struct WeierstrassData {
  AnalyticFn F;
  AnalyticFn G;
  Cplx basepoint{0.0, 0.0};
  Domain domain = Domain::rectangle(-1.0, 1.0, -1.0, 1.0);
  std::optional<AnalyticFn> Phi, V, W;

  AnalyticFn phi_fn() const { return Phi ? *Phi : AnalyticFn::primitive(F, basepoint); }
  AnalyticFn v_fn() const { return V ? *V : AnalyticFn::primitive(G * F, basepoint); }
  AnalyticFn w_fn() const { return W ? *W : AnalyticFn::primitive(F * G * G, basepoint); }
};

/// Decomposition of a minimal (or maximal) surface into two harmonic
/// immersions. X1 has Enneper data (L1', P1') = (F, 0); the stored X2 is the
/// anti-holomorphic component with (L2', P2') = (0, -F G^2), flagged with the
/// reciprocal dilatation convention. Recomposition:
///   minimal (sign A): X = X1 + X2           (the stored X2 is already the
///                     A-reflected copy of the holomorphic-planar component)
///   maximal (sign B): X = X1 + diag(-1,-1,1) X2.
struct HarmonicPair {
  EnneperImmersion X1;
  EnneperImmersion X2;
  SignMatrix sign = SignMatrix::A;

  Vec3 recompose(Cplx z) const {
    const Vec3 a = X1.point(z);
    const Vec3 b = X2.point(z);
    return sign == SignMatrix::A ? a + b : a + apply_sign(SignMatrix::XY, b);
  }

  /// The recomposed surface as a single Enneper immersion (exact, since the
  /// components share the height Re V): minimal has (L, P) = (Phi, -W),
  /// maximal (Phi, +W), both with h = 2 Re V.
  EnneperImmersion recompose_enneper() const {
    EnneperImmersion X;
    X.L = X1.L;
    X.P = sign == SignMatrix::A ? X2.P : -X2.P;
    X.h = X1.h;
    X.h.append(X2.h);
    X.domain = X1.domain;
    return X;
  }
};

/// Direct Weierstrass evaluation of the minimal surface:
/// X_min = Re int_base^z ((1 - G^2) F, -i (1 + G^2) F, 2 G F) dz.
inline Vec3 weierstrass_minimal(const WeierstrassData& w, Cplx z) {
  if (!is_finite(z)) throw DomainError("weierstrass_minimal: non-finite point");
  const AnalyticFn Phi = w.phi_fn(), V = w.v_fn(), W = w.w_fn();
  const Cplx phi = Phi.eval(z), ww = W.eval(z), vv = V.eval(z);
  return {(phi - ww).real(), (phi + ww).imag(), 2.0 * vv.real()};
}

/// Maximal counterpart fixed by the B-recomposition of the same components:
/// X_max = Re int_base^z ((1 + G^2) F, -i (1 - G^2) F, 2 G F) dz.
inline Vec3 weierstrass_maximal(const WeierstrassData& w, Cplx z) {
  if (!is_finite(z)) throw DomainError("weierstrass_maximal: non-finite point");
  const AnalyticFn Phi = w.phi_fn(), V = w.v_fn(), W = w.w_fn();
  const Cplx phi = Phi.eval(z), ww = W.eval(z), vv = V.eval(z);
  return {(phi + ww).real(), (phi - ww).imag(), 2.0 * vv.real()};
}

namespace detail {

/// FG^2 must stay bounded at every declared pole of G inside the domain
/// (poles of G must be cancelled by zeros of F for the decomposition data to
/// make sense).
inline void check_removable(const WeierstrassData& w) {
  const AnalyticFn FG2 = w.F * w.G * w.G;
  const SingularSet gs = w.G.singularities();
  double bound = 0.0;
  std::vector<Cplx> safe = probe_points(w.domain, ProbeSpec{5, 5, 5, 1});
  for (Cplx z : safe) {
    try {
      bound = std::max(bound, std::abs(FG2.eval(z)));
    } catch (const Error&) {
    }
  }
  for (const auto& p : gs.enumerate_in(w.domain.x0, w.domain.x1, w.domain.y0, w.domain.y1)) {
    if (p.kind != SingKind::Pole) continue;
    for (int i = 0; i < 8; ++i) {
      const Cplx probe = p.pos + 1e-5 * std::exp(Cplx(0.0, 2.0 * kPi * i / 8.0));
      try {
        if (std::abs(FG2.eval(probe)) > 1e4 * (1.0 + bound))
          throw NonremovableSingularity("F G^2 blows up at a declared pole of G");
      } catch (const SingularPoint&) {
        throw NonremovableSingularity("F G^2 singular at a declared pole of G");
      }
    }
  }
}

inline HarmonicPair decompose_impl(const WeierstrassData& w, SignMatrix sign) {
  SingularSet sing = w.F.singularities();
  sing.merge(w.G.singularities());
  if (sing.distance(w.basepoint) < default_tolerances().eps_sing)
    throw DomainError("decompose: basepoint lies on a singular set of the data");
  check_removable(w);
  const AnalyticFn Phi = w.phi_fn(), V = w.v_fn(), W = w.w_fn();

  HarmonicPair pair;
  pair.sign = sign;

  pair.X1.L = Phi;
  pair.X1.P = AnalyticFn::constant(0.0);
  pair.X1.h = HarmonicScalar{};
  pair.X1.h.add_re(1.0, V);
  pair.X1.domain = w.domain;

  pair.X2.L = AnalyticFn::constant(0.0);
  pair.X2.P = -W;
  pair.X2.h = HarmonicScalar{};
  pair.X2.h.add_re(1.0, V);
  pair.X2.domain = w.domain;
  pair.X2.reciprocal_dilatation = !pair.X2.P.is_zero();
  return pair;
}

}  // namespace detail

/// Splits the minimal surface of (F, G) into harmonic immersions X1, X2 with
/// X_min = X1 + X2 pointwise (checked by the caller against
/// weierstrass_minimal).
inline HarmonicPair decompose_minimal(const WeierstrassData& w) {
  return detail::decompose_impl(w, SignMatrix::A);
}

/// Same components recomposed with B = diag(1,-1,1); requires |G| != 1 on the
/// probe set (the maximal surface's metric degenerates where |G| = 1).
inline HarmonicPair decompose_maximal(const WeierstrassData& w) {
  for (Cplx z : probe_points(w.domain, ProbeSpec{9, 9, 16, 2})) {
    try {
      if (std::abs(std::abs(w.G.eval(z)) - 1.0) < 1e-9)
        throw DegenerateGaussMap(z, "decompose_maximal: |G| = 1 at a probe");
    } catch (const SingularPoint&) {
    } catch (const DomainError&) {
    }
  }
  return detail::decompose_impl(w, SignMatrix::B);
}

/// Catalog of Weierstrass data with closed-form primitives.
/// Names: "enneper", "catenoid", "helicoid".
inline WeierstrassData weierstrass_catalog(const std::string& name) {
  using AF = AnalyticFn;
  WeierstrassData w;
  if (name == "enneper") {
    w.F = AF::constant(1.0);
    w.G = AF::z();
    w.Phi = AF::z();
    w.V = Cplx(0.5, 0.0) * pow(AF::z(), 2);
    w.W = Cplx(1.0 / 3.0, 0.0) * pow(AF::z(), 3);
    w.domain = Domain::rectangle(-1.2, 1.2, -1.2, 1.2);
    return w;
  }
  if (name == "catenoid") {
    // F = -e^{-z}/2, G = -e^{z}: X = (cosh x cos y - 1, -cosh x sin y, x) on
    // a fundamental strip |y| < pi. Primitives vanish at the basepoint 0, so
    // closed forms and contour quadrature agree exactly.
    w.F = Cplx(-0.5, 0.0) * exp(AF::affine(-1.0, 0.0));
    w.G = Cplx(-1.0, 0.0) * exp(AF::z());
    w.Phi = Cplx(0.5, 0.0) * exp(AF::affine(-1.0, 0.0)) - Cplx(0.5, 0.0);
    w.V = Cplx(0.5, 0.0) * AF::z();
    w.W = Cplx(-0.5, 0.0) * exp(AF::z()) + Cplx(0.5, 0.0);
    w.domain = Domain::rectangle(-1.2, 1.2, -2.8, 2.8);
    return w;
  }
  if (name == "helicoid") {
    // Conjugate of the catenoid: F = -i e^{-z}/2, G = -e^{z}.
    w.F = Cplx(0.0, -0.5) * exp(AF::affine(-1.0, 0.0));
    w.G = Cplx(-1.0, 0.0) * exp(AF::z());
    w.Phi = Cplx(0.0, 0.5) * exp(AF::affine(-1.0, 0.0)) - Cplx(0.0, 0.5);
    w.V = Cplx(0.0, 0.5) * AF::z();
    w.W = Cplx(0.0, -0.5) * exp(AF::z()) + Cplx(0.0, 0.5);
    w.domain = Domain::rectangle(-1.2, 1.2, -2.8, 2.8);
    return w;
  }
  throw OutOfRange("weierstrass_catalog: unknown datum '" + name + "'");
}

/// Euclidean conformality defect sum phi_j^2 (the Hopf differential) of the
/// recomposed minimal surface; identically 0 characterizes minimal.
inline Cplx euclidean_conformality(const EnneperImmersion& X, Cplx z) {
  return hopf_differential(X, z);
}

/// Lorentzian conformality defect phi_1^2 + phi_2^2 - phi_3^2 in signature
/// (+,+,-): equals L' P' - (h_z)^2 for Enneper data.
inline Cplx lorentz_conformality(const EnneperImmersion& X, Cplx z) {
  const auto opts = HarmonicScalar::plain_opts();
  const Cplx Lp = X.L.is_zero() ? Cplx(0.0, 0.0) : X.L.derivative().eval(z, opts);
  const Cplx Pp = X.P.is_zero() ? Cplx(0.0, 0.0) : X.P.derivative().eval(z, opts);
  const Cplx hz = X.h.dz(z, opts);
  return Lp * Pp - hz * hz;
}

}  // namespace harmsurf
