#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "harmsurf/analytic.hpp"
#include "harmsurf/common.hpp"
#include "harmsurf/domain.hpp"
#include "harmsurf/errors.hpp"
#include "harmsurf/harmonic.hpp"

namespace harmsurf {

/// Harmonic Enneper immersion X = (L + conj(P), h) with L, P holomorphic and
/// h harmonic. The planar part f = L + conj(P) is a harmonic map; X is an
/// immersion wherever |L'| != |P'|.
struct EnneperImmersion {
  AnalyticFn L;
  AnalyticFn P;
  HarmonicScalar h;
  Domain domain;

  /// True for components whose planar part is purely anti-holomorphic
  /// (L identically 0, P' != 0); the dilatation P'/L' is formally infinite
  /// there and callers use the reciprocal L'/P' instead.
  bool reciprocal_dilatation = false;

  /// Set by unchecked_sum: the dilatation hypotheses were NOT verified.
  bool unverified_sum = false;

  Cplx planar(Cplx z, const EvalOptions& opts = HarmonicScalar::plain_opts()) const {
    Cplx f = L.is_zero() ? Cplx(0.0, 0.0) : L.eval(z, opts);
    if (!P.is_zero()) f += std::conj(P.eval(z, opts));
    return f;
  }

  double height(Cplx z) const { return h.eval(z); }

  Vec3 point(Cplx z) const {
    const Cplx f = planar(z);
    return {f.real(), f.imag(), h.eval(z)};
  }

  /// Wirtinger derivative vector (phi_1, phi_2, phi_3) = dz of the three
  /// coordinates: phi_1 = (L'+P')/2, phi_2 = (L'-P')/(2i), phi_3 = h_z.
  std::array<Cplx, 3> phi(Cplx z, const EvalOptions& opts = HarmonicScalar::plain_opts()) const {
    const Cplx Lp = L.is_zero() ? Cplx(0.0, 0.0) : L.derivative().eval(z, opts);
    const Cplx Pp = P.is_zero() ? Cplx(0.0, 0.0) : P.derivative().eval(z, opts);
    return {0.5 * (Lp + Pp), Cplx(0.0, -0.5) * (Lp - Pp), h.dz(z, opts)};
  }
};

/// Builds (L, P, h) from a triple of analytic functions so that
/// X = (Re W1, Re W2, Re W3): L = (W1 + i W2)/2, P = (W1 - i W2)/2.
inline EnneperImmersion enneper_from_re(const AnalyticFn& W1, const AnalyticFn& W2,
                                        const AnalyticFn& W3, Domain domain) {
  EnneperImmersion X;
  X.L = AnalyticFn::sum({{Cplx(0.5, 0.0), W1}, {Cplx(0.0, 0.5), W2}}, 0.0);
  X.P = AnalyticFn::sum({{Cplx(0.5, 0.0), W1}, {Cplx(0.0, -0.5), W2}}, 0.0);
  X.h = HarmonicScalar{};
  X.h.add_re(1.0, W3);
  X.domain = std::move(domain);
  X.reciprocal_dilatation = X.L.is_zero() && !X.P.is_zero();
  return X;
}

/// Hopf differential of the immersion at z: L'(z) P'(z) + (h_z)^2. Equals
/// the sum of squared Wirtinger derivatives of the three coordinates; an
/// identically vanishing value characterizes minimal (conformal) immersions.
inline Cplx hopf_differential(const EnneperImmersion& X, Cplx z) {
  const auto opts = HarmonicScalar::plain_opts();
  const Cplx Lp = X.L.is_zero() ? Cplx(0.0, 0.0) : X.L.derivative().eval(z, opts);
  const Cplx Pp = X.P.is_zero() ? Cplx(0.0, 0.0) : X.P.derivative().eval(z, opts);
  const Cplx hz = X.h.dz(z, opts);
  return Lp * Pp + hz * hz;
}

/// Second Beltrami coefficient nu(z) = P'(z)/L'(z) of the planar part.
/// Throws DegeneratePlanarPart when |L'| < eps_sing; anti-holomorphic
/// components (L == 0) always degenerate here and expose the reciprocal form.
inline Cplx dilatation(const EnneperImmersion& X, Cplx z,
                       const Tolerances& tol = default_tolerances()) {
  const auto opts = HarmonicScalar::plain_opts();
  if (X.P.is_zero()) return Cplx(0.0, 0.0);
  const Cplx Lp = X.L.is_zero() ? Cplx(0.0, 0.0) : X.L.derivative().eval(z, opts);
  if (std::abs(Lp) < tol.eps_sing)
    throw DegeneratePlanarPart(z, "dilatation: |L'| below eps_sing");
  return X.P.derivative().eval(z, opts) / Lp;
}

/// Reciprocal convention L'(z)/P'(z), for components flagged with an
/// anti-holomorphic planar part.
inline Cplx dilatation_reciprocal(const EnneperImmersion& X, Cplx z,
                                  const Tolerances& tol = default_tolerances()) {
  const auto opts = HarmonicScalar::plain_opts();
  if (X.L.is_zero()) return Cplx(0.0, 0.0);
  const Cplx Pp = X.P.is_zero() ? Cplx(0.0, 0.0) : X.P.derivative().eval(z, opts);
  if (std::abs(Pp) < tol.eps_sing)
    throw DegeneratePlanarPart(z, "dilatation_reciprocal: |P'| below eps_sing");
  return X.L.derivative().eval(z, opts) / Pp;
}

/// Immersion certificate at z: | |L'| - |P'| | > tau_imm relative to the
/// larger modulus. Sufficient, not necessary.
inline bool is_immersion_at(const EnneperImmersion& X, Cplx z,
                            const Tolerances& tol = default_tolerances()) {
  const auto opts = HarmonicScalar::plain_opts();
  const double lp = X.L.is_zero() ? 0.0 : std::abs(X.L.derivative().eval(z, opts));
  const double pp = X.P.is_zero() ? 0.0 : std::abs(X.P.derivative().eval(z, opts));
  const double scale = std::max(lp, pp);
  return scale > 0.0 && std::abs(lp - pp) > tol.tau_imm * scale;
}

inline std::vector<bool> immersion_map(const EnneperImmersion& X, std::span<const Cplx> grid,
                                       const Tolerances& tol = default_tolerances()) {
  std::vector<bool> mask;
  mask.reserve(grid.size());
  for (Cplx z : grid) mask.push_back(is_immersion_at(X, z, tol));
  return mask;
}

/// Lewy's criterion sampled on a grid: the planar part is locally univalent
/// and orientation preserving iff |nu| < 1; we demand |nu| < 1 - tau_graph at
/// every sample.
inline bool is_harmonic_graph(const EnneperImmersion& X, std::span<const Cplx> grid,
                              const Tolerances& tol = default_tolerances()) {
  if (X.reciprocal_dilatation) return false;  // |nu| formally infinite
  for (Cplx z : grid) {
    const Cplx nu = dilatation(X, z, tol);
    if (!(std::abs(nu) < 1.0 - tol.tau_graph)) return false;
  }
  return true;
}

struct SuperposePart {
  EnneperImmersion X;
  double a = 1.0;  // weight on the planar part
  double b = 1.0;  // weight on the height
};

struct SuperposeOptions {
  Tolerances tol = default_tolerances();
  ProbeSpec probes{};
};

namespace detail {

inline Domain common_domain(std::span<const SuperposePart> parts) {
  Domain d = parts.front().X.domain;
  for (size_t i = 1; i < parts.size(); ++i) d = intersect(d, parts[i].X.domain);
  return d;
}

inline EnneperImmersion combine(std::span<const SuperposePart> parts, Domain domain) {
  std::vector<std::pair<Cplx, AnalyticFn>> lsum, psum;
  EnneperImmersion out;
  out.h = HarmonicScalar::zero();
  for (const auto& p : parts) {
    if (!p.X.L.is_zero()) lsum.emplace_back(Cplx(p.a, 0.0), p.X.L);
    if (!p.X.P.is_zero()) psum.emplace_back(Cplx(p.a, 0.0), p.X.P);
    out.h.append(p.X.h.scaled(p.b));
  }
  out.L = AnalyticFn::sum(std::move(lsum), 0.0);
  out.P = AnalyticFn::sum(std::move(psum), 0.0);
  out.domain = std::move(domain);
  out.reciprocal_dilatation = out.L.is_zero() && !out.P.is_zero();
  return out;
}

}  // namespace detail

/// Superposition of harmonic Enneper immersions sharing a common dilatation:
/// X = (sum a_i f_i, sum b_i h_i) on the intersected domain. Verifies on a
/// probe set that (1) all dilatations agree within tau_nu, (2) the planar sum
/// is not identically zero, and (3) the output's dilatation still matches.
/// The immersion property of the output is NOT assumed; callers re-check it
/// with immersion_map.
inline EnneperImmersion superpose(std::span<const SuperposePart> parts,
                                  const SuperposeOptions& opts = SuperposeOptions{}) {
  if (parts.empty()) throw DomainError("superpose: no parts");
  Domain domain = detail::common_domain(parts);
  const std::vector<Cplx> probes = probe_points(domain, opts.probes);
  if (probes.empty()) throw EmptyDomainIntersection("superpose: no safe probe points");

  const bool all_p_zero = [&] {
    for (const auto& p : parts)
      if (!p.X.P.is_zero()) return false;
    return true;
  }();
  const bool all_recip = [&] {
    for (const auto& p : parts)
      if (!p.X.reciprocal_dilatation) return false;
    return true;
  }();

  // Dilatation agreement across parts. Structural shortcuts first: if every
  // P vanishes identically the common dilatation is 0; if every part is
  // anti-holomorphic compare reciprocals instead.
  if (!all_p_zero && parts.size() > 1) {
    size_t compared = 0;
    for (Cplx z : probes) {
      Cplx nu0;
      try {
        nu0 = all_recip ? dilatation_reciprocal(parts[0].X, z, opts.tol)
                        : dilatation(parts[0].X, z, opts.tol);
      } catch (const DegeneratePlanarPart&) {
        continue;  // probe unusable for the reference part
      } catch (const Error&) {
        continue;  // singular evaluation; probe filtered
      }
      for (size_t i = 1; i < parts.size(); ++i) {
        Cplx nui;
        try {
          nui = all_recip ? dilatation_reciprocal(parts[i].X, z, opts.tol)
                          : dilatation(parts[i].X, z, opts.tol);
        } catch (const DegeneratePlanarPart&) {
          throw DilatationMismatch(z, nu0, Cplx(std::numeric_limits<double>::infinity(), 0.0));
        } catch (const Error&) {
          continue;
        }
        if (std::abs(nui - nu0) >= opts.tol.tau_nu) throw DilatationMismatch(z, nu0, nui);
        ++compared;
      }
    }
    if (compared == 0)
      throw EmptyDomainIntersection("superpose: no probe admitted a dilatation comparison");
  }

  EnneperImmersion out = detail::combine(parts, std::move(domain));

  // Planar sum must not be identically zero: demand a witness probe.
  bool witness = false;
  for (Cplx z : probes) {
    try {
      if (std::abs(out.planar(z)) > opts.tol.eps_zero) {
        witness = true;
        break;
      }
    } catch (const Error&) {
    }
  }
  if (!witness) throw ZeroPlanarSum("superpose: sum of planar parts vanishes on all probes");

  // The output's dilatation must reproduce the parts' (the proof's identity
  // P_z = nu L_z survives weighted sums); re-verified numerically.
  if (!all_p_zero && !out.P.is_zero() && !out.reciprocal_dilatation) {
    for (Cplx z : probes) {
      try {
        const Cplx nu_out = dilatation(out, z, opts.tol);
        const Cplx nu_in = all_recip ? dilatation_reciprocal(parts[0].X, z, opts.tol)
                                     : dilatation(parts[0].X, z, opts.tol);
        if (std::abs(nu_out - nu_in) >= opts.tol.tau_nu)
          throw DilatationMismatch(z, nu_in, nu_out);
      } catch (const DegeneratePlanarPart&) {
        continue;
      }
    }
  }
  return out;
}

inline EnneperImmersion superpose(std::initializer_list<SuperposePart> parts,
                                  const SuperposeOptions& opts = SuperposeOptions{}) {
  return superpose(std::span<const SuperposePart>(parts.begin(), parts.size()), opts);
}

/// Escape hatch: the same weighted sum WITHOUT the common-dilatation
/// verification. The result is marked unverified_sum; sums of immersions with
/// distinct dilatations can still be immersions but no certificate is given.
inline EnneperImmersion unchecked_sum(std::span<const SuperposePart> parts) {
  if (parts.empty()) throw DomainError("unchecked_sum: no parts");
  EnneperImmersion out = detail::combine(parts, detail::common_domain(parts));
  out.unverified_sum = true;
  return out;
}

inline EnneperImmersion unchecked_sum(std::initializer_list<SuperposePart> parts) {
  return unchecked_sum(std::span<const SuperposePart>(parts.begin(), parts.size()));
}

/// Reflections of R^3 that act cleanly on Enneper data.
enum class SignMatrix {
  A,   // diag(-1, 1, 1): f -> -conj(f), so (L, P) -> (-P, -L)
  B,   // diag( 1,-1, 1): f ->  conj(f), so (L, P) -> ( P,  L)
  XY,  // diag(-1,-1, 1): f -> -f,       so (L, P) -> (-L, -P)
};

inline EnneperImmersion reflect(const EnneperImmersion& X, SignMatrix m) {
  EnneperImmersion out = X;
  switch (m) {
    case SignMatrix::A:
      out.L = -X.P;
      out.P = -X.L;
      break;
    case SignMatrix::B:
      out.L = X.P;
      out.P = X.L;
      break;
    case SignMatrix::XY:
      out.L = -X.L;
      out.P = -X.P;
      break;
  }
  out.reciprocal_dilatation = out.L.is_zero() && !out.P.is_zero();
  return out;
}

inline Vec3 apply_sign(SignMatrix m, const Vec3& v) {
  switch (m) {
    case SignMatrix::A:
      return {-v[0], v[1], v[2]};
    case SignMatrix::B:
      return {v[0], -v[1], v[2]};
    case SignMatrix::XY:
      return {-v[0], -v[1], v[2]};
  }
  return v;
}

}  // namespace harmsurf
