#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "harmsurf/domain.hpp"
#include "harmsurf/errors.hpp"
#include "harmsurf/immersion.hpp"

namespace harmsurf {

/// Finite arrangement of helical motifs with its evaluation domain; every
/// motif center is a puncture of the domain.
struct MotifConfiguration {
  std::vector<Motif> motifs;
  Domain domain;

  /// Builds a configuration over an automatic rectangle (bounding the centers
  /// with generous margin) or the given domain. Exclusion radius defaults to
  /// 1e-3 times the minimum pairwise center distance.
  static MotifConfiguration make(std::vector<Motif> motifs, double exclusion = -1.0) {
    if (motifs.empty()) throw DomainError("MotifConfiguration: no motifs");
    double lox = std::numeric_limits<double>::infinity(), hix = -lox;
    double loy = lox, hiy = -lox;
    for (const auto& m : motifs) {
      lox = std::min(lox, m.center.real());
      hix = std::max(hix, m.center.real());
      loy = std::min(loy, m.center.imag());
      hiy = std::max(hiy, m.center.imag());
    }
    const double span = std::max({hix - lox, hiy - loy, 1.0});
    Domain d = Domain::rectangle(lox - 2.0 * span, hix + 2.0 * span,
                                 loy - 2.0 * span, hiy + 2.0 * span);
    return make(std::move(motifs), std::move(d), exclusion);
  }

  static MotifConfiguration make(std::vector<Motif> motifs, Domain domain,
                                 double exclusion = -1.0) {
    if (motifs.empty()) throw DomainError("MotifConfiguration: no motifs");
    double min_sep = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < motifs.size(); ++i) {
      if (!std::isfinite(motifs[i].pitch))
        throw DomainError("MotifConfiguration: non-finite pitch");
      for (size_t j = i + 1; j < motifs.size(); ++j) {
        const double sep = std::abs(motifs[i].center - motifs[j].center);
        if (sep <= 0.0) throw DomainError("MotifConfiguration: motif centers must be pairwise distinct");
        min_sep = std::min(min_sep, sep);
      }
    }
    if (exclusion < 0.0)
      exclusion = motifs.size() > 1 ? 1e-3 * min_sep : 1e-3;
    MotifConfiguration cfg;
    cfg.motifs = std::move(motifs);
    cfg.domain = std::move(domain);
    for (const auto& m : cfg.motifs) cfg.domain.add_puncture(m.center, exclusion);
    return cfg;
  }

  double total_pitch() const {
    double p = 0.0;
    for (const auto& m : motifs) p += m.pitch;
    return p;
  }

  /// max_j |z_j - center|, the validity radius of far-field expansions.
  double radius_about(Cplx center) const {
    double r = 0.0;
    for (const auto& m : motifs) r = std::max(r, std::abs(m.center - center));
    return r;
  }
};

/// Helicoid of pitch a centred at z0: X(z) = (z, a*arg(z - z0)).
inline EnneperImmersion helicoid(double a, Cplx z0, Domain domain) {
  if (a == 0.0 || !std::isfinite(a)) throw ZeroPitch("helicoid: pitch must be nonzero");
  EnneperImmersion X;
  X.L = AnalyticFn::z();
  X.P = AnalyticFn::constant(0.0);
  X.h = HarmonicScalar{};
  X.h.add_motif({a, z0});
  X.domain = std::move(domain);
  X.domain.add_puncture(z0, 1e-3);
  return X;
}

inline EnneperImmersion helicoid(double a, Cplx z0 = Cplx(0.0, 0.0)) {
  return helicoid(a, z0,
                  Domain::rectangle(z0.real() - 5.0, z0.real() + 5.0, z0.imag() - 5.0,
                                    z0.imag() + 5.0));
}

/// Logarithmic membrane profile X(z) = (z, a + b ln|z|), punctured at 0;
/// the outer-region shape of a membrane pulled at a point.
inline EnneperImmersion log_membrane(double a, double b, Domain domain) {
  EnneperImmersion X;
  X.L = AnalyticFn::z();
  X.P = AnalyticFn::constant(0.0);
  X.h = HarmonicScalar{};
  X.h.add_constant(a);
  if (b != 0.0) X.h.add_re(b, log(AnalyticFn::z()));
  X.domain = std::move(domain);
  X.domain.add_puncture(Cplx(0.0, 0.0), 1e-3);
  return X;
}

inline EnneperImmersion log_membrane(double a, double b) {
  return log_membrane(a, b, Domain::rectangle(-5.0, 5.0, -5.0, 5.0));
}

/// Superposed helical motifs: X = (z, sum_k a_k arg(z - z_k)). Equivalent to
/// superposing the individual helicoid graphs with planar weights summing to
/// the identity map and unit height weights.
inline EnneperImmersion motif_field(const MotifConfiguration& cfg) {
  if (cfg.motifs.empty()) throw DomainError("motif_field: empty configuration");
  EnneperImmersion X;
  X.L = AnalyticFn::z();
  X.P = AnalyticFn::constant(0.0);
  X.h = HarmonicScalar{};
  for (const auto& m : cfg.motifs) {
    if (!std::isfinite(m.pitch)) throw DomainError("motif_field: non-finite pitch");
    X.h.add_motif(m);
  }
  X.domain = cfg.domain;
  return X;
}

}  // namespace harmsurf
