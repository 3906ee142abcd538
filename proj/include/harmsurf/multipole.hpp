#pragma once

#include <cmath>
#include <vector>

#include "harmsurf/common.hpp"
#include "harmsurf/errors.hpp"
#include "harmsurf/motifs.hpp"

namespace harmsurf {

/// Truncated 2D multipole expansion of a helicoidal charge distribution:
/// h(z) ~ Im( p ln(z - center) + sum_{k=1..K} c_k / (z - center)^k ),
/// valid outside the disk |z - center| > r_min containing all charges.
struct MultipoleExpansion {
  double p = 0.0;                 // total helicoidal charge
  std::vector<Cplx> c;            // c_1..c_K
  Cplx center{0.0, 0.0};
  double r_min = 0.0;

  int order() const { return static_cast<int>(c.size()); }
};

/// Multipole coefficients of a motif configuration about `center`:
/// p = sum_j p_j, c_k = -(1/k) sum_j p_j (z_j - center)^k.
inline MultipoleExpansion multipole_coeffs(const MotifConfiguration& cfg, int K,
                                           Cplx center = Cplx(0.0, 0.0)) {
  if (K < 0) throw OutOfRange("multipole_coeffs: K must be >= 0");
  MultipoleExpansion e;
  e.center = center;
  e.r_min = cfg.radius_about(center);
  e.c.assign(static_cast<size_t>(K), Cplx(0.0, 0.0));
  for (const auto& m : cfg.motifs) {
    e.p += m.pitch;
    const Cplx w = m.center - center;
    Cplx wk(1.0, 0.0);
    for (int k = 1; k <= K; ++k) {
      wk *= w;
      e.c[static_cast<size_t>(k - 1)] -= m.pitch / static_cast<double>(k) * wk;
    }
  }
  return e;
}

/// Truncated far-field evaluation. Requires |z - center| > rho * r_min
/// (default margin rho = 1.05); throws InsideConvergenceRadius otherwise.
inline double multipole_eval(const MultipoleExpansion& e, Cplx z, double rho = 1.05) {
  if (!is_finite(z)) throw DomainError("multipole_eval: non-finite point");
  const Cplx w = z - e.center;
  const double r = std::abs(w);
  if (!(r > rho * e.r_min) || r == 0.0)
    throw InsideConvergenceRadius("multipole_eval: point inside the convergence disk");
  Cplx acc = e.p * std::log(w);
  const Cplx inv = 1.0 / w;
  Cplx invk(1.0, 0.0);
  for (const auto& ck : e.c) {
    invk *= inv;
    acc += ck * invk;
  }
  return acc.imag();
}

/// Rigorous termwise tail bound on |h_exact - h_K| at radius r > r_min:
/// sum_j |p_j| (r_j/r)^{K+1} / ((K+1)(1 - r_j/r)), from |c_k| <=
/// sum_j |p_j| r_j^k / k and the geometric tail.
inline double truncation_error_estimate(const MultipoleExpansion& e,
                                        const MotifConfiguration& cfg, double r) {
  if (!(r > e.r_min))
    throw InsideConvergenceRadius("truncation_error_estimate: need r > r_min");
  const int K = e.order();
  double bound = 0.0;
  for (const auto& m : cfg.motifs) {
    const double rj = std::abs(m.center - e.center);
    const double q = rj / r;
    if (q == 0.0) continue;
    bound += std::abs(m.pitch) * std::pow(q, K + 1) / ((K + 1) * (1.0 - q));
  }
  return bound;
}

/// Exact far field of the configuration in the gauge of the expansion:
/// Im( p Log(z-c) + sum_j p_j Log((z-z_j)/(z-c)) ). The per-motif ratio keeps
/// every logarithm continuous for |z-c| > r_min, so exact-vs-truncated
/// comparison needs no branch bookkeeping.
inline double motif_field_far_gauge(const MotifConfiguration& cfg, Cplx z,
                                    Cplx center = Cplx(0.0, 0.0)) {
  const Cplx w = z - center;
  double acc = cfg.total_pitch() * std::arg(w);
  for (const auto& m : cfg.motifs) acc += m.pitch * std::arg((z - m.center) / w);
  return acc;
}

/// Measured truncation error in the matched branch gauge.
inline double expansion_error(const MultipoleExpansion& e, const MotifConfiguration& cfg, Cplx z,
                              double rho = 1.05) {
  return std::abs(motif_field_far_gauge(cfg, z, e.center) - multipole_eval(e, z, rho));
}

}  // namespace harmsurf
