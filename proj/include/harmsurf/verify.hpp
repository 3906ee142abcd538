#pragma once

#include <cmath>
#include <fstream>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "harmsurf/common.hpp"
#include "harmsurf/domain.hpp"
#include "harmsurf/errors.hpp"
#include "harmsurf/harmonic.hpp"

namespace harmsurf {

struct VerificationReport {
  std::string check;
  std::string spec;  // grid / probe description
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;

  static VerificationReport make(std::string check, std::string spec, double residual,
                                 double tolerance) {
    return {std::move(check), std::move(spec), residual, tolerance, residual <= tolerance};
  }
};

/// Five-point discrete Laplacian residual of a scalar field over the points:
/// max |h(x+d) + h(x-d) + h(y+d) + h(y-d) - 4 h| / d^2. For a harmonic field
/// the value is O(d^2); it converges to |Laplacian h| otherwise. Points whose
/// stencil leaves the safe region are skipped unless `strict`, in which case
/// StencilHitsSingularity is thrown. Returns the max residual; throws if no
/// stencil fit at all.
inline double discrete_laplacian_residual(const std::function<double(Cplx)>& h,
                                          std::span<const Cplx> pts, double delta,
                                          const std::function<bool(Cplx)>& safe = nullptr,
                                          bool strict = false) {
  if (!(delta > 0.0)) throw DomainError("discrete_laplacian_residual: delta must be > 0");
  double worst = -1.0;
  for (Cplx z : pts) {
    const std::array<Cplx, 5> st = {z, z + delta, z - delta, z + Cplx(0.0, delta),
                                    z - Cplx(0.0, delta)};
    bool ok = true;
    if (safe)
      for (const Cplx& p : st)
        if (!safe(p)) {
          ok = false;
          break;
        }
    if (!ok) {
      if (strict) throw StencilHitsSingularity("stencil leaves the safe region");
      continue;
    }
    try {
      const double sum = h(st[1]) + h(st[2]) + h(st[3]) + h(st[4]) - 4.0 * h(st[0]);
      worst = std::max(worst, std::abs(sum) / (delta * delta));
    } catch (const Error&) {
      if (strict) throw StencilHitsSingularity("stencil hit a singular evaluation");
    }
  }
  if (worst < 0.0) throw StencilHitsSingularity("no admissible stencil among the points");
  return worst;
}

/// HarmonicScalar overload: evaluates the stencil on the local harmonic
/// branch around each center (angular terms continued from the center), so
/// principal-branch cuts cannot contaminate the residual.
inline double discrete_laplacian_residual(const HarmonicScalar& h, std::span<const Cplx> pts,
                                          double delta,
                                          const std::function<bool(Cplx)>& safe = nullptr,
                                          bool strict = false) {
  if (!(delta > 0.0)) throw DomainError("discrete_laplacian_residual: delta must be > 0");
  double worst = -1.0;
  for (Cplx z : pts) {
    const std::array<Cplx, 5> st = {z, z + delta, z - delta, z + Cplx(0.0, delta),
                                    z - Cplx(0.0, delta)};
    bool ok = true;
    if (safe)
      for (const Cplx& p : st)
        if (!safe(p)) {
          ok = false;
          break;
        }
    if (!ok) {
      if (strict) throw StencilHitsSingularity("stencil leaves the safe region");
      continue;
    }
    try {
      const auto v = h.stencil_local(z, delta);
      worst = std::max(worst, std::abs(v[1] + v[2] + v[3] + v[4] - 4.0 * v[0]) / (delta * delta));
    } catch (const Error&) {
      if (strict) throw StencilHitsSingularity("stencil hit a singular evaluation");
    }
  }
  if (worst < 0.0) throw StencilHitsSingularity("no admissible stencil among the points");
  return worst;
}

struct RichardsonResult {
  std::array<double, 3> residuals{};  // at delta, delta/2, delta/4
  std::array<double, 2> ratios{};     // successive residual ratios
  bool stencil_exact = false;         // all residuals at rounding level
};

/// Residuals at delta, delta/2, delta/4 plus the Richardson ratios; a genuine
/// harmonic field shows ratios near 1/4 (order-2 convergence) unless the
/// stencil is already exact (polynomial degree <= 3), which is reported
/// separately.
template <typename Field>
RichardsonResult richardson_laplacian(const Field& h, std::span<const Cplx> pts, double delta,
                                      const std::function<bool(Cplx)>& safe = nullptr,
                                      double exact_floor = 1e-9) {
  RichardsonResult r;
  double d = delta;
  for (int i = 0; i < 3; ++i, d *= 0.5)
    r.residuals[static_cast<size_t>(i)] = discrete_laplacian_residual(h, pts, d, safe);
  r.ratios[0] = r.residuals[1] / std::max(r.residuals[0], 1e-300);
  r.ratios[1] = r.residuals[2] / std::max(r.residuals[1], 1e-300);
  r.stencil_exact = r.residuals[0] <= exact_floor && r.residuals[1] <= exact_floor &&
                    r.residuals[2] <= exact_floor;
  return r;
}

struct Loop {
  Cplx center{0.0, 0.0};
  double radius = 1.0;
  int n_steps = 4096;
};

/// Total unwrapped change of h around the loop divided by 2 pi: the enclosed
/// helicoidal charge (sum of enclosed pitches). Throws LoopHitsSingularity
/// when the circle passes within `margin` of a located singular point.
inline double winding_integral(const HarmonicScalar& h, const Loop& loop, double margin = -1.0) {
  if (!(loop.radius > 0.0) || loop.n_steps < 8)
    throw DomainError("winding_integral: bad loop parameters");
  if (margin < 0.0) margin = std::max(1e-9, 4.0 * kPi * loop.radius / loop.n_steps);
  const SingularSet sing = h.singularities();
  const double pad = loop.radius + margin;
  for (const auto& p :
       sing.enumerate_in(loop.center.real() - pad, loop.center.real() + pad,
                         loop.center.imag() - pad, loop.center.imag() + pad)) {
    if (std::abs(std::abs(p.pos - loop.center) - loop.radius) < margin)
      throw LoopHitsSingularity("winding_integral: loop passes a singular point");
  }
  std::vector<Cplx> path;
  path.reserve(static_cast<size_t>(loop.n_steps) + 1);
  for (int i = 0; i <= loop.n_steps; ++i)
    path.push_back(loop.center + std::polar(loop.radius, 2.0 * kPi * i / loop.n_steps));
  const std::vector<double> vals = h.eval_along(path);
  return (vals.back() - vals.front()) / (2.0 * kPi);
}

/// winding_integral plus a step-doubling convergence flag (result must move
/// by < 1e-10 when n_steps doubles).
struct WindingCheck {
  double value = 0.0;
  bool converged = false;
};

inline WindingCheck winding_check(const HarmonicScalar& h, Loop loop) {
  WindingCheck w;
  w.value = winding_integral(h, loop);
  Loop fine = loop;
  fine.n_steps *= 2;
  w.converged = std::abs(winding_integral(h, fine) - w.value) < 1e-10;
  return w;
}

/// min over integers m of |a - b - m * period|; period 0 means plain |a - b|.
inline double gauged_distance(double a, double b, double period) {
  if (period < 0.0) throw DomainError("gauged_distance: period must be >= 0");
  const double d = a - b;
  if (period == 0.0) return std::abs(d);
  return std::abs(std::remainder(d, period));
}

/// Branch-gauged pointwise distance between two harmonic scalars.
inline double gauged_distance(const HarmonicScalar& h1, const HarmonicScalar& h2, Cplx z,
                              double period) {
  return gauged_distance(h1.eval(z), h2.eval(z), period);
}

inline std::string format_reports(std::span<const VerificationReport> reports) {
  std::string out;
  char buf[256];
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof buf, "%-28s %-26s residual %.3e  tol %.3e  %s\n", r.check.c_str(),
                  r.spec.c_str(), r.max_residual, r.tolerance, r.pass ? "PASS" : "FAIL");
    out += buf;
  }
  return out;
}

/// Machine-readable form: check,name,residual,tolerance,pass.
inline void write_reports_csv(const std::string& path,
                              std::span<const VerificationReport> reports) {
  std::string body = "check,name,residual,tolerance,pass\n";
  char buf[128];
  for (const auto& r : reports) {
    body += r.check;
    body += ',';
    body += r.spec;
    std::snprintf(buf, sizeof buf, ",%.15g,%.15g,%d\n", r.max_residual, r.tolerance,
                  r.pass ? 1 : 0);
    body += buf;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("write_reports_csv: cannot open '" + path + "'");
  os << body;
  if (!os) throw IoError("write_reports_csv: write failed for '" + path + "'");
}

inline bool all_pass(std::span<const VerificationReport> reports) {
  for (const auto& r : reports)
    if (!r.pass) return false;
  return true;
}

}  // namespace harmsurf
