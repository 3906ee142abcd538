#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "harmsurf/analytic.hpp"
#include "harmsurf/common.hpp"
#include "harmsurf/errors.hpp"

namespace harmsurf {

struct Puncture {
  Cplx pos;
  double radius = 0.0;
};

/// Annular membership constraint r_in <= |z - center| <= r_out, carried along
/// through intersections so mixed-kind intersections stay exact.
struct Shell {
  Cplx center;
  double r_in = 0.0;
  double r_out = 0.0;
};

/// Connected open evaluation region: a parameter rectangle or annulus, plus
/// punctures (excluded disks around singular points) and branch-cut rays.
struct Domain {
  enum class Kind { Rectangle, Annulus };

  Kind kind = Kind::Rectangle;
  double x0 = -1.0, x1 = 1.0, y0 = -1.0, y1 = 1.0;  // bounding box
  std::vector<Shell> shells;
  std::vector<Puncture> punctures;
  std::vector<CutRay> cuts;

  static Domain rectangle(double x0, double x1, double y0, double y1) {
    if (!(x0 < x1) || !(y0 < y1)) throw DomainError("Domain::rectangle: empty ranges");
    Domain d;
    d.kind = Kind::Rectangle;
    d.x0 = x0; d.x1 = x1; d.y0 = y0; d.y1 = y1;
    return d;
  }

  static Domain annulus(Cplx center, double r_in, double r_out) {
    if (!(r_in >= 0.0) || !(r_out > r_in)) throw DomainError("Domain::annulus: need 0 <= r_in < r_out");
    Domain d;
    d.kind = Kind::Annulus;
    d.x0 = center.real() - r_out; d.x1 = center.real() + r_out;
    d.y0 = center.imag() - r_out; d.y1 = center.imag() + r_out;
    d.shells.push_back({center, r_in, r_out});
    return d;
  }

  void add_puncture(Cplx pos, double radius) {
    if (pos.real() < x0 || pos.real() > x1 || pos.imag() < y0 || pos.imag() > y1)
      return;  // outside the box: irrelevant
    punctures.push_back({pos, radius});
  }

  void add_cut(CutRay c) { cuts.push_back(c); }

  bool in_box(Cplx z) const {
    return z.real() >= x0 && z.real() <= x1 && z.imag() >= y0 && z.imag() <= y1;
  }

  bool contains(Cplx z) const {
    if (!is_finite(z) || !in_box(z)) return false;
    for (const auto& s : shells) {
      // Slight slack so boundary samples survive polar round-trip rounding.
      const double r = std::abs(z - s.center);
      const double tol = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + s.r_out);
      if (r < s.r_in - tol || r > s.r_out + tol) return false;
    }
    for (const auto& p : punctures)
      if (std::abs(z - p.pos) <= p.radius) return false;
    return true;
  }

  /// Distance to the nearest puncture disk boundary (negative inside a disk).
  double puncture_clearance(Cplx z) const {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& p : punctures) d = std::min(d, std::abs(z - p.pos) - p.radius);
    return d;
  }

  double cut_clearance(Cplx z) const {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& c : cuts) d = std::min(d, c.distance(z));
    return d;
  }

  Cplx center() const { return Cplx(0.5 * (x0 + x1), 0.5 * (y0 + y1)); }
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
};

inline Domain intersect(const Domain& a, const Domain& b) {
  Domain d;
  d.x0 = std::max(a.x0, b.x0);
  d.x1 = std::min(a.x1, b.x1);
  d.y0 = std::max(a.y0, b.y0);
  d.y1 = std::min(a.y1, b.y1);
  if (!(d.x0 < d.x1) || !(d.y0 < d.y1))
    throw EmptyDomainIntersection("domains have no common rectangle");
  d.kind = Domain::Kind::Rectangle;
  d.shells = a.shells;
  d.shells.insert(d.shells.end(), b.shells.begin(), b.shells.end());
  d.punctures = a.punctures;
  d.punctures.insert(d.punctures.end(), b.punctures.begin(), b.punctures.end());
  d.cuts = a.cuts;
  d.cuts.insert(d.cuts.end(), b.cuts.begin(), b.cuts.end());
  return d;
}

struct ProbeSpec {
  int nx = 17;
  int ny = 17;
  int n_random = 50;
  unsigned seed = 0;
  double margin = 1e-6;  // extra clearance demanded beyond puncture radii
};

/// Deterministic probe set: a uniform grid slightly inset from the bounding
/// box plus fixed-seed pseudo-random points, all filtered to safe domain
/// membership. The seed travels with the probe parameters, so reports built
/// from them are reproducible.
inline std::vector<Cplx> probe_points(const Domain& d, const ProbeSpec& spec = ProbeSpec{}) {
  std::vector<Cplx> pts;
  const double inset_x = 0.01 * d.width();
  const double inset_y = 0.01 * d.height();
  const double gx0 = d.x0 + inset_x, gx1 = d.x1 - inset_x;
  const double gy0 = d.y0 + inset_y, gy1 = d.y1 - inset_y;
  const auto safe = [&](Cplx z) {
    return d.contains(z) && d.puncture_clearance(z) > spec.margin;
  };
  for (int j = 0; j < spec.ny; ++j)
    for (int i = 0; i < spec.nx; ++i) {
      const double fx = spec.nx == 1 ? 0.5 : static_cast<double>(i) / (spec.nx - 1);
      const double fy = spec.ny == 1 ? 0.5 : static_cast<double>(j) / (spec.ny - 1);
      const Cplx z(gx0 + fx * (gx1 - gx0), gy0 + fy * (gy1 - gy0));
      if (safe(z)) pts.push_back(z);
    }
  std::mt19937 rng(spec.seed);
  std::uniform_real_distribution<double> ux(gx0, gx1), uy(gy0, gy1);
  int found = 0, tries = 0;
  while (found < spec.n_random && tries < 200 * std::max(1, spec.n_random)) {
    const Cplx z(ux(rng), uy(rng));
    ++tries;
    if (safe(z)) {
      pts.push_back(z);
      ++found;
    }
  }
  return pts;
}

}  // namespace harmsurf
