#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <random>
#include <thread>

#include "harmsurf/analytic.hpp"
#include "oracles.hpp"

using namespace harmsurf;

TEST_CASE("eval basics") {
  CHECK(exp(AnalyticFn::z())(Cplx(0, 0)) == Cplx(1.0, 0.0));

  const Cplx logi = log(AnalyticFn::z())(Cplx(0, 1));
  CHECK(std::abs(logi - Cplx(0.0, kPi / 2)) < 1e-15);

  // sin(pi z) against an independent series oracle
  const AnalyticFn f = sin(AnalyticFn::affine(kPi, 0.0));
  const Cplx z(0.3, 0.4);
  CHECK(std::abs(f(z) - oracles::sin_series(kPi * z)) < 1e-13);
}

TEST_CASE("eval guards") {
  const AnalyticFn inv = pow(AnalyticFn::z(), -1);
  CHECK_THROWS_AS(inv(Cplx(0, 0)), SingularPoint);
  CHECK_THROWS_AS(inv(Cplx(1e-12, 0)), SingularPoint);
  CHECK(std::abs(inv(Cplx(2, 0)) - Cplx(0.5, 0)) < 1e-15);

  const AnalyticFn lg = log(AnalyticFn::z());
  CHECK_THROWS_AS(lg(Cplx(0, 0)), SingularPoint);
  CHECK_THROWS_AS(lg(Cplx(-1.0, 0.0)), DomainError);  // on the cut
  CHECK_NOTHROW(lg(Cplx(-1.0, 1e-3)));

  CHECK_THROWS_AS(lg(Cplx(std::numeric_limits<double>::quiet_NaN(), 0)), DomainError);
}

TEST_CASE("derivative closed forms") {
  const AnalyticFn z = AnalyticFn::z();

  // d/dz z^2 = 2z
  const AnalyticFn dz2 = pow(z, 2).derivative();
  for (Cplx p : {Cplx(0.3, 0.7), Cplx(-1.2, 0.1)}) CHECK(std::abs(dz2(p) - 2.0 * p) < 1e-14);

  // d/dz log = z^{-1}
  const AnalyticFn dlog = log(z).derivative();
  for (Cplx p : {Cplx(0.4, 0.2), Cplx(2.0, -1.0)}) CHECK(std::abs(dlog(p) - 1.0 / p) < 1e-14);
}

TEST_CASE("derivative consistency: random compositions vs central differences") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uni(-0.8, 0.8);
  const AnalyticFn z = AnalyticFn::z();

  std::vector<AnalyticFn> pool = {
      z, pow(z, 2), pow(z, 3), exp(z), sin(z), cos(z), sinh(z), cosh(z),
      exp(sin(z)), sin(AnalyticFn::affine(Cplx(0.7, 0.2), 0.1)),
      log(AnalyticFn::affine(1.0, Cplx(3.0, 0.0))),
      sn(AnalyticFn::affine(0.5, 0.0), 0.6), cn(AnalyticFn::affine(0.5, 0.0), 0.6),
      dn(AnalyticFn::affine(0.5, 0.0), 0.6), pow(AnalyticFn::affine(1.0, Cplx(3.0, 0.0)), -1)};

  for (int trial = 0; trial < 100; ++trial) {
    const AnalyticFn& a = pool[rng() % pool.size()];
    const AnalyticFn& b = pool[rng() % pool.size()];
    AnalyticFn f;
    switch (rng() % 3) {
      case 0: f = a + Cplx(uni(rng), uni(rng)) * b; break;
      case 1: f = a * b; break;
      default: f = Cplx(uni(rng), uni(rng)) * a + Cplx(1.0, 0.0) * b; break;
    }
    const AnalyticFn df = f.derivative();
    int checked = 0;
    for (int i = 0; i < 50 && checked < 50; ++i) {
      const Cplx p(uni(rng), uni(rng));
      try {
        const Cplx exact = df(p);
        const Cplx approx = oracles::deriv_fd([&](Cplx w) { return f(w); }, p, 1e-4);
        const double scale = std::max(1.0, std::abs(exact));
        CHECK(std::abs(exact - approx) <= 1e-6 * scale);
        ++checked;
      } catch (const Error&) {
        continue;  // point too close to a pole of the composition
      }
    }
    CHECK(checked > 10);
  }
}

TEST_CASE("central-difference order for exp(sin z)") {
  const AnalyticFn f = exp(sin(AnalyticFn::z()));
  const AnalyticFn df = f.derivative();
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int i = 0; i < 5; ++i) {
    const Cplx z(uni(rng), uni(rng));
    const Cplx exact = df(z);
    const double e1 = std::abs(exact - oracles::deriv_fd([&](Cplx w) { return f(w); }, z, 1e-3));
    const double e2 = std::abs(exact - oracles::deriv_fd([&](Cplx w) { return f(w); }, z, 5e-4));
    // O(delta^2): halving delta divides the error by about 4.
    CHECK(e2 / e1 < 0.4);
    CHECK(e2 / e1 > 0.1);
  }
}

TEST_CASE("Re and Im parts are harmonic (5-point stencil, Richardson)") {
  const AnalyticFn z = AnalyticFn::z();
  const std::vector<AnalyticFn> fns = {exp(z), sin(AnalyticFn::affine(Cplx(1.1, 0.3), 0.0)),
                                       exp(sin(z)), pow(AnalyticFn::affine(1.0, Cplx(2.0, 1.0)), -1)};
  for (const auto& f : fns) {
    const auto stencil = [&](Cplx p, double d, auto part) {
      return std::abs(part(f(p + d)) + part(f(p - d)) + part(f(p + Cplx(0, d))) +
                      part(f(p - Cplx(0, d))) - 4.0 * part(f(p))) /
             (d * d);
    };
    for (Cplx p : {Cplx(0.31, 0.17), Cplx(-0.42, 0.53)}) {
      const auto re = [](Cplx w) { return w.real(); };
      const double r1 = stencil(p, 2e-2, re);
      const double r2 = stencil(p, 1e-2, re);
      const double r3 = stencil(p, 5e-3, re);
      if (r1 > 1e-9) {
        CHECK(r2 / r1 > 0.15);
        CHECK(r2 / r1 < 0.4);
        CHECK(r3 / r2 > 0.15);
        CHECK(r3 / r2 < 0.4);
      }
      const auto im = [](Cplx w) { return w.imag(); };
      const double s1 = stencil(p, 2e-2, im);
      const double s2 = stencil(p, 1e-2, im);
      if (s1 > 1e-9) {
        CHECK(s2 / s1 > 0.15);
        CHECK(s2 / s1 < 0.4);
      }
    }
  }
}

TEST_CASE("singular set bookkeeping") {
  // Pole of z^{-2} at the affine root.
  const AnalyticFn f = pow(AnalyticFn::affine(2.0, Cplx(-1.0, 0.0)), -2);
  const auto s = f.singularities();
  REQUIRE(s.points.size() == 1);
  CHECK(std::abs(s.points[0].pos - Cplx(0.5, 0.0)) < 1e-15);
  CHECK(s.points[0].kind == SingKind::Pole);
  CHECK(s.points[0].order == 2);
  CHECK(s.exhaustive);

  // log cut points along the ray where alpha z + beta < 0.
  const AnalyticFn lg = log(AnalyticFn::affine(1.0, Cplx(-1.0, 0.0)));
  const auto sl = lg.singularities();
  REQUIRE(sl.cuts.size() == 1);
  CHECK(sl.cuts[0].distance(Cplx(0.0, 0.0)) < 1e-12);   // on the cut (z-1 = -1)
  CHECK(sl.cuts[0].distance(Cplx(2.0, 0.0)) > 0.9);     // opposite side

  // sin zero lattice
  const auto zs = sin(AnalyticFn::affine(kPi, 0.0)).zero_set();
  REQUIRE(zs.lattices.size() == 1);
  const auto pts = zs.enumerate_in(-2.5, 2.5, -0.5, 0.5);
  CHECK(pts.size() == 5);  // -2,-1,0,1,2

  // non-affine log: flagged non-exhaustive
  CHECK_FALSE(log(exp(AnalyticFn::z()) + Cplx(2.0, 0.0)).singularities().exhaustive);
}

TEST_CASE("primitive nodes: derivative and path independence") {
  const AnalyticFn f = exp(AnalyticFn::z());
  const AnalyticFn F = AnalyticFn::primitive(f, Cplx(0.0, 0.0));
  CHECK(F.derivative().str() == f.str());

  const Cplx z(0.7, 0.9);
  const Cplx direct = F(z);
  const Cplx closed = std::exp(z) - 1.0;
  CHECK(std::abs(direct - closed) < 1e-11);

  // Same value along an L-shaped polyline.
  const std::vector<Cplx> path = {Cplx(0, 0), Cplx(z.real(), 0), z};
  const Cplx via = integrate_polyline([&](Cplx w) { return f(w); }, path, 1e-13);
  CHECK(std::abs(via - closed) < 1e-11);

  // Memoized reevaluation is identical.
  CHECK(F(z) == direct);
}

TEST_CASE("pole on the integration path is rejected") {
  const AnalyticFn f = pow(AnalyticFn::affine(1.0, Cplx(-0.5, 0.0)), -1);
  const AnalyticFn F = AnalyticFn::primitive(f, Cplx(0.0, 0.0));
  CHECK_THROWS_AS(F(Cplx(1.0, 0.0)), PathThroughSingularity);
  CHECK_NOTHROW(F(Cplx(0.0, 1.0)));
}

TEST_CASE("evaluation is re-entrant across threads") {
  // Immutable trees plus the primitive memo cache behind a shared mutex:
  // parallel grid evaluation must reproduce the serial values bit for bit.
  const AnalyticFn f = exp(AnalyticFn::z()) * sn(AnalyticFn::affine(0.4, 0.0), 0.6);
  const AnalyticFn F = AnalyticFn::primitive(exp(AnalyticFn::z()), Cplx(0.0, 0.0));
  std::vector<Cplx> pts;
  for (int i = 0; i < 400; ++i)
    pts.emplace_back(-1.0 + 2.0 * (i % 20) / 19.0, -1.0 + 2.0 * (i / 20) / 19.0);

  std::vector<Cplx> serial_f(pts.size()), serial_F(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) {
    serial_f[i] = f(pts[i]);
    serial_F[i] = F(pts[i]);
  }

  std::vector<Cplx> par_f(pts.size()), par_F(pts.size());
  std::vector<std::thread> workers;
  std::atomic<size_t> next{0};
  for (int t = 0; t < 8; ++t)
    workers.emplace_back([&] {
      for (size_t i = next.fetch_add(1); i < pts.size(); i = next.fetch_add(1)) {
        par_f[i] = f(pts[i]);
        par_F[i] = F(pts[i]);
      }
    });
  for (auto& w : workers) w.join();

  for (size_t i = 0; i < pts.size(); ++i) {
    CHECK(par_f[i] == serial_f[i]);
    CHECK(par_F[i] == serial_F[i]);
  }
}
