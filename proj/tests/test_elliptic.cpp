#include <catch2/catch_amalgamated.hpp>

#include "harmsurf/elliptic.hpp"
#include "oracles.hpp"

using namespace harmsurf;

TEST_CASE("complete elliptic K: endpoints and quadrature oracle") {
  CHECK(std::abs(complete_elliptic_K(0.0) - kPi / 2.0) < 1e-15);
  CHECK_THROWS_AS(complete_elliptic_K(1.0), OutOfRange);
  CHECK_THROWS_AS(complete_elliptic_K(-0.1), OutOfRange);
  CHECK_THROWS_AS(complete_elliptic_K(1.5), OutOfRange);

  for (double k : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
    const double agm = complete_elliptic_K(k);
    const double quad = oracles::elliptic_K_quadrature(k);
    CHECK(std::abs(agm - quad) <= 1e-12 * quad);
  }
}

TEST_CASE("K is strictly increasing in k") {
  double prev = complete_elliptic_K(0.0);
  for (double k = 0.05; k < 1.0; k += 0.05) {
    const double cur = complete_elliptic_K(k);
    CHECK(cur > prev);
    prev = cur;
  }
}

TEST_CASE("EllipticModulus invariants") {
  const EllipticModulus em(0.7);
  CHECK(em.K > 0.0);
  CHECK(em.Kprime > 0.0);
  CHECK(std::isfinite(em.K));
  CHECK(std::isfinite(em.Kprime));
  CHECK_THROWS_AS(EllipticModulus(0.0), OutOfRange);
  CHECK_THROWS_AS(EllipticModulus(1.0), OutOfRange);
}

TEST_CASE("sn degenerate modulus: sn(u, 0) = sin u") {
  CHECK(std::abs(jacobi_sn(Cplx(1.1, 0.0), 0.0) - Cplx(std::sin(1.1), 0.0)) < 1e-15);
  const Cplx u(0.4, 0.8);
  CHECK(std::abs(jacobi_sn(u, 0.0) - std::sin(u)) < 1e-14);
}

TEST_CASE("sn(K, k) = 1") {
  for (double k : {0.3, 0.5, 0.7, 0.9}) {
    const double K = complete_elliptic_K(k);
    CHECK(std::abs(jacobi_sn(Cplx(K, 0.0), k) - Cplx(1.0, 0.0)) < 1e-12);
  }
}

TEST_CASE("sn cross-validated against the theta-function oracle") {
  for (double k : {0.35, 0.6, 0.8}) {
    const EllipticModulus em(k);
    for (double x : {-1.3, -0.4, 0.3, 0.9}) {
      for (double y : {-0.6, -0.2, 0.2, 0.5}) {
        const Cplx u(x, y);
        if (sn_pole_distance(u, em.K, em.Kprime) < 0.15) continue;
        const Cplx mine = jacobi_sn(u, k);
        const Cplx ref = oracles::sn_theta(u, em.K, em.Kprime);
        CHECK(std::abs(mine - ref) < 1e-10);
      }
    }
  }
}

TEST_CASE("sn double periodicity on a grid") {
  const double k = 0.6;
  const EllipticModulus em(k);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      const Cplx u(-1.8 + 0.4 * i, -0.9 + 0.2 * j);
      if (sn_pole_distance(u, em.K, em.Kprime) < 0.1) continue;
      const Cplx base = jacobi_sn(u, k);
      CHECK(std::abs(jacobi_sn(u + Cplx(4.0 * em.K, 0.0), k) - base) < 1e-9);
      CHECK(std::abs(jacobi_sn(u + Cplx(0.0, 2.0 * em.Kprime), k) - base) < 1e-9);
    }
}

TEST_CASE("sn odd symmetry") {
  const double k = 0.45;
  for (Cplx u : {Cplx(0.7, 0.3), Cplx(-0.2, 0.55), Cplx(1.4, -0.8)})
    CHECK(std::abs(jacobi_sn(-u, k) + jacobi_sn(u, k)) < 1e-12);
}

TEST_CASE("sn pole handling") {
  const double k = 0.6;
  const EllipticModulus em(k);
  const Cplx pole(0.0, em.Kprime);
  CHECK_THROWS_AS(jacobi_sn(pole, k), SingularPoint);
  CHECK_THROWS_AS(jacobi_sn(pole + Cplx(1e-10, 0.0), k), SingularPoint);
  CHECK_NOTHROW(jacobi_sn(pole + Cplx(0.3, 0.0), k));
  CHECK_THROWS_AS(jacobi_sn(Cplx(0.5, 0.0), 1.0), OutOfRange);
}

TEST_CASE("addition-split consistency: sn cn dn identities") {
  const double k = 0.55;
  for (Cplx u : {Cplx(0.4, 0.3), Cplx(-0.9, 0.2), Cplx(0.1, -0.7)}) {
    const auto t = jacobi_complex(u, k);
    CHECK(std::abs(t.sn * t.sn + t.cn * t.cn - Cplx(1.0, 0.0)) < 1e-12);
    CHECK(std::abs(t.dn * t.dn + k * k * t.sn * t.sn - Cplx(1.0, 0.0)) < 1e-12);
  }
}
