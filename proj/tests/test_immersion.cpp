#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "harmsurf/immersion.hpp"
#include "harmsurf/motifs.hpp"
#include "harmsurf/verify.hpp"
#include "oracles.hpp"

using namespace harmsurf;

namespace {

EnneperImmersion make_Y1() {
  const AnalyticFn z = AnalyticFn::z();
  return enneper_from_re(exp(z), z * exp(z), Cplx(0, 1) * z, Domain::rectangle(-2, 2, -2, 2));
}

EnneperImmersion make_Y2() {
  const AnalyticFn z = AnalyticFn::z();
  return enneper_from_re(sinh(z), Cplx(0, 1) * cosh(z), Cplx(0, 1) * z,
                         Domain::rectangle(0.1, 2.0, -2.0, 2.0));
}

}  // namespace

TEST_CASE("hopf differential of a helicoid graph: -a^2 / (4 (z-z0)^2)") {
  const double a = 1.3;
  const Cplx z0(0.2, -0.1);
  const EnneperImmersion H = helicoid(a, z0);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  int n = 0;
  while (n < 40) {
    const Cplx z(z0.real() + uni(rng), z0.imag() + uni(rng));
    if (std::abs(z - z0) < 0.2) continue;
    const Cplx expected = -a * a / (4.0 * (z - z0) * (z - z0));
    CHECK(std::abs(hopf_differential(H, z) - expected) < 1e-12 * std::max(1.0, std::abs(expected)));

    // Independent route: numeric Wirtinger of all three coordinates, sum of squares.
    Cplx sum(0.0, 0.0);
    for (int j = 0; j < 3; ++j) {
      const Cplx phi = oracles::wirtinger_fd(
          [&](Cplx w) { return H.point(w)[static_cast<size_t>(j)]; }, z, 1e-5);
      sum += phi * phi;
    }
    CHECK(std::abs(sum - expected) < 1e-5 * std::max(1.0, std::abs(expected)));
    ++n;
  }
}

TEST_CASE("hopf classification of the two half-helicoid parametrisations") {
  const EnneperImmersion Y2 = make_Y2();
  const auto pts2 = probe_points(Y2.domain, ProbeSpec{10, 10, 0, 0});
  REQUIRE(pts2.size() >= 100);
  for (Cplx z : pts2) CHECK(std::abs(hopf_differential(Y2, z)) < 1e-10);

  const EnneperImmersion Y1 = make_Y1();
  double biggest = 0.0;
  for (Cplx z : probe_points(Y1.domain, ProbeSpec{10, 10, 0, 0}))
    biggest = std::max(biggest, std::abs(hopf_differential(Y1, z)));
  CHECK(biggest > 1e-3);
}

TEST_CASE("dilatation closed forms") {
  // Graph: P == 0 -> nu == 0.
  const EnneperImmersion H = helicoid(1.0, Cplx(0, 0));
  CHECK(dilatation(H, Cplx(0.4, 0.7)) == Cplx(0.0, 0.0));

  // Linear: L = z, P = c z -> nu == c.
  EnneperImmersion lin;
  lin.L = AnalyticFn::z();
  lin.P = Cplx(0.3, 0.2) * AnalyticFn::z();
  lin.domain = Domain::rectangle(-1, 1, -1, 1);
  CHECK(std::abs(dilatation(lin, Cplx(0.1, -0.6)) - Cplx(0.3, 0.2)) < 1e-15);

  // Anti-holomorphic planar part: degenerate, reciprocal convention applies.
  EnneperImmersion anti;
  anti.L = AnalyticFn::constant(0.0);
  anti.P = AnalyticFn::z();
  anti.reciprocal_dilatation = true;
  anti.domain = Domain::rectangle(-1, 1, -1, 1);
  CHECK_THROWS_AS(dilatation(anti, Cplx(0.2, 0.2)), DegeneratePlanarPart);
  CHECK(dilatation_reciprocal(anti, Cplx(0.2, 0.2)) == Cplx(0.0, 0.0));
}

TEST_CASE("immersion predicate") {
  const EnneperImmersion H = helicoid(2.0, Cplx(0, 0));
  for (Cplx z : {Cplx(1, 1), Cplx(-0.3, 0.8)}) CHECK(is_immersion_at(H, z));

  EnneperImmersion degenerate;
  degenerate.L = AnalyticFn::z();
  degenerate.P = AnalyticFn::z();
  degenerate.domain = Domain::rectangle(-1, 1, -1, 1);
  for (Cplx z : {Cplx(0.2, 0.1), Cplx(-0.5, 0.9)}) CHECK_FALSE(is_immersion_at(degenerate, z));

  // Y1 parametrizes an immersed surface; the |L'| != |P'| certificate holds
  // off the line Im z = 0 where the two moduli coincide, so the grid dodges it.
  const EnneperImmersion Y1 = make_Y1();
  std::vector<Cplx> grid;
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j)
      grid.emplace_back(-2.0 + 4.0 * i / 15.0, -2.0 + 4.0 * j / 15.0);
  const auto mask = immersion_map(Y1, grid);
  for (bool ok : mask) CHECK(ok);
}

TEST_CASE("harmonic graph predicate") {
  const auto probes = probe_points(Domain::rectangle(-1, 1, -1, 1), ProbeSpec{9, 9, 10, 0});

  EnneperImmersion graph = helicoid(1.0, Cplx(0, 0), Domain::rectangle(-1, 1, -1, 1));
  CHECK(is_harmonic_graph(graph, probes));

  EnneperImmersion bad;
  bad.L = AnalyticFn::z();
  bad.P = Cplx(2.0, 0.0) * AnalyticFn::z();
  bad.domain = Domain::rectangle(-1, 1, -1, 1);
  CHECK_FALSE(is_harmonic_graph(bad, probes));

  // L = z, P = z^2/4 on the unit box: |nu| = |z|/2 < 1.
  EnneperImmersion disk;
  disk.L = AnalyticFn::z();
  disk.P = Cplx(0.25, 0.0) * pow(AnalyticFn::z(), 2);
  disk.domain = Domain::rectangle(-0.99, 0.99, -0.99, 0.99);
  CHECK(is_harmonic_graph(disk, probe_points(disk.domain, ProbeSpec{9, 9, 10, 0})));
}

TEST_CASE("superpose: identity, helicoid pair, mismatch") {
  const EnneperImmersion H1 = helicoid(1.0, Cplx(0.5, 0.0));
  const EnneperImmersion H2 = helicoid(-2.0, Cplx(-0.5, 0.0));

  SECTION("single part with unit weights is the identity") {
    const EnneperImmersion S = superpose({SuperposePart{H1, 1.0, 1.0}});
    for (Cplx z : probe_points(S.domain, ProbeSpec{7, 7, 5, 0})) {
      CHECK(std::abs(S.planar(z) - H1.planar(z)) < 1e-14);
      CHECK(std::abs(S.height(z) - H1.height(z)) < 1e-14);
    }
  }

  SECTION("two helicoid graphs reproduce the two-motif field") {
    const EnneperImmersion S =
        superpose({SuperposePart{H1, 0.25, 1.0}, SuperposePart{H2, 0.75, 1.0}});
    const auto cfg = MotifConfiguration::make({{1.0, Cplx(0.5, 0)}, {-2.0, Cplx(-0.5, 0)}});
    const EnneperImmersion M = motif_field(cfg);
    for (Cplx z : probe_points(S.domain, ProbeSpec{9, 9, 20, 1})) {
      CHECK(std::abs(S.planar(z) - z) < 1e-13 * std::max(1.0, std::abs(z)));
      CHECK(std::abs(S.height(z) - M.height(z)) < 1e-12);
    }
  }

  SECTION("dilatation mismatch is rejected") {
    EnneperImmersion skew;
    skew.L = AnalyticFn::z();
    skew.P = Cplx(0.5, 0.0) * AnalyticFn::z();
    skew.domain = Domain::rectangle(-3, 3, -3, 3);
    CHECK_THROWS_AS(superpose({SuperposePart{H1, 1.0, 1.0}, SuperposePart{skew, 1.0, 1.0}}),
                    DilatationMismatch);
  }

  SECTION("zero planar sum is rejected") {
    CHECK_THROWS_AS(superpose({SuperposePart{H1, 1.0, 1.0}, SuperposePart{H1, -1.0, 1.0}}),
                    ZeroPlanarSum);
  }

  SECTION("disjoint domains are rejected") {
    const EnneperImmersion far = helicoid(1.0, Cplx(100.0, 0.0));
    CHECK_THROWS_AS(superpose({SuperposePart{H1, 1.0, 1.0}, SuperposePart{far, 1.0, 1.0}}),
                    EmptyDomainIntersection);
  }
}

TEST_CASE("superposition output properties") {
  // Common dilatation nu = z/2: L = z -> P = z^2/4; L = z^2 + 4 z -> P' =
  // (z/2)(2z + 4) = z^2 + 2 z -> P = z^3/3 + z^2.
  EnneperImmersion A;
  A.L = AnalyticFn::z();
  A.P = Cplx(0.25, 0.0) * pow(AnalyticFn::z(), 2);
  A.domain = Domain::rectangle(-0.9, 0.9, -0.9, 0.9);
  A.h.add_re(1.0, pow(AnalyticFn::z(), 2));

  EnneperImmersion B;
  B.L = pow(AnalyticFn::z(), 2) + Cplx(4.0, 0.0) * AnalyticFn::z();
  B.P = Cplx(1.0 / 3.0, 0.0) * pow(AnalyticFn::z(), 3) + pow(AnalyticFn::z(), 2);
  B.domain = Domain::rectangle(-0.9, 0.9, -0.9, 0.9);
  B.h.add_im(0.7, exp(AnalyticFn::z()));

  const EnneperImmersion S = superpose({SuperposePart{A, 1.2, 0.5}, SuperposePart{B, 0.4, 2.0}});
  const auto probes = probe_points(S.domain, ProbeSpec{9, 9, 20, 3});

  SECTION("dilatation invariance") {
    for (Cplx z : probes)
      CHECK(std::abs(dilatation(S, z) - 0.5 * z) < 1e-9);
  }

  SECTION("harmonicity of all three coordinates, order-2 decay") {
    const auto coord = [&](int j) {
      return std::function<double(Cplx)>(
          [&S, j](Cplx z) { return S.point(z)[static_cast<size_t>(j)]; });
    };
    std::vector<Cplx> inner;
    for (Cplx z : probes)
      if (std::abs(z.real()) < 0.6 && std::abs(z.imag()) < 0.6) inner.push_back(z);
    REQUIRE(inner.size() >= 5);
    for (int j = 0; j < 3; ++j) {
      const auto r = richardson_laplacian(coord(j), inner, 0.02);
      if (!r.stencil_exact) {
        CHECK(r.ratios[0] > 0.15);
        CHECK(r.ratios[0] < 0.4);
      }
    }
  }

  SECTION("vector-space closure: nested binary sums equal the flat sum") {
    EnneperImmersion C;
    C.L = Cplx(2.0, 0.0) * AnalyticFn::z();
    C.P = Cplx(0.5, 0.0) * pow(AnalyticFn::z(), 2);
    C.domain = Domain::rectangle(-0.9, 0.9, -0.9, 0.9);
    C.h.add_motif({0.4, Cplx(2.0, 2.0)});  // singular point outside the box

    // b_i = a_i throughout (the vector-space case).
    const EnneperImmersion AB =
        superpose({SuperposePart{A, 1.0, 1.0}, SuperposePart{B, 0.5, 0.5}});
    const EnneperImmersion nested =
        superpose({SuperposePart{AB, 1.0, 1.0}, SuperposePart{C, 0.7, 0.7}});
    const EnneperImmersion flat = superpose({SuperposePart{A, 1.0, 1.0},
                                             SuperposePart{B, 0.5, 0.5},
                                             SuperposePart{C, 0.7, 0.7}});
    for (Cplx z : probes) {
      CHECK(std::abs(nested.planar(z) - flat.planar(z)) < 1e-12);
      CHECK(std::abs(nested.height(z) - flat.height(z)) < 1e-12);
    }
  }

  SECTION("hopf identity recomputed from the output's own data") {
    for (Cplx z : probes) {
      Cplx sum(0.0, 0.0);
      for (int j = 0; j < 3; ++j) {
        const Cplx phi = oracles::wirtinger_fd(
            [&](Cplx w) { return S.point(w)[static_cast<size_t>(j)]; }, z, 1e-5);
        sum += phi * phi;
      }
      CHECK(std::abs(hopf_differential(S, z) - sum) < 2e-4 * std::max(1.0, std::abs(sum)));
    }
  }

  SECTION("graph guarantee: shared-nu graphs superpose to a graph") {
    CHECK(is_harmonic_graph(A, probes));
    CHECK(is_harmonic_graph(B, probes));
    CHECK(is_harmonic_graph(S, probes));
  }
}

TEST_CASE("unchecked_sum bypasses the dilatation check and flags itself") {
  EnneperImmersion holo;  // nu = 0
  holo.L = AnalyticFn::z();
  holo.domain = Domain::rectangle(-1, 1, -1, 1);
  EnneperImmersion anti;  // reciprocal form
  anti.L = AnalyticFn::constant(0.0);
  anti.P = Cplx(0.5, 0.0) * pow(AnalyticFn::z(), 2);
  anti.reciprocal_dilatation = true;
  anti.domain = Domain::rectangle(-1, 1, -1, 1);

  CHECK_THROWS_AS(superpose({SuperposePart{holo, 1.0, 1.0}, SuperposePart{anti, 1.0, 1.0}}),
                  DilatationMismatch);
  const EnneperImmersion S =
      unchecked_sum({SuperposePart{holo, 1.0, 1.0}, SuperposePart{anti, 1.0, 1.0}});
  CHECK(S.unverified_sum);
  // f = z + conj(z^2/2): an immersion wherever |1| != |z|.
  CHECK(is_immersion_at(S, Cplx(0.3, 0.2)));
}

TEST_CASE("harmonic scalar: exact Wirtinger derivative") {
  HarmonicScalar h;
  h.add_re(0.7, exp(AnalyticFn::z()));
  h.add_im(-1.2, pow(AnalyticFn::z(), 3));
  h.add_im_log(0.4, sin(AnalyticFn::affine(2.0, 0.1)));
  h.add_motif({1.5, Cplx(3.0, 3.0)});
  h.add_constant(2.0);

  const AnalyticFn hz = h.dz_fn();
  for (Cplx z : {Cplx(0.3, 0.2), Cplx(-0.4, 0.6), Cplx(0.9, -0.5)}) {
    // Structural dz, the holomorphic dz_fn, and a finite-difference Wirtinger
    // must all agree.
    const Cplx exact = h.dz(z);
    CHECK(std::abs(hz(z) - exact) < 1e-13 * std::max(1.0, std::abs(exact)));
    const Cplx fd = oracles::wirtinger_fd([&](Cplx w) { return h.eval(w); }, z, 1e-5);
    CHECK(std::abs(fd - exact) < 1e-6 * std::max(1.0, std::abs(exact)));
  }

  // Anisotropic terms have no holomorphic derivative.
  HarmonicScalar aniso;
  aniso.add_im_log_anisotropic(1.0, sn(AnalyticFn::z(), 0.5), Cplx(1.0, 0.0), Cplx(0.2, 0.0));
  CHECK_FALSE(aniso.is_harmonic());
  CHECK_THROWS_AS(aniso.dz_fn(), DomainError);
  // dz itself is still defined; cross-check against finite differences.
  const Cplx z(0.4, 0.3);
  const Cplx fd = oracles::wirtinger_fd([&](Cplx w) { return aniso.eval(w); }, z, 1e-5);
  CHECK(std::abs(aniso.dz(z) - fd) < 1e-6 * std::max(1.0, std::abs(fd)));
}

TEST_CASE("reflections act on Enneper data as documented") {
  EnneperImmersion X;
  X.L = exp(AnalyticFn::z());
  X.P = Cplx(0.3, 0.1) * pow(AnalyticFn::z(), 2);
  X.h.add_re(1.0, AnalyticFn::z());
  X.domain = Domain::rectangle(-1, 1, -1, 1);

  const Cplx z(0.4, -0.7);
  const Vec3 p = X.point(z);
  CHECK(norm_inf(reflect(X, SignMatrix::A).point(z) - apply_sign(SignMatrix::A, p)) < 1e-14);
  CHECK(norm_inf(reflect(X, SignMatrix::B).point(z) - apply_sign(SignMatrix::B, p)) < 1e-14);
  CHECK(norm_inf(reflect(X, SignMatrix::XY).point(z) - apply_sign(SignMatrix::XY, p)) < 1e-14);
}
