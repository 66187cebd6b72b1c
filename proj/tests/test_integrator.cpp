#include <cmath>

#include "doctest.h"
#include "phlab/integrator.hpp"

using namespace phlab;

TEST_CASE("trivial solution stays zero") {
  Trajectory tr = integrate(State{1, 0, 0}, Params{0, 0},
                            PathSpec::polyline({Complex(1, 0), Complex(3, 2),
                                                Complex(-1, 4)}));
  CHECK(tr.poles.empty());
  for (const auto& s : tr.samples) {
    CHECK(std::abs(s.p) < 1e-10);
    CHECK(std::abs(s.q) < 1e-10);
  }
}

TEST_CASE("polynomial solution p = q = -z") {
  State end = continue_to_point(State{1, -1, -1}, Params{1, -1}, Complex(5, 0));
  CHECK(std::abs(end.p + 5.0) < 1e-9);
  CHECK(std::abs(end.q + 5.0) < 1e-9);
}

TEST_CASE("rational solution p = 1/z, q = -1/z") {
  State end = continue_to_point(State{1, 1, -1}, Params{-1, 1}, Complex(2, 0));
  CHECK(std::abs(end.p - 0.5) < 1e-9);
  CHECK(std::abs(end.q + 0.5) < 1e-9);
}

TEST_CASE("Hamiltonian increment equals the action integral") {
  Rng rng(59);
  int done = 0;
  for (int i = 0; i < 60 && done < 10; ++i) {
    Params prm{rng.box(-1, 1), rng.box(-1, 1)};
    State a{rng.box(-2, 2), rng.box(-1, 1), rng.box(-1, 1)};
    Complex target = a.z + rng.box(-1.5, 1.5);
    try {
      PathIntegral pi = integrate_along(a, prm, {Curve::line(a.z, target)},
                                        PathIntegrand::pq);
      Complex H0 = hamiltonian(a, prm);
      Complex H1 = hamiltonian(pi.final_state, prm);
      double scale = std::max(1.0, std::max(std::abs(H0), std::abs(H1)));
      CHECK(std::abs(H1 - H0 - pi.value) < 1e-8 * scale);
      ++done;
    } catch (const LabError&) {
      // leg ran into a pole; draw another one
    }
  }
  CHECK(done == 10);
}

TEST_CASE("path independence and reversal on pole-free legs") {
  Params prm{Complex(0.3, 0.1), Complex(-0.2, 0.4)};
  State a{Complex(0.5, 0.2), Complex(0.4, -0.3), Complex(-0.1, 0.2)};

  State direct = continue_to_point(a, prm, Complex(1.8, 1.1));
  Trajectory two = integrate(a, prm,
                             PathSpec::polyline({a.z, Complex(1.3, -0.2),
                                                 Complex(1.8, 1.1)}));
  CHECK(two.poles.empty());
  const State& viaTwo = two.samples.back();
  CHECK(std::abs(direct.p - viaTwo.p) < 1e-9 * (1 + std::abs(direct.p)));
  CHECK(std::abs(direct.q - viaTwo.q) < 1e-9 * (1 + std::abs(direct.q)));

  State back = continue_to_point(direct, prm, a.z);
  CHECK(std::abs(back.p - a.p) < 1e-9);
  CHECK(std::abs(back.q - a.q) < 1e-9);
}

TEST_CASE("vault across a pole agrees with a detour") {
  // a locally constructed solution with a pole at lambda; the seed sits deep
  // inside the series' reliable radius so it defines the nominal solution
  Params prm{Complex(0.4, -0.2), Complex(-0.3, 0.5)};
  Complex lam(3.0, 0.4);
  LaurentModel m = laurent_expand(prm, ThirdRoot::one(), lam, Complex(0.7, 0.3), 16);

  Complex za = lam - Complex(0.1, 0.0);  // entry side
  Complex zb = lam + Complex(0.1, 0.0);  // far side
  State init{za, m.eval_p(za), m.eval_q(za)};

  // straight crossing: a vault is mandatory
  Trajectory straight = integrate(init, prm, PathSpec::line(za, zb));
  REQUIRE(straight.stats.vaults == 1);
  REQUIRE(straight.poles.size() == 1);
  CHECK(std::abs(straight.poles[0].lambda - lam) < 1e-8);
  CHECK(straight.poles[0].residue == ThirdRoot::one());
  CHECK(std::abs(straight.poles[0].h - Complex(0.7, 0.3)) < 1e-6);

  // detour around the pole disc
  Complex off(0.0, 0.6);
  Trajectory detour =
      integrate(init, prm, PathSpec::polyline({za, za + off, zb + off, zb}));
  CHECK(detour.poles.empty());

  const State& s1 = straight.samples.back();
  const State& s2 = detour.samples.back();
  CHECK(std::abs(s1.p - s2.p) < 1e-6 * (1 + std::abs(s2.p)));
  CHECK(std::abs(s1.q - s2.q) < 1e-6 * (1 + std::abs(s2.q)));

  // involution: crossing back recovers the entry state
  Trajectory ret = integrate(s1, prm, PathSpec::line(zb, za));
  CHECK(ret.stats.vaults == 1);
  CHECK(std::abs(ret.samples.back().p - init.p) < 1e-8 * (1 + std::abs(init.p)));
  CHECK(std::abs(ret.samples.back().q - init.q) < 1e-8 * (1 + std::abs(init.q)));
}

TEST_CASE("public vault evaluates the local model") {
  Params prm{Complex(-0.1, 0.2), Complex(0.3, 0.3)};
  Complex lam(4.0, -1.0);
  Complex h(0.2, -0.5);
  LaurentModel m = laurent_expand(prm, ThirdRoot::omega(), lam, h, 10);
  PoleRecord rec{lam, ThirdRoot::omega(), h, PoleSource::constructed, {}};

  Complex za = lam + Complex(0.04, 0.0), zb = lam - Complex(0.0, 0.05);
  State entry{za, m.eval_p(za), m.eval_q(za)};
  State out = vault(rec, 10, entry, zb, prm);
  CHECK(std::abs(out.p - m.eval_p(zb)) < 1e-12 * (1 + std::abs(out.p)));
  CHECK(std::abs(out.q - m.eval_q(zb)) < 1e-12 * (1 + std::abs(out.q)));

  CHECK_THROWS_AS(vault(rec, 10, entry, lam + Complex(2.0, 0), prm), LabError);
}

TEST_CASE("underflow guard fires on a non-pole blowup") {
  // y' = y^2 blows up at finite z with no simple-pole structure the tracer
  // could vault; the raw stepper must stall and report underflow
  auto rhs2 = [](Complex, const StateVec& y, StateVec& dy) { dy[0] = y[0] * y[0]; };
  StateVec y{Complex(1, 0)};
  double t = 0.0;
  RkControl ctl;
  LegStatus st = integrate_curve_raw(
      rhs2, Curve::line(Complex(0, 0), Complex(3, 0)), 1, y, t, ctl,
      [](double, Complex, const StateVec&) {}, [](Complex, const StateVec&) { return false; });
  CHECK(st == LegStatus::underflow);
  CHECK(t < 1.01);

  // trace_curve surfaces it as StepSizeUnderflow with the full system held
  // just below the pole trigger: not reproducible honestly here, so the guard
  // is exercised at the stepper level only.
}

TEST_CASE("extreme trigger still vaults correctly") {
  Tolerances tol;
  tol.pole_trigger = 1e12;  // clipped internally
  Params prm{Complex(0.4, -0.2), Complex(-0.3, 0.5)};
  Complex lam(3.0, 0.4);
  LaurentModel m = laurent_expand(prm, ThirdRoot::one(), lam, Complex(0.7, 0.3), 16);
  Complex za = lam - 0.1, zb = lam + 0.1;
  State init{za, m.eval_p(za), m.eval_q(za)};
  Trajectory tr = integrate(init, prm, PathSpec::line(za, zb), tol);
  CHECK(tr.stats.vaults == 1);
  CHECK(std::abs(tr.samples.back().p - m.eval_p(zb)) <
        1e-5 * (1 + std::abs(m.eval_p(zb))));
}

TEST_CASE("origin pole is rejected") {
  // the rational solution has its pole at the origin: not vaultable
  try {
    integrate(State{1, 1, -1}, Params{-1, 1},
              PathSpec::line(Complex(1, 0), Complex(-1, 0)));
    CHECK(false);
  } catch (const LabError& e) {
    CHECK(e.kind() == Err::PathThroughOrigin);
  }
}
