#include <cmath>

#include "doctest.h"
#include "phlab/core.hpp"

using namespace phlab;

namespace {
double cnorm(Complex v) { return std::abs(v); }
}  // namespace

TEST_CASE("third roots of unity") {
  for (int k = 0; k < 3; ++k) {
    ThirdRoot r(k);
    Complex v = r.value();
    CHECK(cnorm(v * v * v - Complex(1, 0)) < 1e-15);
    CHECK(cnorm(r.conj().value() - std::conj(v)) < 1e-15);
  }
  CHECK((ThirdRoot(1) * ThirdRoot(2)) == ThirdRoot(0));
  double d = 0;
  CHECK(ThirdRoot::nearest(Complex(-0.45, 0.9), &d) == ThirdRoot::omega());
}

TEST_CASE("rhs examples") {
  // zero solution
  auto [dp0, dq0] = rhs(State{0, 0, 0}, Params{0, 0});
  CHECK(cnorm(dp0) == 0.0);
  CHECK(cnorm(dq0) == 0.0);

  // polynomial solution p = q = -z at (alpha, beta) = (1, -1)
  Complex z(0.7, -1.3);
  auto [dp, dq] = rhs(State{z, -z, -z}, Params{1, -1});
  CHECK(cnorm(dp - Complex(-1, 0)) < 1e-15);
  CHECK(cnorm(dq - Complex(-1, 0)) < 1e-15);

  // independently coded straight-line evaluation, bitwise
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    State s{rng.box(-2, 2), rng.box(-2, 2), rng.box(-2, 2)};
    Params prm{rng.box(-2, 2), rng.box(-2, 2)};
    auto [a, b] = rhs(s, prm);
    Complex dup_p = -(s.q * s.q) - (s.z * s.p) - prm.alpha;
    Complex dup_q = (s.p * s.p) + (s.z * s.q) + prm.beta;
    CHECK(a == dup_p);
    CHECK(b == dup_q);
  }
}

TEST_CASE("hamiltonian examples") {
  CHECK(cnorm(hamiltonian(State{0, 0, 0}, Params{2, 3})) == 0.0);
  // p = q = -z, (alpha,beta) = (1,-1): H = z^3/3
  Complex z(1.2, 0.4);
  Complex H = hamiltonian(State{z, -z, -z}, Params{1, -1});
  CHECK(cnorm(H - z * z * z / 3.0) < 1e-13);
}

TEST_CASE("pivmod residual") {
  // w == 0 with alpha - beta + 1 = 0
  Params prm{Complex(0.3, 0.2), Complex(1.3, 0.2)};
  CHECK(cnorm(pivmod_residual(Complex(2, 1), 0, 0, 0, prm)) < 1e-15);

  // p = q = -z: w = -3z, w' = -3, w'' = 0, params (1,-1)
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    Complex z = rng.box(-3, 3);
    Complex w = -3.0 * z;
    CHECK(cnorm(pivmod_residual(z, w, Complex(-3, 0), 0, Params{1, -1})) <
          1e-10 * (1.0 + std::pow(std::abs(z), 4.0)));
  }
}

TEST_CASE("piv bridge") {
  PivBridge br = piv_bridge(Params{0, 0});
  CHECK(cnorm(br.alpha_hat) < 1e-15);
  CHECK(cnorm(br.beta_hat - Complex(2.0 / 9.0, 0)) < 1e-15);
  CHECK(cnorm(br.b * br.b * br.b * br.b - Complex(-4.0 / 3.0, 0)) < 1e-12);
  CHECK(cnorm(br.a + 0.5 * br.b * br.b * br.b) < 1e-12);

  // alpha - beta + 1 = 0 makes beta_hat vanish
  PivBridge br2 = piv_bridge(Params{Complex(0.4, -0.7), Complex(1.4, -0.7)});
  CHECK(cnorm(br2.beta_hat) < 1e-15);

  // exceptional parameters alpha_k = (-1 - (2k+1) sqrt3 i)/2, beta = alpha+1:
  // the bridge gives alpha_hat = 2k+1 (real) and beta_hat = 0
  for (int k = 1; k <= 2; ++k) {
    Complex alpha(-0.5, -0.5 * (2 * k + 1) * kSqrt3);
    PivBridge b3 = piv_bridge(Params{alpha, alpha + 1.0});
    CHECK(cnorm(b3.alpha_hat - Complex(2 * k + 1, 0)) < 1e-12);
    CHECK(cnorm(b3.beta_hat) < 1e-15);
  }
}

TEST_CASE("retour recovers p and q") {
  Rng rng(7);
  Complex om = ThirdRoot::omega().value();
  Complex omb = ThirdRoot::omega_bar().value();
  for (int i = 0; i < 100; ++i) {
    Complex p = rng.box(-4, 4), q = rng.box(-4, 4), z = rng.box(-4, 4);
    Complex w = p + q - z;
    Complex wt = om * p + omb * q - z;
    auto [pr, qr] = retour(w, wt, z);
    CHECK(cnorm(pr - p) < 1e-12 * (1.0 + cnorm(p)));
    CHECK(cnorm(qr - q) < 1e-12 * (1.0 + cnorm(q)));
  }
  // p = q = 0: w = wt = -z
  auto [p0, q0] = retour(Complex(-2, 1), Complex(-2, 1), Complex(2, -1));
  CHECK(cnorm(p0) < 1e-14);
  CHECK(cnorm(q0) < 1e-14);
}
