#include <vector>

#include "doctest.h"
#include "phlab/laurent.hpp"

using namespace phlab;

namespace {

// Test-side series arithmetic, independent of the recursion internals:
// residuals of both equations as Laurent coefficient arrays.
struct Series {
  // c[i] is the coefficient of t^(i-1), t = z - lambda
  std::vector<Complex> c;
  Complex at(int k) const {
    int i = k + 1;
    if (i < 0 || i >= int(c.size())) return {0, 0};
    return c[size_t(i)];
  }
};

Series to_series(const LaurentModel& m, bool p) {
  Series s;
  s.c.resize(size_t(m.order() + 2));
  for (int k = -1; k <= m.order(); ++k)
    s.c[size_t(k + 1)] = p ? m.coeff_p(k) : m.coeff_q(k);
  return s;
}

// coefficient of t^j in x*y, valid for j <= top
Complex conv(const Series& x, const Series& y, int j) {
  Complex s{0, 0};
  for (int m = -1; m <= j + 1; ++m) s += x.at(m) * y.at(j - m);
  return s;
}

// max scaled residual coefficient of both equations, orders -2..top
double residual_series(const LaurentModel& m, int top) {
  Series p = to_series(m, true), q = to_series(m, false);
  Complex lam = m.record().lambda;
  const Params& prm = m.params();
  double worst = 0;
  for (int j = -2; j <= top; ++j) {
    // p' + q^2 + z p + alpha at order j
    Complex r1 = double(j + 1) * p.at(j + 1) + conv(q, q, j) + lam * p.at(j) +
                 p.at(j - 1) + (j == 0 ? prm.alpha : Complex{0, 0});
    // q' - p^2 - z q - beta
    Complex r2 = double(j + 1) * q.at(j + 1) - conv(p, p, j) - lam * q.at(j) -
                 q.at(j - 1) - (j == 0 ? prm.beta : Complex{0, 0});
    double sc = 1.0 + std::abs(conv(q, q, j)) + std::abs(conv(p, p, j));
    worst = std::max(worst, std::max(std::abs(r1), std::abs(r2)) / sc);
  }
  return worst;
}

}  // namespace

TEST_CASE("printed low-order coefficients at residue 1") {
  Rng rng(23);
  for (int i = 0; i < 40; ++i) {
    Complex alpha = rng.box(-2, 2), beta = rng.box(-2, 2);
    Complex lam = rng.annulus(2, 20), h = rng.box(-2, 2);
    LaurentModel m = laurent_expand({alpha, beta}, ThirdRoot::one(), lam, h, 6);

    CHECK(std::abs(m.coeff_p(-1) - Complex(1, 0)) < 1e-14);
    CHECK(std::abs(m.coeff_q(-1) + Complex(1, 0)) < 1e-14);
    CHECK(std::abs(m.coeff_p(0) - 0.5 * lam) < 1e-13);
    CHECK(std::abs(m.coeff_q(0) - 0.5 * lam) < 1e-13);

    Complex a1 = 1.0 + (alpha - 2.0 * beta) / 3.0 - 0.25 * lam * lam;
    Complex b1 = 1.0 + (2.0 * alpha - beta) / 3.0 + 0.25 * lam * lam;
    CHECK(std::abs(m.coeff_p(1) - a1) < 1e-11 * (1.0 + std::abs(a1)));
    CHECK(std::abs(m.coeff_q(1) - b1) < 1e-11 * (1.0 + std::abs(b1)));

    Complex s = (5.0 / 8.0 + 0.25 * (alpha - beta)) * lam;
    CHECK(std::abs(m.coeff_p(2) - (h - s)) < 1e-11 * (1.0 + std::abs(s)));
    CHECK(std::abs(m.coeff_q(2) - (h + s)) < 1e-11 * (1.0 + std::abs(s)));

    // development of p + q - z starts (1 + alpha - beta)(z-lam) + 2h(z-lam)^2
    CHECK(std::abs(m.coeff_p(0) + m.coeff_q(0) - lam) < 1e-12 * (1 + std::abs(lam)));
    Complex lin = m.coeff_p(1) + m.coeff_q(1) - 1.0;
    CHECK(std::abs(lin - (1.0 + alpha - beta)) < 1e-11);
    CHECK(std::abs(m.coeff_p(2) + m.coeff_q(2) - 2.0 * h) < 1e-11);
  }
}

TEST_CASE("printed coefficients at general residue") {
  Rng rng(29);
  for (int k = 1; k < 3; ++k) {
    ThirdRoot rho(k);
    Complex rv = rho.value(), rb = rho.conj().value();
    for (int i = 0; i < 20; ++i) {
      Complex alpha = rng.box(-2, 2), beta = rng.box(-2, 2);
      Complex lam = rng.annulus(2, 20), h = rng.box(-1, 1);
      LaurentModel m = laurent_expand({alpha, beta}, rho, lam, h, 5);
      CHECK(std::abs(m.coeff_p(-1) - rv) < 1e-14);
      CHECK(std::abs(m.coeff_q(-1) + rb) < 1e-14);
      CHECK(std::abs(m.coeff_p(0) - 0.5 * rv * lam) < 1e-13 * (1 + std::abs(lam)));
      Complex a1 = rv + (alpha - 2.0 * rb * beta) / 3.0 - 0.25 * rv * lam * lam;
      CHECK(std::abs(m.coeff_p(1) - a1) < 1e-11 * (1.0 + std::abs(a1)));
      Complex b1 = rb + (2.0 * rv * alpha - beta) / 3.0 + 0.25 * rb * lam * lam;
      CHECK(std::abs(m.coeff_q(1) - b1) < 1e-11 * (1.0 + std::abs(b1)));
    }
  }
}

TEST_CASE("termwise residual of the expansion vanishes") {
  Rng rng(31);
  for (int i = 0; i < 30; ++i) {
    ThirdRoot rho(int(rng.next_u64() % 3));
    Complex alpha = rng.box(-2, 2), beta = rng.box(-2, 2);
    Complex lam = rng.annulus(2, 30), h = rng.box(-2, 2);
    LaurentModel m = laurent_expand({alpha, beta}, rho, lam, h, 9);
    CHECK(residual_series(m, 7) < 1e-10);
  }
  CHECK_THROWS_AS(laurent_expand({0, 0}, ThirdRoot::one(), Complex(3, 0),
                                 Complex(0, 0), 1),
                  LabError);
}

TEST_CASE("hamiltonian series") {
  Rng rng(37);
  for (int i = 0; i < 20; ++i) {
    int k = int(rng.next_u64() % 3);
    ThirdRoot rho(k);
    Complex alpha = rng.box(-2, 2), beta = rng.box(-2, 2);
    Complex lam = rng.annulus(2, 15), h = rng.box(-2, 2);
    LaurentModel m = laurent_expand({alpha, beta}, rho, lam, h, 10);
    auto hs = hamiltonian_series(m);

    Complex A = rho.conj().value() * alpha, B = rho.value() * beta;
    CHECK(std::abs(hs[0] - Complex(1, 0)) < 1e-11);  // residue of H
    Complex c0 = 2.0 * h + lam * lam * lam / 3.0 + 0.5 * (A + B) * lam;
    CHECK(std::abs(hs[1] - c0) < 1e-10 * (1.0 + std::abs(c0)));
    Complex c1 = (A + B) / 3.0 + 0.75 * lam * lam;
    CHECK(std::abs(hs[2] - c1) < 1e-10 * (1.0 + std::abs(c1)));

    // composition against a direct evaluation of H near the pole
    Complex z = lam + 0.07 / std::abs(lam) * std::polar(1.0, rng.uniform(0, 6.28));
    Complex Hm{0, 0};
    Complex t = z - lam, tp = ThirdRoot::one().value();
    for (size_t j = 0; j < hs.size(); ++j) {
      Hm += hs[j] * (j == 0 ? 1.0 / t : tp);
      if (j > 0) tp *= t;
    }
    Complex Hd = hamiltonian(State{z, m.eval_p(z), m.eval_q(z)}, {alpha, beta});
    CHECK(std::abs(Hm - Hd) < 1e-7 * (1.0 + std::abs(Hd)));
  }

  // h = 0, lambda large: constant term over lambda^3 tends to 1/3
  LaurentModel big = laurent_expand({Complex(0.3, 0.1), Complex(-0.4, 0.2)},
                                    ThirdRoot::one(), Complex(60, 20), 0, 6);
  auto hs = hamiltonian_series(big);
  Complex lam = big.record().lambda;
  CHECK(std::abs(hs[1] / (lam * lam * lam) - Complex(1.0 / 3.0, 0)) < 1e-3);
}

TEST_CASE("pole fitting round trip") {
  Rng rng(41);
  int n_ok = 0;
  for (int i = 0; i < 1000; ++i) {
    ThirdRoot rho(int(rng.next_u64() % 3));
    Complex alpha = rng.box(-2, 2), beta = rng.box(-2, 2);
    Complex lam = rng.annulus(2, 50), h = rng.box(-2, 2);
    LaurentModel m = laurent_expand({alpha, beta}, rho, lam, h, 10);

    std::vector<State> samples;
    double base = 1.0 / std::abs(lam);
    for (int j = 0; j < 14; ++j) {
      double r = base * (0.01 + 0.3 * double(j) / 13.0);
      Complex z = lam + std::polar(r, rng.uniform(0, 6.28));
      samples.push_back(State{z, m.eval_p(z), m.eval_q(z)});
    }
    PoleFit f = fit_pole(samples, {alpha, beta});
    CHECK(std::abs(f.record.lambda - lam) < 1e-9 * std::abs(lam));
    CHECK(f.record.residue == rho);
    CHECK(std::abs(f.record.h - h) < 1e-6);
    // implied q residue
    CHECK(std::abs(f.model.coeff_q(-1) + rho.conj().value()) < 1e-6);
    ++n_ok;
  }
  CHECK(n_ok == 1000);
}

TEST_CASE("fit_pole failure modes") {
  // all |p| moderate
  std::vector<State> flat;
  for (int i = 0; i < 8; ++i)
    flat.push_back(State{Complex(3.0 + 0.01 * i, 0.1), Complex(0.5, 0), Complex(1, 0)});
  CHECK_THROWS_WITH_AS(fit_pole(flat, {0, 0}), doctest::Contains("moderate"),
                       LabError);

  // the rational solution p = 1/z at (alpha,beta) = (-1,1): its only pole is
  // the origin, which is not an admissible record
  std::vector<State> origin;
  Rng rng(43);
  for (int i = 0; i < 10; ++i) {
    Complex z = std::polar(0.004 + 0.001 * i, rng.uniform(0, 6.28));
    origin.push_back(State{z, 1.0 / z, -1.0 / z});
  }
  try {
    fit_pole(origin, {-1, 1});
    CHECK(false);
  } catch (const LabError& e) {
    CHECK(e.kind() == Err::NoPoleFound);
  }
}
