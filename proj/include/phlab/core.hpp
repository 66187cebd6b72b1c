// Domain types and the right-hand side of the cubic Hamiltonian system
//
//   p' = -q^2 - z p - alpha,   q' = p^2 + z q + beta,
//
// together with its Hamiltonian, the modified-PIV residual for w = p+q-z,
// and the parameter bridge to the standard fourth Painleve equation.
#pragma once

#include <complex>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace phlab {

using Complex = std::complex<double>;

inline constexpr double kSqrt3 = 1.7320508075688772935;

// ---------------------------------------------------------------------------
// Errors

enum class Err {
  NoPoleFound,
  AmbiguousResidue,
  StepSizeUnderflow,
  PathThroughOrigin,
  VaultRadiusTooLarge,
  IdenticallySingular,
  ClassConditionViolated,
  ExceptionalParameters,
  DivisionByZeroClass,
  UnclassifiableSector,
  PoleOfClosedForm,
  ConfigError,
  NumericError,
  DiagnosticsError,
};

class LabError : public std::runtime_error {
 public:
  LabError(Err kind, const std::string& what, int step_index = -1)
      : std::runtime_error(what), kind_(kind), step_index_(step_index) {}
  Err kind() const { return kind_; }
  // index of the offending chain step or sweep circle, when applicable
  int step_index() const { return step_index_; }

 private:
  Err kind_;
  int step_index_;
};

const char* err_name(Err e);

// ---------------------------------------------------------------------------
// Basic types

struct Params {
  Complex alpha{0.0, 0.0};
  Complex beta{0.0, 0.0};
};

// A third root of unity stored as its index k, value exp(2*pi*i*k/3).
// Keeping the index (not the complex value) makes residue classes discrete
// and usable as keys.
class ThirdRoot {
 public:
  constexpr ThirdRoot() : k_(0) {}
  constexpr explicit ThirdRoot(int k) : k_(((k % 3) + 3) % 3) {}

  int k() const { return k_; }
  Complex value() const;
  ThirdRoot conj() const { return ThirdRoot((3 - k_) % 3); }
  ThirdRoot operator*(ThirdRoot o) const { return ThirdRoot(k_ + o.k_); }
  bool operator==(ThirdRoot o) const { return k_ == o.k_; }
  bool operator!=(ThirdRoot o) const { return k_ != o.k_; }

  static ThirdRoot one() { return ThirdRoot(0); }
  static ThirdRoot omega() { return ThirdRoot(1); }
  static ThirdRoot omega_bar() { return ThirdRoot(2); }

  // Nearest root of unity to v; distance to it returned in *dist when given.
  static ThirdRoot nearest(Complex v, double* dist = nullptr);

 private:
  int k_;
};

struct State {
  Complex z{};
  Complex p{};
  Complex q{};
};

struct PivBridge {
  Complex a{};
  Complex b{};
  Complex alpha_hat{};
  Complex beta_hat{};
};

// ---------------------------------------------------------------------------
// Operations

// dp = -q^2 - z p - alpha, dq = p^2 + z q + beta
std::pair<Complex, Complex> rhs(const State& s, const Params& prm);

// H(z,p,q) = (p^3 + q^3)/3 + z p q + beta p + alpha q
Complex hamiltonian(const State& s, const Params& prm);

// Residual of the second-order equation satisfied by w = p + q - z:
//   2 w w'' - w'^2 + w^4 + 4 z w^3 + (2a + 2b + 3 z^2) w^2 + (a - b + 1)^2.
Complex pivmod_residual(Complex z, Complex w, Complex w1, Complex w2,
                        const Params& prm);

// Parameters of the associated fourth Painleve equation, via y(z) = a w(b z):
//   alpha_hat = (i/sqrt3)(alpha + beta), beta_hat = (2/9)(alpha - beta + 1)^2,
//   b = (-4/3)^(1/4) (principal branch), a = -b^3/2.
PivBridge piv_bridge(const Params& prm);

// Recover (p, q) from w = p + q - z and wt = w~ = omega p + omega_bar q - z.
std::pair<Complex, Complex> retour(Complex w, Complex wt, Complex z);

// ---------------------------------------------------------------------------
// Small helpers shared across modules

inline bool is_finite(Complex v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}

// Deterministic 64-bit mix / LCG used wherever "random" probes are needed.
// No wall clock, no global state: runs are reproducible byte for byte.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : s_(seed * 2862933555777941757ULL + 3037000493ULL) {}
  std::uint64_t next_u64() {
    s_ ^= s_ << 13;
    s_ ^= s_ >> 7;
    s_ ^= s_ << 17;
    return s_ * 2685821657736338717ULL;
  }
  double uniform() {  // in [0,1)
    return double(next_u64() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  Complex box(double lo, double hi) {
    return Complex(uniform(lo, hi), uniform(lo, hi));
  }
  // point in the annulus r0 <= |z| <= r1
  Complex annulus(double r0, double r1) {
    double r = std::sqrt(uniform(r0 * r0, r1 * r1));
    double th = uniform(0.0, 6.283185307179586);
    return std::polar(r, th);
  }

 private:
  std::uint64_t s_;
};

}  // namespace phlab
