#include "phlab/core.hpp"

namespace phlab {

const char* err_name(Err e) {
  switch (e) {
    case Err::NoPoleFound: return "NoPoleFound";
    case Err::AmbiguousResidue: return "AmbiguousResidue";
    case Err::StepSizeUnderflow: return "StepSizeUnderflow";
    case Err::PathThroughOrigin: return "PathThroughOrigin";
    case Err::VaultRadiusTooLarge: return "VaultRadiusTooLarge";
    case Err::IdenticallySingular: return "IdenticallySingular";
    case Err::ClassConditionViolated: return "ClassConditionViolated";
    case Err::ExceptionalParameters: return "ExceptionalParameters";
    case Err::DivisionByZeroClass: return "DivisionByZeroClass";
    case Err::UnclassifiableSector: return "UnclassifiableSector";
    case Err::PoleOfClosedForm: return "PoleOfClosedForm";
    case Err::ConfigError: return "ConfigError";
    case Err::NumericError: return "NumericError";
    case Err::DiagnosticsError: return "DiagnosticsError";
  }
  return "UnknownError";
}

Complex ThirdRoot::value() const {
  switch (k_) {
    case 1: return Complex(-0.5, 0.5 * kSqrt3);
    case 2: return Complex(-0.5, -0.5 * kSqrt3);
    default: return Complex(1.0, 0.0);
  }
}

ThirdRoot ThirdRoot::nearest(Complex v, double* dist) {
  int best = 0;
  double bd = std::abs(v - ThirdRoot(0).value());
  for (int k = 1; k < 3; ++k) {
    double d = std::abs(v - ThirdRoot(k).value());
    if (d < bd) {
      bd = d;
      best = k;
    }
  }
  if (dist) *dist = bd;
  return ThirdRoot(best);
}

std::pair<Complex, Complex> rhs(const State& s, const Params& prm) {
  Complex dp = -s.q * s.q - s.z * s.p - prm.alpha;
  Complex dq = s.p * s.p + s.z * s.q + prm.beta;
  return {dp, dq};
}

Complex hamiltonian(const State& s, const Params& prm) {
  return (s.p * s.p * s.p + s.q * s.q * s.q) / 3.0 + s.z * s.p * s.q +
         prm.beta * s.p + prm.alpha * s.q;
}

Complex pivmod_residual(Complex z, Complex w, Complex w1, Complex w2,
                        const Params& prm) {
  Complex w2p = w * w;
  Complex c = prm.alpha - prm.beta + Complex(1.0, 0.0);
  return 2.0 * w * w2 - w1 * w1 + w2p * w2p + 4.0 * z * w * w2p +
         (2.0 * prm.alpha + 2.0 * prm.beta + 3.0 * z * z) * w2p + c * c;
}

PivBridge piv_bridge(const Params& prm) {
  PivBridge out;
  out.alpha_hat = Complex(0.0, 1.0 / kSqrt3) * (prm.alpha + prm.beta);
  Complex c = prm.alpha - prm.beta + Complex(1.0, 0.0);
  out.beta_hat = (2.0 / 9.0) * c * c;
  out.b = std::pow(Complex(-4.0 / 3.0, 0.0), 0.25);
  out.a = -0.5 * out.b * out.b * out.b;
  return out;
}

std::pair<Complex, Complex> retour(Complex w, Complex wt, Complex z) {
  Complex om = ThirdRoot::omega().value();
  Complex omb = ThirdRoot::omega_bar().value();
  Complex p = (wt - omb * w - (omb - 1.0) * z) / (om - omb);
  Complex q = (wt - om * w - (om - 1.0) * z) / (omb - om);
  return {p, q};
}

}  // namespace phlab
