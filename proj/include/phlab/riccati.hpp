// Constructors and validators for the special solution classes: first kind
// (single residue class, scalar Riccati reduction) and second kind (two
// residue classes, built by a Backlund transform of a first-kind solution).
#pragma once

#include "phlab/survey.hpp"

namespace phlab {

struct ClassTag {
  enum class Kind { FirstKind, SecondKind, Generic };
  Kind kind = Kind::Generic;
  ThirdRoot rho;
  Params params;
};

// Right side of the scalar reduction p' = -alpha - rho z^2 + z p
// - conj(rho) p^2, valid on the class conj(rho) alpha - rho beta + 1 = 0.
Complex riccati_rhs_first(ThirdRoot rho, const Params& prm, Complex z, Complex p);

struct FirstKindOptions {
  State seed{Complex(0, 0), Complex(0, 0), Complex(0, 0)};  // z0, p0 (q ignored)
  Tolerances tol;
  bool validate = true;      // probe residuals + identities
  int validate_poles = 5;    // fitted-pole checks; 0 skips the scan
  double probe_tol = 1e-9;
};

struct FirstKindReport {
  double max_system_residual = 0.0;
  double max_identity = 0.0;     // |conj(rho) p + rho q - z| over probes
  double max_h = 0.0;            // fitted |h| over checked poles
  double max_H_residual = 0.0;   // Hamiltonian identity
  int poles_checked = 0;
  bool all_residues_match = true;
};

OraclePtr make_first_kind(ThirdRoot rho, Complex alpha,
                          const FirstKindOptions& opt = {},
                          FirstKindReport* report = nullptr);

// u_omega = omega p + conj(omega) q + z/2
Complex u_omega_value(const State& s, ThirdRoot omega);

// a(lambda; omega) of the second-kind local data
Complex second_kind_a(Complex lambda, ThirdRoot omega, const Params& prm);

struct SecondKindResiduals {
  double riccati = 0.0;    // u' = 3a + u^2 / (2 i Im omega)
  double K = 0.0;          // algebraic invariant K(z, p, q)
  double H = 0.0;          // H = q - p + z^3/3 + (beta + 1) z
  double h_law = 0.0;      // h + i Im omega - (beta + 1) lambda over poles
  int poles_checked = 0;
};

// Probe residuals of the second-kind identities; reports, does not judge.
SecondKindResiduals second_kind_residuals(const SolutionOracle& sol,
                                          ThirdRoot omega,
                                          const PoleDB* db = nullptr,
                                          int n_probes = 32);

struct SecondKindOptions {
  Tolerances tol;
  State base_seed{Complex(0, 0), Complex(0, 0), Complex(0, 0)};
  bool certify_transcendence = true;  // requires >= 3 poles of the base
};

// Member of the class with parameters (beta + 2, beta) carrying both rho and
// conj(rho) residue classes. Throws ExceptionalParameters for beta = -1
// (the empty class at (alpha, beta) = (1, -1)).
OraclePtr make_second_kind(Complex beta, ThirdRoot rho,
                           const SecondKindOptions& opt = {});

}  // namespace phlab
