// Backlund transformations acting pointwise on solution oracles, their
// parameters, pole residues, and quadrant signatures.
#pragma once

#include <array>
#include <vector>

#include "phlab/oracle.hpp"

namespace phlab {

struct BacklundStep {
  enum class Kind { M, R, Conj, B };
  Kind kind = Kind::R;
  ThirdRoot omega;  // root tag of M and B steps

  static BacklundStep M(ThirdRoot w) { return {Kind::M, w}; }
  static BacklundStep R() { return {Kind::R, ThirdRoot::one()}; }
  static BacklundStep C() { return {Kind::Conj, ThirdRoot::one()}; }
  static BacklundStep B(ThirdRoot w) { return {Kind::B, w}; }

  std::string name() const;
};

// "M1;Mw;MW;B1;Bw;BW;R;C" -- root tags 1, w, W for 1, omega, omega_bar
std::vector<BacklundStep> parse_chain(const std::string& spec);
std::string chain_name(const std::vector<BacklundStep>& steps);

Params map_params(const BacklundStep& step, const Params& prm);

// Pointwise map of a sample of the inner solution. For R and Conj the inner
// sample must have been taken at iz and conj(z) respectively.
OracleSample map_sample(const BacklundStep& step, const Params& inner_prm,
                        const OracleSample& inner, Complex z_outer);

// The z at which the inner solution must be evaluated to produce the outer
// value at z.
Complex inner_point(const BacklundStep& step, Complex z_outer);

struct ApplyOptions {
  int n_probes = 12;
  double residual_tol = 1e-6;
  Tolerances tol;
  bool validate = true;
};

// Trivial transformations M_omega, R, Conj.
OraclePtr apply_trivial(const BacklundStep& step, OraclePtr sol,
                        const ApplyOptions& opt = {});

// Nontrivial transformation B_omega. Throws IdenticallySingular when the
// denominator omega p + conj(omega) q - z vanishes identically (first-kind
// oracles of the matching class).
OraclePtr apply_B(ThirdRoot omega, OraclePtr sol, const ApplyOptions& opt = {});

OraclePtr apply_step(const BacklundStep& step, OraclePtr sol,
                     const ApplyOptions& opt = {});

// Left-to-right composition; IdenticallySingular failures carry the step index.
OraclePtr chain(const std::vector<BacklundStep>& steps, OraclePtr sol,
                const ApplyOptions& opt = {});

// ---------------------------------------------------------------------------
// Residue bookkeeping under B_omega (pole locations are preserved; the free
// coefficient is not transported and must be refitted when needed).
std::optional<PoleRecord> residue_transition(ThirdRoot omega,
                                             const PoleRecord& record);

// ---------------------------------------------------------------------------
// Quadrant signatures <tau_1 tau_2 tau_3 tau_4>: p ~ -tau_nu z on the open
// quadrant nu.
struct Signature {
  std::array<ThirdRoot, 4> tau;
  bool operator==(const Signature& o) const { return tau == o.tau; }
  std::string str() const;
  // the alternating sum sum_nu (-1)^nu tau_nu
  Complex alternating_sum() const;
};

Signature signature_map(const BacklundStep& step, const Signature& sig);

}  // namespace phlab
